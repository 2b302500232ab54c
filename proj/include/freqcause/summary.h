/*
 * Copyright 2026 The freqcause Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Corpus-level statistics aggregated from per-file reports. Aggregation is a
// pure function of the report JSON (and compose.json when present).
//
// Only reports whose original label equals the ground truth taken from the
// file name count as correctly classified; files without a ground truth are
// treated as correct. Every statistic below is over correct reports.

#ifndef FREQCAUSE_SUMMARY_H_
#define FREQCAUSE_SUMMARY_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freqcause/serialize.h"

namespace freqcause {

struct SufficiencyStats {
  size_t reports = 0;
  size_t with_sufficient = 0;
  // Mean of 100 * |sufficient| / num_bins over reports with a sufficient set.
  double mean_percent = 0.0;
};

struct CompletenessStats {
  // Reports with both a necessary and a complete set.
  size_t count = 0;
  // shift = score(complete) - score(necessary).
  double mean_abs_shift = 0.0;
  double std_abs_shift = 0.0;
  size_t up = 0;
  size_t down = 0;
  size_t unchanged = 0;
};

struct CompositionStats {
  size_t clips = 0;
  bool full_success = false;
  double prefix_success_rate = 0.0;
};

struct AttackStats {
  // Correct reports with a Fourier attack result.
  size_t attacked = 0;
  size_t success = 0;
  size_t one_frequency = 0;
  size_t within_five = 0;
};

struct FrameSizeStats {
  size_t reached = 0;
  size_t success = 0;
};

struct StftStats {
  // Correct reports whose Fourier attack succeeded and that ran the STFT attack.
  size_t attempted = 0;
  size_t success = 0;
  std::map<size_t, FrameSizeStats> frame_sizes;
};

struct CorpusSummary {
  std::string model;
  size_t reports = 0;
  size_t correct = 0;
  std::vector<std::string> labels;
  std::map<std::string, SufficiencyStats> sufficiency;
  // Inverse label counts over all correct reports with an inverse.
  std::map<std::string, size_t> inversion;
  // Per ground-truth label.
  std::map<std::string, std::map<std::string, size_t>> inversion_by_label;
  CompletenessStats completeness;
  std::map<std::string, CompositionStats> composition;
  AttackStats attack;
  StftStats stft;
};

// Throws InvalidArgument when `reports` is empty.
CorpusSummary Summarize(const std::vector<Json>& reports,
                        const std::optional<Json>& compose = std::nullopt);

// Reads <run_dir>/reports/*.json and <run_dir>/compose.json if present.
CorpusSummary SummarizeDirectory(const std::string& run_dir);

Json ToJson(const CorpusSummary& summary);

// Writes summary.json and the table CSVs into `out_dir`:
//   table1_sufficiency.csv   model x label, mean % of bins
//   inversion_histogram.csv  model, true label, inverse label, count
//   completeness.csv         model, count, mean/std |shift|, up/down shares
//   table2_composition.csv   model x label, prefix success rate
//   table3_attack.csv        model, success, 1 freq, 5 freqs
//   table4_stft.csv          model, success, one column per frame size
void WriteSummary(const CorpusSummary& summary, const std::string& out_dir);

}  // namespace freqcause

#endif  // FREQCAUSE_SUMMARY_H_

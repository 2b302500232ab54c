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

// Greedy extraction of sufficient, necessary and complete bin sets from a
// responsibility map.
//
// Bins are ordered by descending responsibility (ties: ascending index) and
// added to a growing set one step at a time. At each step the set's own
// reconstruction and, when needed, the reconstruction of its complement are
// classified. Writing `orig` for the classification of the full spectrum:
//
//   sufficient(t): label(t) == orig.label and score(t) >= ratio * orig.score
//   necessary(t):  sufficient(t) and label(complement(t)) != orig.label
//   complete(t):   round2(score(t)) == round2(orig.score) and
//                  necessary(t .. t + chain_length - 1)
//
// Sufficient and necessary sets are the first steps starting a run of
// chain_length consecutive steps satisfying their condition. Because the
// conditions imply each other in order and the set only grows, the reported
// sets are nested.

#ifndef FREQCAUSE_SUBSETS_H_
#define FREQCAUSE_SUBSETS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freqcause/classifier.h"
#include "freqcause/responsibility.h"
#include "freqcause/signal.h"

namespace freqcause {

struct ExtractionConfig {
  size_t chain_length = 5;
  double min_score_ratio = 0.5;
  // 0: one step per group of equal nonzero responsibility. k > 0: k bins per
  // step throughout.
  size_t step_bins = 0;
  // With step_bins == 0, the zero-responsibility tail is split into at most
  // this many steps.
  size_t tail_steps = 64;
};

void Validate(const ExtractionConfig& config);

// Scores rounded to two decimals compare equal.
bool ScoresMatch2dp(double a, double b);

// The greedy order cut into steps. `nonzero_steps` counts the leading steps
// made of nonzero-responsibility bins.
struct GreedyPlan {
  std::vector<size_t> order;
  // ends[t] is the number of ordered bins included after step t.
  std::vector<size_t> ends;
  size_t nonzero_steps = 0;

  BinSet Prefix(size_t step) const;
  BinSet StepBins(size_t step) const;
};

GreedyPlan PlanSteps(const ResponsibilityMap& map, const ExtractionConfig& config);

struct SubsetReport {
  std::optional<BinSet> sufficient;
  std::optional<BinSet> necessary;
  std::optional<BinSet> complete;
  Classification original;
  std::optional<Classification> at_sufficient;
  std::optional<Classification> at_necessary;
  std::optional<Classification> at_complete;
  // Classification of the spectrum with the necessary set removed.
  std::optional<Classification> inverse_of_necessary;
  std::optional<size_t> sufficient_step;
  std::optional<size_t> necessary_step;
  std::optional<size_t> complete_step;
  size_t steps_evaluated = 0;
  size_t total_bins = 0;
  uint64_t query_count = 0;
  std::vector<std::string> diagnostics;
};

SubsetReport Extract(const Spectrum& spectrum, const ResponsibilityMap& map,
                     ClassifierHandle& handle, const ExtractionConfig& config,
                     const Classification& original);

// Classifies the unmasked spectrum first.
SubsetReport Extract(const Spectrum& spectrum, const ResponsibilityMap& map,
                     ClassifierHandle& handle, const ExtractionConfig& config);

struct Inversion {
  TimeSignal signal;
  Classification classification;
};

// The spectrum with `subset` removed, reconstructed and classified.
Inversion Invert(const Spectrum& spectrum, const BinSet& subset, ClassifierHandle& handle);

struct Composition {
  TimeSignal signal;
  Classification classification;
  bool success = false;
};

// Bin-wise sum of the spectra, reconstructed, scaled down to unit peak if it
// would clip, and classified. Throws InvalidArgument on an empty list or
// mixed lengths/sample rates.
Composition Compose(const std::vector<Spectrum>& spectra, ClassifierHandle& handle,
                    const std::string& target_label);

// Fresh-query re-verification of every set a report claims.
struct ReplayResult {
  bool sufficient_ok = true;
  bool necessary_ok = true;
  bool complete_ok = true;
  std::vector<std::string> failures;

  bool ok() const { return sufficient_ok && necessary_ok && complete_ok; }
};

ReplayResult Replay(const Spectrum& spectrum, const SubsetReport& report,
                    ClassifierHandle& handle, const ExtractionConfig& config);

}  // namespace freqcause

#endif  // FREQCAUSE_SUBSETS_H_

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

// Untargeted label flips by scaling responsibility-ranked sufficient bins.
//
// Fourier attack:
//   1. Rank the sufficient bins by descending responsibility. Apply the
//      strongest mutation to the top 1, top 2, ... bins until the label
//      changes, the frequency budget is spent or the bins run out.
//   2. Holding that bin count n fixed, try the mutations from weakest to
//      strongest and keep the first one that still flips.
//
// STFT attack: starting from a successful Fourier attack, apply its mutation
// to the STFT bins nearest the modified frequencies, one more frame at a time
// in order of decreasing magnitude on those bins. Frame sizes are tried in
// schedule order; the next size is only used if the previous one never
// flipped.
//
// A mutation delta multiplies a complex bin by delta * exp(i * phase). The
// strength of delta is |ln |delta||, so 0.5 and 2 are weaker than 0.25 and 4
// and delta = 0 (removal) is the strongest.

#ifndef FREQCAUSE_ATTACKS_H_
#define FREQCAUSE_ATTACKS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freqcause/classifier.h"
#include "freqcause/responsibility.h"
#include "freqcause/signal.h"

namespace freqcause {

struct AttackConfig {
  std::vector<double> deltas = {0.0, 0.25, 0.5, 2.0, 4.0, 8.0};
  // Maximum number of alterable frequencies.
  size_t budget = 1000;
  // Extra phase rotation applied with every mutation.
  double phase_radians = 0.0;
  std::vector<size_t> frame_schedule = {256, 512, 1024};
  // Per frame size; 0 means every frame may be modified.
  size_t max_frames = 0;
  // Skip the STFT attack when the Fourier attack failed.
  bool require_fourier_success = true;
};

void Validate(const AttackConfig& config);

double PerturbationStrength(double delta);

// Stable sort of `deltas` by increasing strength.
std::vector<double> OrderByStrength(const std::vector<double>& deltas);

// Sufficient bins ordered by descending responsibility, ties by index.
std::vector<size_t> RankByResponsibility(const BinSet& bins, const ResponsibilityMap& map);

struct MutationPlan {
  std::vector<double> deltas;
  std::optional<double> chosen_delta;
  // Always the top n_frequencies of the ranking.
  BinSet bins_modified;
  size_t n_frequencies = 0;
  size_t budget = 0;
};

struct FrameSizeOutcome {
  size_t frame_size = 0;
  bool attempted = false;
  bool success = false;
  size_t frames_tried = 0;
};

struct AttackResult {
  bool success = false;
  // Why a failed attack stopped: "identity", "budget", "bins", "no-flip",
  // "fourier-failed".
  std::string stop_reason;
  TimeSignal altered;
  Classification before;
  std::optional<Classification> after;
  MutationPlan plan;
  std::vector<size_t> ranking;
  // Fourier attack only: the mutated spectrum that `altered` inverts.
  std::optional<Spectrum> altered_spectrum;
  // STFT attack only.
  size_t frames_modified = 0;
  size_t frame_size_used = 0;
  BinSet stft_bins;
  std::vector<FrameSizeOutcome> frame_sizes;

  uint64_t query_count = 0;
  uint64_t phase1_queries = 0;
  uint64_t phase2_queries = 0;
  double linf_delta = 0.0;
  double l2_delta = 0.0;
};

Spectrum ApplyMutation(const Spectrum& spectrum, std::span<const size_t> bins, double delta,
                       double phase_radians = 0.0);

AttackResult FourierAttack(const Spectrum& spectrum, const ResponsibilityMap& map,
                           const BinSet& sufficient, ClassifierHandle& handle,
                           const AttackConfig& config, const Classification& before);

// Classifies the unmodified spectrum first.
AttackResult FourierAttack(const Spectrum& spectrum, const ResponsibilityMap& map,
                           const BinSet& sufficient, ClassifierHandle& handle,
                           const AttackConfig& config);

AttackResult StftAttack(const TimeSignal& signal, const AttackResult& fourier,
                        ClassifierHandle& handle, const AttackConfig& config);

// Replays the guarantees of a Fourier attack with fresh queries.
struct AttackReplay {
  bool locality_ok = true;
  bool budget_ok = true;
  bool flip_ok = true;
  bool minimal_ok = true;
  std::vector<std::string> failures;

  bool ok() const { return locality_ok && budget_ok && flip_ok && minimal_ok; }
};

AttackReplay ReplayFourierAttack(const Spectrum& spectrum, const AttackResult& result,
                                 ClassifierHandle& handle, const AttackConfig& config);

}  // namespace freqcause

#endif  // FREQCAUSE_ATTACKS_H_

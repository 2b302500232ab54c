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

// Approximate per-bin sufficient responsibility by randomized partition
// interventions.
//
// One pass partitions the spectrum bins at random into p parts and queries
// the classifier on every nonempty union of parts, with all other bins
// removed. A union "passes" when the top-1 label equals the target label. For
// every minimal passing union (no queried strict sub-union passes), each
// member part is partitioned again into p sub-parts and searched the same
// way, keeping the rest of that union unmasked as context. Parts that are
// not refined further (depth limit or a single bin) credit each of their
// bins with 1/|S|, S being all bins present in the passing query.
//
// Passes are repeated with fresh partitions and summed until the earth
// mover's distance between the new pass and the running total (both
// normalized) drops to epsilon or the iteration limit is hit.

#ifndef FREQCAUSE_RESPONSIBILITY_H_
#define FREQCAUSE_RESPONSIBILITY_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "freqcause/classifier.h"
#include "freqcause/signal.h"

namespace freqcause {

struct PartitionConfig {
  size_t parts = 4;
  size_t max_depth = 3;
  size_t iterations = 20;
  // In bins. Calibrated on the builtin corpus, see docs/calibration.md.
  double epsilon = 200.0;
  uint64_t seed = 0;
};

// Throws InvalidArgument unless parts >= 2, iterations >= 1, epsilon > 0.
void Validate(const PartitionConfig& config);

struct ResponsibilityMap {
  std::vector<double> scores;
  size_t iterations_run = 0;
  // EMD of each pass against the running total before it was added. The
  // first entry is +inf (the running total is still empty).
  std::vector<double> emd_trace;
  // False when the classifier budget ran out mid-computation.
  bool complete = true;
  uint64_t queries = 0;

  size_t NonzeroCount() const;
};

// Seed used for pass `iteration` of a run seeded with `seed`.
uint64_t IterationSeed(uint64_t seed, uint64_t iteration);

// A single randomized pass using config.seed. `target` is the
// classification of the unmasked spectrum.
ResponsibilityMap CalculateResponsibility(const Spectrum& spectrum, ClassifierHandle& handle,
                                          const PartitionConfig& config,
                                          const Classification& target);

ResponsibilityMap Accumulate(ClassifierHandle& handle, const Spectrum& spectrum,
                             const PartitionConfig& config, const Classification& target);

// Classifies the unmasked spectrum first and uses it as the target.
ResponsibilityMap Accumulate(ClassifierHandle& handle, const Spectrum& spectrum,
                             const PartitionConfig& config);

}  // namespace freqcause

#endif  // FREQCAUSE_RESPONSIBILITY_H_

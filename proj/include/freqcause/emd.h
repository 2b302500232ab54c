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

#ifndef FREQCAUSE_EMD_H_
#define FREQCAUSE_EMD_H_

#include <span>

namespace freqcause {

// Earth mover's distance between two nonnegative histograms over the same
// unit-spaced bins, each normalized to unit mass. In one dimension the
// optimal transport cost is the L1 distance between the cumulative sums.
//
// Throws InvalidArgument on length mismatch, negative or non-finite entries,
// or zero total mass.
double EarthMoversDistance(std::span<const double> a, std::span<const double> b);

}  // namespace freqcause

#endif  // FREQCAUSE_EMD_H_

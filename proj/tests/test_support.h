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

#ifndef FREQCAUSE_TESTS_TEST_SUPPORT_H_
#define FREQCAUSE_TESTS_TEST_SUPPORT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "freqcause/classifier.h"
#include "freqcause/signal.h"

namespace freqcause::testing {

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::string& path() const { return path_; }
  std::string File(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

TimeSignal RandomSignal(size_t n, uint32_t sample_rate, uint64_t seed, float amplitude = 0.5f);
TimeSignal Tone(size_t n, uint32_t sample_rate, double frequency_hz, float amplitude = 0.5f);
TimeSignal Silence(size_t n, uint32_t sample_rate);

std::string ReadBytes(const std::string& path);

// Threshold classifiers over the magnitudes of the one-sided spectrum of the
// classified signal, relative to `reference` magnitudes. A bin counts as
// present when its magnitude is at least half its reference. The label is
// "target" when at least `needed` bins of `members` are present, "other"
// otherwise. needed == members.size() is an AND, needed == 1 an OR.
// Both labels carry score 0.9.
ClassifierHandle ThresholdClassifier(const Spectrum& reference, std::vector<size_t> members,
                                     size_t needed);

// A random spectrum with a threshold classifier over it. Instances rotate
// through AND (needed == members), OR (needed == 1) and k-of-M families.
struct ToyInstance {
  Spectrum spectrum;
  std::vector<size_t> members;
  size_t needed = 0;
  std::string family;
};

// `num_bins` must be at least 2.
ToyInstance MakeToyInstance(uint64_t seed, size_t num_bins);

struct SubsetOracle {
  // Bin sets whose reconstruction keeps the target label while no strict
  // subset does.
  std::vector<BinSet> minimal_sufficient;
  // Per bin, the largest 1/|S| over minimal sufficient sets S containing it,
  // 0 when it belongs to none.
  std::vector<double> responsibility;
};

// Classifies every subset of the spectrum's bins (at most 20 bins).
SubsetOracle BruteForceSubsets(const Spectrum& spectrum, ClassifierHandle& handle,
                               const std::string& target_label);

// Minimum cost of moving normalized `a` onto normalized `b` with ground
// distance |i - j|, solved as a min-cost flow by successive shortest paths.
double TransportCost(std::span<const double> a, std::span<const double> b);

// "cmd:<stub_bridge> <args>".
std::string StubCommand(const std::string& args = "");

}  // namespace freqcause::testing

#endif  // FREQCAUSE_TESTS_TEST_SUPPORT_H_

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

#include "freqcause/responsibility.h"

#include <cmath>
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include "freqcause/builtin_classifier.h"
#include "freqcause/corpus.h"
#include "test_support.h"

namespace freqcause {
namespace {

using testing::BruteForceSubsets;
using testing::MakeToyInstance;
using testing::RandomSignal;
using testing::ThresholdClassifier;

std::vector<size_t> AllBins(size_t n) {
  std::vector<size_t> bins(n);
  for (size_t k = 0; k < n; ++k) bins[k] = k;
  return bins;
}

PartitionConfig ToyConfig() {
  PartitionConfig config;
  config.max_depth = 12;
  config.iterations = 20;
  config.epsilon = 1e-3;
  return config;
}

TEST(ResponsibilityTest, OnlyFullSetPassesAtDepthZero) {
  const Spectrum s = Forward(RandomSignal(30, 8000, 1));  // 16 bins
  ClassifierHandle handle = ThresholdClassifier(s, AllBins(s.size()), s.size());
  PartitionConfig config;
  config.max_depth = 0;
  const Classification target = ClassifySpectrum(handle, s);
  ASSERT_EQ(target.label, "target");
  const uint64_t before = handle.query_count();
  const ResponsibilityMap map = CalculateResponsibility(s, handle, config, target);
  EXPECT_EQ(handle.query_count() - before, 15u);
  EXPECT_EQ(map.queries, 15u);
  for (double r : map.scores) EXPECT_DOUBLE_EQ(r, 1.0 / 16.0);
}

TEST(ResponsibilityTest, IdenticalPassesStopAtSecondIteration) {
  const Spectrum s = Forward(RandomSignal(30, 8000, 1));
  ClassifierHandle handle = ThresholdClassifier(s, AllBins(s.size()), s.size());
  PartitionConfig config;
  config.max_depth = 0;
  config.epsilon = 1e-12;
  const ResponsibilityMap map = Accumulate(handle, s, config);
  EXPECT_EQ(map.iterations_run, 2u);
  ASSERT_EQ(map.emd_trace.size(), 2u);
  EXPECT_TRUE(std::isinf(map.emd_trace[0]));
  EXPECT_EQ(map.emd_trace[1], 0.0);
  EXPECT_TRUE(map.complete);
}

TEST(ResponsibilityTest, InfiniteEpsilonRunsOnePass) {
  const Spectrum s = Forward(RandomSignal(30, 8000, 2));
  ClassifierHandle handle = ThresholdClassifier(s, {3, 7}, 1);
  PartitionConfig config;
  config.epsilon = std::numeric_limits<double>::infinity();
  EXPECT_EQ(Accumulate(handle, s, config).iterations_run, 1u);
}

TEST(ResponsibilityTest, SeededRunsAreBitIdentical) {
  const Spectrum s = Forward(RandomSignal(62, 8000, 3));
  ClassifierHandle handle = ThresholdClassifier(s, {2, 9, 20}, 2);
  PartitionConfig config = ToyConfig();
  config.seed = 42;
  const ResponsibilityMap a = Accumulate(handle, s, config);
  const ResponsibilityMap b = Accumulate(handle, s, config);
  ASSERT_EQ(a.scores.size(), b.scores.size());
  EXPECT_EQ(std::memcmp(a.scores.data(), b.scores.data(), a.scores.size() * sizeof(double)), 0);
  EXPECT_EQ(a.iterations_run, b.iterations_run);
  EXPECT_EQ(a.queries, b.queries);
  EXPECT_NE(IterationSeed(42, 0), IterationSeed(42, 1));
  EXPECT_NE(IterationSeed(42, 0), IterationSeed(43, 0));
}

TEST(ResponsibilityTest, AgreesWithBruteForceOracle) {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const testing::ToyInstance toy = MakeToyInstance(seed, 4 + seed % 9);
    ClassifierHandle handle = ThresholdClassifier(toy.spectrum, toy.members, toy.needed);
    const testing::SubsetOracle oracle = BruteForceSubsets(toy.spectrum, handle, "target");
    PartitionConfig config = ToyConfig();
    config.seed = seed;
    const ResponsibilityMap map = Accumulate(handle, toy.spectrum, config);
    for (size_t k = 0; k < toy.spectrum.size(); ++k) {
      // A credited bin must belong to some minimal sufficient set, and with
      // enough passes every such bin is credited.
      EXPECT_EQ(map.scores[k] > 0.0, oracle.responsibility[k] > 0.0)
          << toy.family << " seed " << seed << " bin " << k;
    }
  }
}

TEST(ResponsibilityTest, OracleOnKnownInstances) {
  const Spectrum s = Forward(RandomSignal(14, 8000, 4));  // 8 bins
  ClassifierHandle and_handle = ThresholdClassifier(s, {1, 4}, 2);
  testing::SubsetOracle oracle = BruteForceSubsets(s, and_handle, "target");
  ASSERT_EQ(oracle.minimal_sufficient.size(), 1u);
  EXPECT_EQ(oracle.minimal_sufficient[0], (BinSet{1, 4}));
  EXPECT_EQ(oracle.responsibility[1], 0.5);
  EXPECT_EQ(oracle.responsibility[0], 0.0);

  ClassifierHandle or_handle = ThresholdClassifier(s, {1, 4, 6}, 1);
  oracle = BruteForceSubsets(s, or_handle, "target");
  EXPECT_EQ(oracle.minimal_sufficient.size(), 3u);
  EXPECT_EQ(oracle.responsibility[6], 1.0);
}

TEST(ResponsibilityTest, BudgetExhaustionMarksIncomplete) {
  const Spectrum s = Forward(RandomSignal(62, 8000, 5));
  ClassifierHandle handle = ThresholdClassifier(s, {2, 9}, 2);
  handle.set_budget(20);
  const ResponsibilityMap map = Accumulate(handle, s, ToyConfig());
  EXPECT_FALSE(map.complete);
  EXPECT_EQ(map.iterations_run, 1u);
  EXPECT_EQ(handle.query_count(), 20u);
}

TEST(ResponsibilityTest, RejectsBadConfig) {
  PartitionConfig config;
  config.parts = 1;
  EXPECT_THROW(Validate(config), InvalidArgument);
  config = PartitionConfig{};
  config.iterations = 0;
  EXPECT_THROW(Validate(config), InvalidArgument);
  config = PartitionConfig{};
  config.epsilon = 0.0;
  EXPECT_THROW(Validate(config), InvalidArgument);
  config = PartitionConfig{};
  config.epsilon = std::nan("");
  EXPECT_THROW(Validate(config), InvalidArgument);
}

// A one-tone corpus clip: the tone bin dominates the map, and the default
// epsilon stops the accumulation before the iteration limit.
TEST(ResponsibilityTest, BuiltinToneClipCalibration) {
  CorpusClip info;
  const TimeSignal x =
      SynthesizeClip(CorpusConfig{}, DefaultBuiltinWeights(), "classA", 0, &info);
  ASSERT_EQ(info.tone_hz.size(), 1u);
  const Spectrum s = Forward(x);
  ClassifierHandle handle = BuiltinReferenceClassifier();
  PartitionConfig config;
  const ResponsibilityMap map = Accumulate(handle, s, config);
  EXPECT_LT(map.iterations_run, config.iterations);
  EXPECT_LE(map.emd_trace.back(), config.epsilon);

  const size_t tone_bin = info.tone_hz[0] * x.size() / x.sample_rate;
  size_t best = 0;
  for (size_t k = 0; k < map.scores.size(); ++k) {
    if (map.scores[k] > map.scores[best]) best = k;
  }
  EXPECT_EQ(best, tone_bin);
}

}  // namespace
}  // namespace freqcause

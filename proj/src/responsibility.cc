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

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "freqcause/emd.h"

namespace freqcause {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class PassSearch {
 public:
  PassSearch(const Spectrum& spectrum, ClassifierHandle& handle,
             const PartitionConfig& config, const std::string& target_label)
      : spectrum_(spectrum),
        handle_(handle),
        config_(config),
        target_label_(target_label),
        rng_(config.seed),
        scores_(spectrum.size(), 0.0) {}

  void Run() {
    std::vector<size_t> all(spectrum_.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = i;
    Search(all, {}, 0);
  }

  std::vector<double>& scores() { return scores_; }

 private:
  // Deals a shuffled copy of `region` round-robin into at most `parts`
  // nonempty parts.
  std::vector<std::vector<size_t>> Partition(std::vector<size_t> region) {
    for (size_t i = region.size(); i > 1; --i) {
      std::swap(region[i - 1], region[rng_() % i]);
    }
    const size_t count = std::min(config_.parts, region.size());
    std::vector<std::vector<size_t>> parts(count);
    for (size_t i = 0; i < region.size(); ++i) parts[i % count].push_back(region[i]);
    return parts;
  }

  void Search(const std::vector<size_t>& region, const std::vector<size_t>& context,
              size_t depth) {
    const std::vector<std::vector<size_t>> parts = Partition(region);
    const size_t count = parts.size();
    const uint32_t num_masks = 1u << count;

    std::vector<char> passes(num_masks, 0);
    for (uint32_t mask = 1; mask < num_masks; ++mask) {
      std::vector<size_t> keep = context;
      for (size_t j = 0; j < count; ++j) {
        if (mask & (1u << j)) keep.insert(keep.end(), parts[j].begin(), parts[j].end());
      }
      passes[mask] =
          ClassifyMasked(handle_, spectrum_, BinSet(std::move(keep))).label == target_label_;
    }

    for (uint32_t mask = 1; mask < num_masks; ++mask) {
      if (!passes[mask] || !IsMinimal(passes, mask)) continue;
      size_t support = context.size();
      for (size_t j = 0; j < count; ++j) {
        if (mask & (1u << j)) support += parts[j].size();
      }
      for (size_t j = 0; j < count; ++j) {
        if (!(mask & (1u << j))) continue;
        if (depth < config_.max_depth && parts[j].size() > 1) {
          std::vector<size_t> sub_context = context;
          for (size_t other = 0; other < count; ++other) {
            if (other != j && (mask & (1u << other))) {
              sub_context.insert(sub_context.end(), parts[other].begin(), parts[other].end());
            }
          }
          Search(parts[j], sub_context, depth + 1);
        } else {
          const double credit = 1.0 / static_cast<double>(support);
          for (size_t bin : parts[j]) scores_[bin] += credit;
        }
      }
    }
  }

  // No nonempty strict submask passes.
  static bool IsMinimal(const std::vector<char>& passes, uint32_t mask) {
    for (uint32_t sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) {
      if (passes[sub]) return false;
    }
    return true;
  }

  const Spectrum& spectrum_;
  ClassifierHandle& handle_;
  const PartitionConfig& config_;
  const std::string& target_label_;
  std::mt19937_64 rng_;
  std::vector<double> scores_;
};

double Mass(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

}  // namespace

void Validate(const PartitionConfig& config) {
  if (config.parts < 2) throw InvalidArgument("partition count must be at least 2");
  // 2^p - 1 queries per level; keep the mask arithmetic in 32 bits.
  if (config.parts > 16) throw InvalidArgument("partition count above 16");
  if (config.iterations < 1) throw InvalidArgument("need at least one iteration");
  if (!(config.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

size_t ResponsibilityMap::NonzeroCount() const {
  return static_cast<size_t>(
      std::count_if(scores.begin(), scores.end(), [](double s) { return s > 0.0; }));
}

uint64_t IterationSeed(uint64_t seed, uint64_t iteration) {
  return SplitMix64(SplitMix64(seed) ^ (iteration * 0xD1B54A32D192ED03ull));
}

ResponsibilityMap CalculateResponsibility(const Spectrum& spectrum, ClassifierHandle& handle,
                                          const PartitionConfig& config,
                                          const Classification& target) {
  Validate(config);
  if (spectrum.size() == 0) throw InvalidArgument("empty spectrum");
  const uint64_t before = handle.query_count();
  PassSearch search(spectrum, handle, config, target.label);
  ResponsibilityMap map;
  try {
    search.Run();
  } catch (const BudgetExhausted&) {
    map.complete = false;
  }
  map.scores = std::move(search.scores());
  map.iterations_run = 1;
  map.queries = handle.query_count() - before;
  return map;
}

ResponsibilityMap Accumulate(ClassifierHandle& handle, const Spectrum& spectrum,
                             const PartitionConfig& config, const Classification& target) {
  Validate(config);
  const uint64_t before = handle.query_count();
  ResponsibilityMap total;
  total.scores.assign(spectrum.size(), 0.0);
  for (size_t i = 0; i < config.iterations; ++i) {
    PartitionConfig pass_config = config;
    pass_config.seed = IterationSeed(config.seed, i);
    const ResponsibilityMap pass = CalculateResponsibility(spectrum, handle, pass_config, target);

    double distance = std::numeric_limits<double>::infinity();
    if (Mass(total.scores) > 0.0 && Mass(pass.scores) > 0.0) {
      distance = EarthMoversDistance(pass.scores, total.scores);
    }
    total.emd_trace.push_back(distance);
    for (size_t k = 0; k < total.scores.size(); ++k) total.scores[k] += pass.scores[k];
    total.iterations_run = i + 1;
    if (!pass.complete) {
      total.complete = false;
      break;
    }
    if (distance <= config.epsilon) break;
  }
  total.queries = handle.query_count() - before;
  return total;
}

ResponsibilityMap Accumulate(ClassifierHandle& handle, const Spectrum& spectrum,
                             const PartitionConfig& config) {
  const Classification target = ClassifySpectrum(handle, spectrum);
  ResponsibilityMap map = Accumulate(handle, spectrum, config, target);
  map.queries += 1;
  return map;
}

}  // namespace freqcause

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

#include "test_support.h"

#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace freqcause::testing {

TempDir::TempDir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "freqcause-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw IoError("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

TimeSignal RandomSignal(size_t n, uint32_t sample_rate, uint64_t seed, float amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-amplitude, amplitude);
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.resize(n);
  for (float& x : s.samples) x = dist(rng);
  return s;
}

TimeSignal Tone(size_t n, uint32_t sample_rate, double frequency_hz, float amplitude) {
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.resize(n);
  for (size_t t = 0; t < n; ++t) {
    s.samples[t] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * frequency_hz * t / sample_rate));
  }
  return s;
}

TimeSignal Silence(size_t n, uint32_t sample_rate) {
  TimeSignal s;
  s.sample_rate = sample_rate;
  s.samples.assign(n, 0.0f);
  return s;
}

std::string ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ClassifierHandle ThresholdClassifier(const Spectrum& reference, std::vector<size_t> members,
                                     size_t needed) {
  std::vector<double> magnitude(reference.size());
  for (size_t k = 0; k < reference.size(); ++k) magnitude[k] = std::abs(reference.bins[k]);
  auto fn = [magnitude, members, needed](const TimeSignal& signal) {
    const Spectrum s = Forward(signal);
    size_t present = 0;
    for (size_t k : members) {
      if (std::abs(s.bins[k]) >= 0.5 * magnitude[k]) ++present;
    }
    return Classification{present >= needed ? "target" : "other", 0.9, std::nullopt};
  };
  return ClassifierHandle(std::make_unique<FunctionModel>(fn));
}

ToyInstance MakeToyInstance(uint64_t seed, size_t num_bins) {
  if (num_bins < 2) throw InvalidArgument("toy instances need two bins");
  std::mt19937_64 rng(seed);
  ToyInstance toy;
  // n = 2 * (num_bins - 1) samples give num_bins one-sided bins.
  toy.spectrum = Forward(RandomSignal(2 * (num_bins - 1), 8000, rng()));

  std::vector<size_t> bins(num_bins);
  for (size_t k = 0; k < num_bins; ++k) bins[k] = k;
  std::shuffle(bins.begin(), bins.end(), rng);
  const size_t m = 1 + rng() % std::min<size_t>(5, num_bins);
  toy.members.assign(bins.begin(), bins.begin() + m);
  std::sort(toy.members.begin(), toy.members.end());
  switch (seed % 3) {
    case 0:
      toy.family = "and";
      toy.needed = m;
      break;
    case 1:
      toy.family = "or";
      toy.needed = 1;
      break;
    default:
      toy.family = "k-of-m";
      toy.needed = 1 + rng() % m;
      break;
  }
  return toy;
}

SubsetOracle BruteForceSubsets(const Spectrum& spectrum, ClassifierHandle& handle,
                               const std::string& target_label) {
  const size_t n = spectrum.size();
  if (n > 20) throw InvalidArgument("too many bins for brute force");
  const uint32_t count = 1u << n;
  auto members = [n](uint32_t mask) {
    std::vector<size_t> out;
    for (size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) out.push_back(k);
    }
    return out;
  };

  std::vector<char> sufficient(count, 0);
  for (uint32_t mask = 0; mask < count; ++mask) {
    sufficient[mask] =
        ClassifyMasked(handle, spectrum, BinSet(members(mask))).label == target_label;
  }
  // any[mask]: mask or one of its subsets is sufficient.
  std::vector<char> any(sufficient);
  for (size_t k = 0; k < n; ++k) {
    for (uint32_t mask = 0; mask < count; ++mask) {
      if (mask & (1u << k)) any[mask] = any[mask] || any[mask ^ (1u << k)];
    }
  }
  SubsetOracle oracle;
  oracle.responsibility.assign(n, 0.0);
  for (uint32_t mask = 0; mask < count; ++mask) {
    if (!sufficient[mask]) continue;
    bool minimal = true;
    for (size_t k = 0; k < n && minimal; ++k) {
      if ((mask & (1u << k)) && any[mask ^ (1u << k)]) minimal = false;
    }
    if (!minimal) continue;
    const std::vector<size_t> bins = members(mask);
    for (size_t k : bins) {
      oracle.responsibility[k] =
          std::max(oracle.responsibility[k], 1.0 / static_cast<double>(bins.size()));
    }
    oracle.minimal_sufficient.emplace_back(bins);
  }
  return oracle;
}

double TransportCost(std::span<const double> a, std::span<const double> b) {
  const size_t n = a.size();
  double mass_a = 0.0, mass_b = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mass_a += a[i];
    mass_b += b[i];
  }

  // Nodes: source, n suppliers, n consumers, sink.
  struct Edge {
    size_t to;
    double capacity;
    double cost;
  };
  const size_t source = 0, sink = 2 * n + 1, nodes = 2 * n + 2;
  std::vector<Edge> edges;
  std::vector<std::vector<size_t>> out(nodes);
  auto add = [&](size_t from, size_t to, double capacity, double cost) {
    out[from].push_back(edges.size());
    edges.push_back({to, capacity, cost});
    out[to].push_back(edges.size());
    edges.push_back({from, 0.0, -cost});
  };
  const double unbounded = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    add(source, 1 + i, a[i] / mass_a, 0.0);
    add(1 + n + i, sink, b[i] / mass_b, 0.0);
    for (size_t j = 0; j < n; ++j) {
      add(1 + i, 1 + n + j, unbounded, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    }
  }

  constexpr double kResidual = 1e-15;
  double total = 0.0;
  for (;;) {
    // Bellman-Ford: residual costs can be negative.
    std::vector<double> dist(nodes, unbounded);
    std::vector<size_t> via(nodes, SIZE_MAX);
    dist[source] = 0.0;
    for (size_t round = 0; round + 1 < nodes; ++round) {
      bool changed = false;
      for (size_t u = 0; u < nodes; ++u) {
        if (dist[u] == unbounded) continue;
        for (size_t e : out[u]) {
          if (edges[e].capacity <= kResidual) continue;
          const double d = dist[u] + edges[e].cost;
          if (d < dist[edges[e].to] - 1e-12) {
            dist[edges[e].to] = d;
            via[edges[e].to] = e;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    if (dist[sink] == unbounded) break;
    double push = unbounded;
    for (size_t v = sink; v != source; v = edges[via[v] ^ 1].to) {
      push = std::min(push, edges[via[v]].capacity);
    }
    for (size_t v = sink; v != source; v = edges[via[v] ^ 1].to) {
      edges[via[v]].capacity -= push;
      edges[via[v] ^ 1].capacity += push;
    }
    total += push * dist[sink];
  }
  return total;
}

std::string StubCommand(const std::string& args) {
  std::string command = std::string("cmd:") + FREQCAUSE_STUB_BRIDGE;
  if (!args.empty()) command += " " + args;
  return command;
}

}  // namespace freqcause::testing

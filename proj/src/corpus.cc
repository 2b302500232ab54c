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

#include "freqcause/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "freqcause/responsibility.h"
#include "freqcause/serialize.h"

namespace freqcause {

namespace {

// Library distributions are implementation defined; these are not.
class Generator {
 public:
  explicit Generator(uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  size_t Below(size_t n) { return static_cast<size_t>(engine_() % n); }

  double Gaussian() {
    double u = Uniform();
    while (u == 0.0) u = Uniform();
    const double v = Uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 engine_;
};

std::string ClipName(const std::string& label, size_t index) {
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "_%03zu.wav", index);
  return label + buffer;
}

uint64_t LabelHash(const std::string& label) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

}  // namespace

void Validate(const CorpusConfig& c) {
  if (c.sample_rate == 0) throw InvalidArgument("sample rate must be positive");
  if (c.clips_per_class == 0) throw InvalidArgument("need at least one clip per class");
  if (c.min_seconds == 0 || c.min_seconds > c.max_seconds) {
    throw InvalidArgument("invalid clip length range");
  }
  if (c.max_tones == 0) throw InvalidArgument("need at least one tone");
  if (!(c.min_tone_fraction > 0.0 && c.min_tone_fraction <= c.max_tone_fraction &&
        c.max_tone_fraction < 1.0)) {
    throw InvalidArgument("tone fractions must satisfy 0 < min <= max < 1");
  }
  if (!(c.peak > 0.0f && c.peak <= 1.0f)) throw InvalidArgument("peak must be in (0, 1]");
}

std::vector<uint32_t> ToneRange(const BuiltinWeights& weights, const std::string& label) {
  const auto it = weights.owned_bands.find(label);
  if (it == weights.owned_bands.end()) throw InvalidArgument("label owns no band: " + label);
  const double low = weights.band_edges_hz[it->second];
  const double high = weights.band_edges_hz[it->second + 1];
  std::vector<uint32_t> range;
  for (auto f = static_cast<uint32_t>(std::floor(low)) + 1; f + 1 < high; ++f) {
    if (f - low >= 1.0) range.push_back(f);
  }
  return range;
}

TimeSignal SynthesizeClip(const CorpusConfig& config, const BuiltinWeights& weights,
                          const std::string& label, size_t index, CorpusClip* info) {
  Validate(config);
  Generator rng(IterationSeed(config.seed ^ LabelHash(label), index));
  const std::vector<uint32_t> range = ToneRange(weights, label);
  const size_t num_tones = std::min(1 + index % config.max_tones, range.size());
  const size_t seconds = config.min_seconds + rng.Below(config.max_seconds - config.min_seconds + 1);
  const size_t n = seconds * config.sample_rate;

  std::vector<uint32_t> tones;
  while (tones.size() < num_tones) {
    const uint32_t f = range[rng.Below(range.size())];
    if (std::find(tones.begin(), tones.end(), f) == tones.end()) tones.push_back(f);
  }
  std::sort(tones.begin(), tones.end());
  const double fraction = config.min_tone_fraction +
                          (config.max_tone_fraction - config.min_tone_fraction) * rng.Uniform();

  // Unit total tone power split evenly; noise variance set from the fraction.
  std::vector<double> x(n, 0.0);
  const double amplitude = std::sqrt(2.0 / static_cast<double>(num_tones));
  for (uint32_t f : tones) {
    const double phase = 2.0 * std::numbers::pi * rng.Uniform();
    const double w = 2.0 * std::numbers::pi * f / config.sample_rate;
    for (size_t t = 0; t < n; ++t) x[t] += amplitude * std::cos(w * static_cast<double>(t) + phase);
  }
  const double sigma = std::sqrt((1.0 - fraction) / fraction);
  for (double& v : x) v += sigma * rng.Gaussian();

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  TimeSignal signal;
  signal.sample_rate = config.sample_rate;
  signal.samples.resize(n);
  for (size_t t = 0; t < n; ++t) signal.samples[t] = static_cast<float>(x[t] * config.peak / peak);

  if (info) {
    info->file = ClipName(label, index);
    info->label = label;
    info->tone_hz = tones;
    info->tone_fraction = fraction;
    info->num_samples = n;
  }
  return signal;
}

CorpusManifest GenerateCorpus(const CorpusConfig& config, const std::string& out_dir) {
  Validate(config);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  const std::filesystem::path root(out_dir);

  const BuiltinWeights& weights = DefaultBuiltinWeights();
  SaveWeights(weights, (root / "weights.json").string());
  ClassifierHandle classifier(std::make_unique<BuiltinModel>(weights));

  CorpusManifest manifest;
  manifest.config = config;
  size_t correct = 0;
  for (const auto& [label, band] : weights.owned_bands) {
    for (size_t i = 0; i < config.clips_per_class; ++i) {
      CorpusClip clip;
      const TimeSignal signal = SynthesizeClip(config, weights, label, i, &clip);
      const std::string path = (root / clip.file).string();
      SaveWav(signal, path, config.encoding);
      clip.predicted = classifier.Classify(LoadWav(path)).label;
      if (clip.predicted == label) ++correct;
      manifest.clips.push_back(std::move(clip));
    }
  }
  manifest.accuracy = static_cast<double>(correct) / static_cast<double>(manifest.clips.size());

  Json clips = Json::array();
  for (const CorpusClip& c : manifest.clips) {
    clips.push_back({{"file", c.file},
                     {"label", c.label},
                     {"tone_hz", c.tone_hz},
                     {"tone_fraction", c.tone_fraction},
                     {"num_samples", c.num_samples},
                     {"predicted", c.predicted}});
  }
  Json bands = Json::object();
  for (const auto& [label, band] : weights.owned_bands) {
    bands[label] = {weights.band_edges_hz[band], weights.band_edges_hz[band + 1]};
  }
  const Json j = {{"format", "freqcause-corpus"},
                  {"version", 1},
                  {"seed", config.seed},
                  {"sample_rate", config.sample_rate},
                  {"clips_per_class", config.clips_per_class},
                  {"seconds", {config.min_seconds, config.max_seconds}},
                  {"max_tones", config.max_tones},
                  {"tone_fraction", {config.min_tone_fraction, config.max_tone_fraction}},
                  {"encoding", std::string(ToString(config.encoding))},
                  {"owned_bands_hz", bands},
                  {"accuracy", manifest.accuracy},
                  {"clips", clips}};
  WriteTextFile((root / "manifest.json").string(), DumpJson(j));
  spdlog::info("generated {} clips in {}, builtin accuracy {:.3f}", manifest.clips.size(),
               out_dir, manifest.accuracy);
  if (manifest.accuracy < config.min_accuracy) {
    throw Error("builtin classifier accuracy " + std::to_string(manifest.accuracy) +
                " on the generated corpus is below " + std::to_string(config.min_accuracy));
  }
  return manifest;
}

}  // namespace freqcause

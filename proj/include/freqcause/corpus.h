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

// Synthetic labeled corpus for the builtin classifier. Every clip of a class
// is a sum of one to `max_tones` sinusoids at integer frequencies inside the
// band the class owns, over a white Gaussian noise floor. Clip lengths are
// whole seconds, so every tone sits exactly on a DFT bin.

#ifndef FREQCAUSE_CORPUS_H_
#define FREQCAUSE_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "freqcause/builtin_classifier.h"
#include "freqcause/signal.h"
#include "freqcause/wav.h"

namespace freqcause {

struct CorpusConfig {
  uint64_t seed = 0;
  uint32_t sample_rate = 8000;
  size_t clips_per_class = 25;
  size_t min_seconds = 2;
  size_t max_seconds = 3;
  // Clip i of a class has 1 + i % max_tones tones.
  size_t max_tones = 3;
  // Share of the clip's power carried by the tones.
  double min_tone_fraction = 0.55;
  double max_tone_fraction = 0.95;
  float peak = 0.5f;
  WavEncoding encoding = WavEncoding::kFloat32;
  double min_accuracy = 0.95;
};

void Validate(const CorpusConfig& config);

struct CorpusClip {
  std::string file;
  std::string label;
  std::vector<uint32_t> tone_hz;
  double tone_fraction = 0.0;
  size_t num_samples = 0;
  std::string predicted;
};

struct CorpusManifest {
  CorpusConfig config;
  std::vector<CorpusClip> clips;
  double accuracy = 0.0;
};

// Integer frequencies a tone of `label` may use: strictly inside the owned
// band, at least 1 Hz from either edge.
std::vector<uint32_t> ToneRange(const BuiltinWeights& weights, const std::string& label);

// Deterministic clip synthesis. `index` selects the tone count and seeds the
// clip's own generator together with `config.seed`.
TimeSignal SynthesizeClip(const CorpusConfig& config, const BuiltinWeights& weights,
                          const std::string& label, size_t index, CorpusClip* info = nullptr);

// Writes <label>_<index>.wav for every class, weights.json and
// manifest.json into `out_dir`, then classifies every written file with the
// builtin model. Throws IoError if the directory is unwritable and Error if
// the accuracy falls below config.min_accuracy.
CorpusManifest GenerateCorpus(const CorpusConfig& config, const std::string& out_dir);

}  // namespace freqcause

#endif  // FREQCAUSE_CORPUS_H_

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

// Deterministic reference classifier: a linear softmax over hand-coded
// spectral features. The features are
//
//   f_b       = ln(E_b / E_total + log_floor)   for each of 16 bands
//   centroid  = spectral centroid / frequency_scale_hz
//   rolloff   = rolloff frequency / frequency_scale_hz
//
// where E_b is the power in band b. All features are invariant to scaling
// the signal amplitude. Each synthetic class owns one band; a "background"
// class wins when no owned band stands out from a white noise floor.

#ifndef FREQCAUSE_BUILTIN_CLASSIFIER_H_
#define FREQCAUSE_BUILTIN_CLASSIFIER_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "freqcause/classifier.h"

namespace freqcause {

struct BuiltinWeights {
  int version = 0;
  std::vector<std::string> labels;
  // num_bands + 1 increasing edges in Hz.
  std::vector<double> band_edges_hz;
  // Metadata for the corpus generator: the band index each class owns.
  std::map<std::string, int> owned_bands;
  // labels.size() rows of (num_bands + 2) feature weights.
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  double rolloff_fraction = 0.85;
  double frequency_scale_hz = 4000.0;
  double log_floor = 1e-12;

  size_t num_bands() const { return band_edges_hz.empty() ? 0 : band_edges_hz.size() - 1; }
  size_t num_features() const { return num_bands() + 2; }
};

inline constexpr int kBuiltinWeightsVersion = 1;
inline constexpr char kBackgroundLabel[] = "background";

// The weights compiled into the library; identical to
// data/builtin_weights_v1.json.
const BuiltinWeights& DefaultBuiltinWeights();

// Throws InvalidArgument describing the first inconsistency.
void Validate(const BuiltinWeights& weights);

std::string WeightsToJson(const BuiltinWeights& weights);
// Throws IoError / InvalidArgument for unreadable or corrupted files.
BuiltinWeights LoadWeights(const std::string& path);
void SaveWeights(const BuiltinWeights& weights, const std::string& path);

std::vector<double> ExtractFeatures(const BuiltinWeights& weights,
                                    const Spectrum& spectrum);

class BuiltinModel : public Model {
 public:
  explicit BuiltinModel(BuiltinWeights weights);
  Classification Predict(const TimeSignal& signal) override;
  ClassifierKind kind() const override { return ClassifierKind::kBuiltin; }
  std::unique_ptr<Model> Clone() const override {
    return std::make_unique<BuiltinModel>(weights_);
  }
  std::vector<std::string> labels() const override { return weights_.labels; }
  const BuiltinWeights& weights() const { return weights_; }

 private:
  BuiltinWeights weights_;
};

ClassifierHandle BuiltinReferenceClassifier();
ClassifierHandle BuiltinReferenceClassifier(const std::string& weights_path);

}  // namespace freqcause

#endif  // FREQCAUSE_BUILTIN_CLASSIFIER_H_

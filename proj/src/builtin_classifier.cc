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

#include "freqcause/builtin_classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace freqcause {

namespace {

using nlohmann::json;

constexpr int kNumBands = 16;
constexpr double kLowestEdgeHz = 31.25;
// 16 geometric bands spanning 7 octaves: 31.25 Hz .. 4 kHz.
constexpr double kOctavesSpanned = 7.0;
// Owned-band excess is measured in units of ln-ratio and scaled by this gain.
constexpr double kBandGain = 2.0;
constexpr double kBackgroundBias = 1.0;

BuiltinWeights MakeDefaultWeights() {
  BuiltinWeights w;
  w.version = kBuiltinWeightsVersion;
  w.labels = {"background", "classA", "classB", "classC", "classD"};
  for (int i = 0; i <= kNumBands; ++i) {
    w.band_edges_hz.push_back(kLowestEdgeHz *
                              std::exp2(kOctavesSpanned * i / kNumBands));
  }
  w.owned_bands = {{"classA", 5}, {"classB", 8}, {"classC", 11}, {"classD", 14}};
  const std::map<std::string, double> centroid_weight = {
      {"classA", -0.2}, {"classB", -0.1}, {"classC", 0.1}, {"classD", 0.2}};

  for (const std::string& label : w.labels) {
    std::vector<double> row(w.num_features(), 0.0);
    double bias = kBackgroundBias;
    if (auto it = w.owned_bands.find(label); it != w.owned_bands.end()) {
      const int band = it->second;
      const double width = w.band_edges_hz[band + 1] - w.band_edges_hz[band];
      row[band] = kBandGain;
      row[kNumBands] = centroid_weight.at(label);
      row[kNumBands + 1] = 0.5 * centroid_weight.at(label);
      // Zero logit for a white noise floor, whose expected band share is
      // width / frequency_scale_hz.
      bias = -kBandGain * std::log(width / w.frequency_scale_hz);
    }
    w.weights.push_back(std::move(row));
    w.bias.push_back(bias);
  }
  return w;
}

}  // namespace

const BuiltinWeights& DefaultBuiltinWeights() {
  static const BuiltinWeights* weights = new BuiltinWeights(MakeDefaultWeights());
  return *weights;
}

void Validate(const BuiltinWeights& w) {
  if (w.version != kBuiltinWeightsVersion) {
    throw InvalidArgument("unsupported weights version " + std::to_string(w.version));
  }
  if (w.labels.size() < 2) throw InvalidArgument("weights need at least two labels");
  if (w.band_edges_hz.size() < 2) throw InvalidArgument("weights need band edges");
  for (size_t i = 0; i + 1 < w.band_edges_hz.size(); ++i) {
    if (!(w.band_edges_hz[i] < w.band_edges_hz[i + 1])) {
      throw InvalidArgument("band edges must be strictly increasing");
    }
  }
  if (w.weights.size() != w.labels.size() || w.bias.size() != w.labels.size()) {
    throw InvalidArgument("weights/bias rows do not match label count");
  }
  for (const auto& row : w.weights) {
    if (row.size() != w.num_features()) {
      throw InvalidArgument("weight row has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(w.num_features()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidArgument("non-finite weight");
    }
  }
  for (double v : w.bias) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite bias");
  }
  if (!(w.rolloff_fraction > 0.0 && w.rolloff_fraction <= 1.0) ||
      !(w.frequency_scale_hz > 0.0) || !(w.log_floor > 0.0)) {
    throw InvalidArgument("invalid feature constants");
  }
  for (const auto& [label, band] : w.owned_bands) {
    if (std::find(w.labels.begin(), w.labels.end(), label) == w.labels.end() ||
        band < 0 || static_cast<size_t>(band) >= w.num_bands()) {
      throw InvalidArgument("invalid owned band for '" + label + "'");
    }
  }
}

std::string WeightsToJson(const BuiltinWeights& w) {
  json j;
  j["format"] = "freqcause-builtin-weights";
  j["version"] = w.version;
  j["labels"] = w.labels;
  j["band_edges_hz"] = w.band_edges_hz;
  j["owned_bands"] = w.owned_bands;
  j["weights"] = w.weights;
  j["bias"] = w.bias;
  j["rolloff_fraction"] = w.rolloff_fraction;
  j["frequency_scale_hz"] = w.frequency_scale_hz;
  j["log_floor"] = w.log_floor;
  return j.dump(2) + "\n";
}

BuiltinWeights LoadWeights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open weights file " + path);
  BuiltinWeights w;
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != "freqcause-builtin-weights") {
      throw InvalidArgument("not a builtin weights file");
    }
    w.version = j.at("version").get<int>();
    w.labels = j.at("labels").get<std::vector<std::string>>();
    w.band_edges_hz = j.at("band_edges_hz").get<std::vector<double>>();
    w.owned_bands = j.at("owned_bands").get<std::map<std::string, int>>();
    w.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    w.bias = j.at("bias").get<std::vector<double>>();
    w.rolloff_fraction = j.at("rolloff_fraction").get<double>();
    w.frequency_scale_hz = j.at("frequency_scale_hz").get<double>();
    w.log_floor = j.at("log_floor").get<double>();
  } catch (const json::exception& e) {
    throw InvalidArgument("corrupted weights file " + path + ": " + e.what());
  }
  Validate(w);
  return w;
}

void SaveWeights(const BuiltinWeights& weights, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << WeightsToJson(weights);
}

std::vector<double> ExtractFeatures(const BuiltinWeights& w, const Spectrum& spectrum) {
  const size_t num_bands = w.num_bands();
  std::vector<double> band_energy(num_bands, 0.0);
  std::vector<double> power(spectrum.size());
  double total = 0.0;
  double weighted_frequency = 0.0;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    power[k] = std::norm(spectrum.bins[k]);
    total += power[k];
    const double f = spectrum.FrequencyOf(k);
    weighted_frequency += f * power[k];
    auto edge = std::upper_bound(w.band_edges_hz.begin(), w.band_edges_hz.end(), f);
    if (edge != w.band_edges_hz.begin() && edge != w.band_edges_hz.end()) {
      band_energy[static_cast<size_t>(edge - w.band_edges_hz.begin()) - 1] += power[k];
    }
  }

  std::vector<double> features(w.num_features(), 0.0);
  for (size_t b = 0; b < num_bands; ++b) {
    const double share = total > 0.0 ? band_energy[b] / total : 0.0;
    features[b] = std::log(share + w.log_floor);
  }
  if (total > 0.0) {
    features[num_bands] = weighted_frequency / total / w.frequency_scale_hz;
    const double target = w.rolloff_fraction * total;
    double cumulative = 0.0;
    for (size_t k = 0; k < spectrum.size(); ++k) {
      cumulative += power[k];
      if (cumulative >= target) {
        features[num_bands + 1] = spectrum.FrequencyOf(k) / w.frequency_scale_hz;
        break;
      }
    }
  }
  return features;
}

BuiltinModel::BuiltinModel(BuiltinWeights weights) : weights_(std::move(weights)) {
  Validate(weights_);
}

Classification BuiltinModel::Predict(const TimeSignal& signal) {
  const std::vector<double> features = ExtractFeatures(weights_, Forward(signal));
  const size_t num_labels = weights_.labels.size();
  std::vector<double> logits(num_labels);
  for (size_t c = 0; c < num_labels; ++c) {
    double z = weights_.bias[c];
    for (size_t i = 0; i < features.size(); ++i) z += weights_.weights[c][i] * features[i];
    logits[c] = z;
  }
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  double norm = 0.0;
  for (double& z : logits) {
    z = std::exp(z - max_logit);
    norm += z;
  }
  std::map<std::string, double> scores;
  for (size_t c = 0; c < num_labels; ++c) scores[weights_.labels[c]] = logits[c] / norm;
  return FromScores(std::move(scores));
}

ClassifierHandle BuiltinReferenceClassifier() {
  return ClassifierHandle(std::make_unique<BuiltinModel>(DefaultBuiltinWeights()));
}

ClassifierHandle BuiltinReferenceClassifier(const std::string& weights_path) {
  return ClassifierHandle(std::make_unique<BuiltinModel>(LoadWeights(weights_path)));
}

}  // namespace freqcause

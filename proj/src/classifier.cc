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

#include "freqcause/classifier.h"

#include <cmath>
#include <utility>

namespace freqcause {

Classification FromScores(std::map<std::string, double> scores) {
  if (scores.empty()) throw InvalidArgument("empty score map");
  auto best = scores.begin();
  // std::map iterates in ascending label order, so keeping the first
  // strictly larger score implements the lexicographic tie-break.
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  Classification out;
  out.label = best->first;
  out.score = best->second;
  out.full_scores = std::move(scores);
  return out;
}

void Validate(const Classification& classification) {
  if (!std::isfinite(classification.score) || classification.score < 0.0 ||
      classification.score > 1.0) {
    throw InvalidArgument("classification score out of [0, 1]: " +
                          std::to_string(classification.score));
  }
  if (classification.full_scores) {
    for (const auto& [label, score] : *classification.full_scores) {
      if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        throw InvalidArgument("score for '" + label + "' out of [0, 1]");
      }
    }
    if (FromScores(*classification.full_scores).label != classification.label) {
      throw InvalidArgument("label '" + classification.label +
                            "' is not the argmax of the full scores");
    }
  }
}

std::string_view ToString(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kBuiltin:
      return "builtin";
    case ClassifierKind::kBridge:
      return "bridge";
    case ClassifierKind::kCustom:
      return "custom";
  }
  return "unknown";
}

ClassifierHandle::ClassifierHandle(std::unique_ptr<Model> model,
                                   std::optional<uint64_t> budget)
    : model_(std::move(model)), budget_(budget) {
  if (!model_) throw InvalidArgument("null model");
}

Classification ClassifierHandle::Classify(const TimeSignal& signal) {
  if (exhausted()) {
    throw BudgetExhausted("classifier query budget of " +
                          std::to_string(*budget_) + " exhausted");
  }
  Validate(signal);
  ++query_count_;
  Classification result = model_->Predict(signal);
  Validate(result);
  return result;
}

ClassifierHandle ClassifierHandle::Clone() const {
  return ClassifierHandle(model_->Clone(), budget_);
}

Classification ClassifySpectrum(ClassifierHandle& handle, const Spectrum& spectrum) {
  return handle.Classify(Inverse(spectrum));
}

Classification ClassifyMasked(ClassifierHandle& handle, const Spectrum& spectrum,
                              const BinSet& keep) {
  return handle.Classify(Inverse(Mask(spectrum, keep)));
}

}  // namespace freqcause

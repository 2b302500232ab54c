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

// Black-box classifier access. Every algorithm in the library talks to a
// model only through a ClassifierHandle, which validates outputs and counts
// queries against an optional budget.

#ifndef FREQCAUSE_CLASSIFIER_H_
#define FREQCAUSE_CLASSIFIER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freqcause/signal.h"

namespace freqcause {

struct Classification {
  std::string label;
  double score = 0.0;
  std::optional<std::map<std::string, double>> full_scores;

  friend bool operator==(const Classification&, const Classification&) = default;
};

// Top-1 of a score map. Ties go to the lexicographically smallest label.
Classification FromScores(std::map<std::string, double> scores);

// Throws InvalidArgument unless score is finite and within [0, 1] and, when
// full scores are present, label is their argmax.
void Validate(const Classification& classification);

enum class ClassifierKind { kBuiltin, kBridge, kCustom };

std::string_view ToString(ClassifierKind kind);

class Model {
 public:
  virtual ~Model() = default;
  virtual Classification Predict(const TimeSignal& signal) = 0;
  virtual ClassifierKind kind() const = 0;
  // A fresh, independent instance with identical behavior.
  virtual std::unique_ptr<Model> Clone() const = 0;
  virtual std::vector<std::string> labels() const { return {}; }
};

// Wraps a callable. Used for toy classifiers in tests and experiments.
class FunctionModel : public Model {
 public:
  using Function = std::function<Classification(const TimeSignal&)>;
  explicit FunctionModel(Function fn) : fn_(std::move(fn)) {}
  Classification Predict(const TimeSignal& signal) override { return fn_(signal); }
  ClassifierKind kind() const override { return ClassifierKind::kCustom; }
  std::unique_ptr<Model> Clone() const override {
    return std::make_unique<FunctionModel>(fn_);
  }

 private:
  Function fn_;
};

// Single-consumer. Not thread safe; use Clone() for one handle per worker.
class ClassifierHandle {
 public:
  explicit ClassifierHandle(std::unique_ptr<Model> model,
                            std::optional<uint64_t> budget = std::nullopt);

  ClassifierHandle(ClassifierHandle&&) noexcept = default;
  ClassifierHandle& operator=(ClassifierHandle&&) noexcept = default;

  // Throws BudgetExhausted before querying if the budget is spent.
  Classification Classify(const TimeSignal& signal);

  uint64_t query_count() const { return query_count_; }
  std::optional<uint64_t> budget() const { return budget_; }
  void set_budget(std::optional<uint64_t> budget) { budget_ = budget; }
  bool exhausted() const { return budget_ && query_count_ >= *budget_; }
  ClassifierKind kind() const { return model_->kind(); }
  std::vector<std::string> labels() const { return model_->labels(); }

  // Same model configuration and budget, query counter reset to zero.
  ClassifierHandle Clone() const;

 private:
  std::unique_ptr<Model> model_;
  std::optional<uint64_t> budget_;
  uint64_t query_count_ = 0;
};

// classify(inverse(spectrum)).
Classification ClassifySpectrum(ClassifierHandle& handle, const Spectrum& spectrum);

// classify(inverse(mask(spectrum, keep))).
Classification ClassifyMasked(ClassifierHandle& handle, const Spectrum& spectrum,
                              const BinSet& keep);

}  // namespace freqcause

#endif  // FREQCAUSE_CLASSIFIER_H_

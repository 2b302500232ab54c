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

#include "freqcause/subsets.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace freqcause {

namespace {

bool Sufficient(const Classification& c, const Classification& original, double ratio) {
  return c.label == original.label && c.score >= ratio * original.score;
}

}  // namespace

void Validate(const ExtractionConfig& config) {
  if (config.chain_length < 1) throw InvalidArgument("chain length must be at least 1");
  if (!(config.min_score_ratio > 0.0 && config.min_score_ratio <= 1.0)) {
    throw InvalidArgument("min score ratio must be in (0, 1]");
  }
  if (config.step_bins == 0 && config.tail_steps == 0) {
    throw InvalidArgument("tail_steps must be positive in cell mode");
  }
}

bool ScoresMatch2dp(double a, double b) {
  return std::round(a * 100.0) == std::round(b * 100.0);
}

BinSet GreedyPlan::Prefix(size_t step) const {
  return BinSet(std::vector<size_t>(order.begin(),
                                    order.begin() + static_cast<std::ptrdiff_t>(ends[step])));
}

BinSet GreedyPlan::StepBins(size_t step) const {
  const size_t begin = step == 0 ? 0 : ends[step - 1];
  return BinSet(std::vector<size_t>(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                    order.begin() + static_cast<std::ptrdiff_t>(ends[step])));
}

GreedyPlan PlanSteps(const ResponsibilityMap& map, const ExtractionConfig& config) {
  Validate(config);
  const std::vector<double>& scores = map.scores;
  GreedyPlan plan;
  plan.order.resize(scores.size());
  std::iota(plan.order.begin(), plan.order.end(), size_t{0});
  std::stable_sort(plan.order.begin(), plan.order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  const size_t nonzero = map.NonzeroCount();
  const size_t total = scores.size();

  if (config.step_bins > 0) {
    for (size_t end = config.step_bins; end - config.step_bins < total; end += config.step_bins) {
      plan.ends.push_back(std::min(end, total));
    }
    plan.nonzero_steps = (nonzero + config.step_bins - 1) / config.step_bins;
    return plan;
  }

  for (size_t i = 0; i < nonzero; ++i) {
    const bool last_of_cell =
        i + 1 == nonzero || scores[plan.order[i + 1]] != scores[plan.order[i]];
    if (last_of_cell) plan.ends.push_back(i + 1);
  }
  plan.nonzero_steps = plan.ends.size();
  const size_t tail = total - nonzero;
  if (tail > 0) {
    const size_t chunk = (tail + config.tail_steps - 1) / config.tail_steps;
    for (size_t end = nonzero + chunk; end - chunk < total; end += chunk) {
      plan.ends.push_back(std::min(end, total));
    }
  }
  return plan;
}

SubsetReport Extract(const Spectrum& spectrum, const ResponsibilityMap& map,
                     ClassifierHandle& handle, const ExtractionConfig& config,
                     const Classification& original) {
  Validate(config);
  if (map.scores.size() != spectrum.size()) {
    throw InvalidArgument("responsibility map does not cover the spectrum");
  }
  const uint64_t before = handle.query_count();
  const GreedyPlan plan = PlanSteps(map, config);
  const size_t n = spectrum.size();
  const size_t chain = config.chain_length;

  SubsetReport report;
  report.original = original;
  report.total_bins = n;

  struct StepResult {
    Classification own;
    std::optional<Classification> complement;
    bool necessary = false;
  };
  std::vector<StepResult> steps;
  size_t sufficient_run = 0;
  size_t necessary_run = 0;

  try {
    for (size_t t = 0; t < plan.ends.size(); ++t) {
      if (!report.sufficient) {
        // A sufficient run must start inside the nonzero-responsibility part.
        const bool run_started_in_nonzero =
            sufficient_run > 0 && t - sufficient_run < plan.nonzero_steps;
        if (t >= plan.nonzero_steps && !run_started_in_nonzero) {
          report.diagnostics.push_back(
              "no sufficient set within the " + std::to_string(map.NonzeroCount()) +
              " nonzero-responsibility bins");
          break;
        }
      }

      const BinSet prefix = plan.Prefix(t);
      StepResult step;
      step.own = ClassifyMasked(handle, spectrum, prefix);
      const bool sufficient = Sufficient(step.own, original, config.min_score_ratio);
      if (sufficient) {
        step.complement = ClassifyMasked(handle, spectrum, prefix.Complement(n));
        step.necessary = step.complement->label != original.label;
      }
      steps.push_back(std::move(step));
      report.steps_evaluated = t + 1;

      sufficient_run = sufficient ? sufficient_run + 1 : 0;
      necessary_run = steps[t].necessary ? necessary_run + 1 : 0;
      if (t + 1 < chain) continue;
      const size_t start = t + 1 - chain;

      if (!report.sufficient && sufficient_run == chain) {
        report.sufficient_step = start;
        report.sufficient = plan.Prefix(start);
        report.at_sufficient = steps[start].own;
      }
      if (!report.necessary && necessary_run == chain) {
        report.necessary_step = start;
        report.necessary = plan.Prefix(start);
        report.at_necessary = steps[start].own;
        report.inverse_of_necessary = steps[start].complement;
      }
      if (!report.complete && necessary_run >= chain &&
          ScoresMatch2dp(steps[start].own.score, original.score)) {
        report.complete_step = start;
        report.complete = plan.Prefix(start);
        report.at_complete = steps[start].own;
      }
      if (report.sufficient && report.necessary && report.complete) break;
    }
  } catch (const BudgetExhausted& e) {
    report.diagnostics.push_back(std::string("stopped early: ") + e.what());
  }

  if (report.sufficient && !report.necessary) {
    report.diagnostics.push_back("no necessary set: removing the greedy set never "
                                 "stably changed the label");
  }
  if (report.necessary && !report.complete) {
    report.diagnostics.push_back("no complete set: score never matched the original "
                                 "to 2 decimal places while necessary");
  }
  report.query_count = handle.query_count() - before;
  return report;
}

SubsetReport Extract(const Spectrum& spectrum, const ResponsibilityMap& map,
                     ClassifierHandle& handle, const ExtractionConfig& config) {
  const uint64_t before = handle.query_count();
  const Classification original = ClassifySpectrum(handle, spectrum);
  SubsetReport report = Extract(spectrum, map, handle, config, original);
  report.query_count = handle.query_count() - before;
  return report;
}

Inversion Invert(const Spectrum& spectrum, const BinSet& subset, ClassifierHandle& handle) {
  if (!subset.FitsWithin(spectrum.size())) {
    throw InvalidArgument("subset index out of range");
  }
  Inversion out;
  out.signal = Inverse(Mask(spectrum, subset.Complement(spectrum.size())));
  out.classification = handle.Classify(out.signal);
  return out;
}

Composition Compose(const std::vector<Spectrum>& spectra, ClassifierHandle& handle,
                    const std::string& target_label) {
  if (spectra.empty()) throw InvalidArgument("nothing to compose");
  Spectrum sum = spectra.front();
  for (size_t i = 1; i < spectra.size(); ++i) {
    const Spectrum& s = spectra[i];
    if (s.original_length != sum.original_length || s.sample_rate != sum.sample_rate ||
        s.size() != sum.size()) {
      throw InvalidArgument("cannot compose spectra of different length or sample rate");
    }
    for (size_t k = 0; k < sum.size(); ++k) sum.bins[k] += s.bins[k];
  }
  Composition out;
  out.signal = Inverse(sum);
  float peak = 0.0f;
  for (float x : out.signal.samples) peak = std::max(peak, std::abs(x));
  if (peak > 1.0f) {
    for (float& x : out.signal.samples) x /= peak;
  }
  out.classification = handle.Classify(out.signal);
  out.success = out.classification.label == target_label;
  return out;
}

ReplayResult Replay(const Spectrum& spectrum, const SubsetReport& report,
                    ClassifierHandle& handle, const ExtractionConfig& config) {
  ReplayResult result;
  const size_t n = spectrum.size();
  const Classification& original = report.original;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    result.failures.push_back(why);
  };

  const Classification fresh_original = ClassifySpectrum(handle, spectrum);
  if (fresh_original.label != original.label) {
    fail(result.sufficient_ok, "original classification does not replay");
  }
  if (report.sufficient) {
    const Classification c = ClassifyMasked(handle, spectrum, *report.sufficient);
    if (!Sufficient(c, original, config.min_score_ratio)) {
      fail(result.sufficient_ok, "sufficient set: label/score gate fails (" + c.label + ", " +
                                     std::to_string(c.score) + ")");
    }
  }
  auto check_necessary = [&](const BinSet& set, bool& flag, const char* name) {
    const Classification c = ClassifyMasked(handle, spectrum, set);
    if (!Sufficient(c, original, config.min_score_ratio)) {
      fail(flag, std::string(name) + " set: label/score gate fails");
    }
    const Classification rest = ClassifyMasked(handle, spectrum, set.Complement(n));
    if (rest.label == original.label) {
      fail(flag, std::string(name) + " set: complement keeps the original label");
    }
    return c;
  };
  if (report.necessary) check_necessary(*report.necessary, result.necessary_ok, "necessary");
  if (report.complete) {
    const Classification c = check_necessary(*report.complete, result.complete_ok, "complete");
    if (!ScoresMatch2dp(c.score, original.score)) {
      fail(result.complete_ok, "complete set: score " + std::to_string(c.score) +
                                   " does not match " + std::to_string(original.score) +
                                   " to 2 dp");
    }
  }
  return result;
}

}  // namespace freqcause

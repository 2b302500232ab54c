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

#include "freqcause/attacks.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

namespace freqcause {

namespace {

Complex MutationFactor(double delta, double phase_radians) {
  return phase_radians == 0.0 ? Complex(delta, 0.0) : std::polar(delta, phase_radians);
}

bool IsIdentity(double delta, double phase_radians) {
  return delta == 1.0 && phase_radians == 0.0;
}

bool SameBits(const Complex& a, const Complex& b) {
  return std::memcmp(&a, &b, sizeof(Complex)) == 0;
}

void FillDistances(AttackResult& result, const TimeSignal& source) {
  result.linf_delta = MaxAbsDifference(source.samples, result.altered.samples);
  result.l2_delta = L2Difference(source.samples, result.altered.samples);
}

}  // namespace

void Validate(const AttackConfig& config) {
  if (config.deltas.empty()) throw InvalidArgument("empty mutation list");
  for (double d : config.deltas) {
    if (!std::isfinite(d)) throw InvalidArgument("non-finite mutation");
  }
  if (config.budget == 0) throw InvalidArgument("frequency budget must be positive");
  for (size_t w : config.frame_schedule) {
    if (w == 0 || (w & (w - 1)) != 0) {
      throw InvalidArgument("frame sizes must be powers of two");
    }
  }
}

double PerturbationStrength(double delta) {
  if (delta == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(std::log(std::abs(delta)));
}

std::vector<double> OrderByStrength(const std::vector<double>& deltas) {
  std::vector<double> ordered = deltas;
  std::stable_sort(ordered.begin(), ordered.end(), [](double a, double b) {
    return PerturbationStrength(a) < PerturbationStrength(b);
  });
  return ordered;
}

std::vector<size_t> RankByResponsibility(const BinSet& bins, const ResponsibilityMap& map) {
  std::vector<size_t> ranked(bins.begin(), bins.end());
  for (size_t k : ranked) {
    if (k >= map.scores.size()) throw InvalidArgument("bin outside responsibility map");
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](size_t a, size_t b) { return map.scores[a] > map.scores[b]; });
  return ranked;
}

Spectrum ApplyMutation(const Spectrum& spectrum, std::span<const size_t> bins, double delta,
                       double phase_radians) {
  Spectrum out = spectrum;
  const Complex factor = MutationFactor(delta, phase_radians);
  for (size_t k : bins) {
    if (k >= out.size()) throw InvalidArgument("mutation bin out of range");
    out.bins[k] *= factor;
  }
  return out;
}

AttackResult FourierAttack(const Spectrum& spectrum, const ResponsibilityMap& map,
                           const BinSet& sufficient, ClassifierHandle& handle,
                           const AttackConfig& config, const Classification& before) {
  Validate(config);
  if (sufficient.empty()) throw InvalidArgument("fourier attack needs a sufficient set");
  if (!sufficient.FitsWithin(spectrum.size())) throw InvalidArgument("sufficient set out of range");
  const uint64_t start_queries = handle.query_count();

  AttackResult result;
  result.before = before;
  result.plan.deltas = config.deltas;
  result.plan.budget = config.budget;
  result.ranking = RankByResponsibility(sufficient, map);

  const std::vector<double> ordered = OrderByStrength(config.deltas);
  const double strongest = ordered.back();
  const std::span<const size_t> ranking(result.ranking);

  // An identity mutation leaves the spectrum untouched, so nothing can flip.
  if (IsIdentity(strongest, config.phase_radians)) {
    result.stop_reason = "identity";
    return result;
  }

  const size_t limit = std::min(ranking.size(), config.budget);
  size_t n = 0;
  for (size_t k = 1; k <= limit; ++k) {
    const Classification c =
        ClassifySpectrum(handle, ApplyMutation(spectrum, ranking.first(k), strongest,
                                               config.phase_radians));
    if (c.label != before.label) {
      n = k;
      break;
    }
  }
  result.phase1_queries = handle.query_count() - start_queries;
  if (n == 0) {
    result.stop_reason = ranking.size() > config.budget ? "budget" : "bins";
    result.query_count = result.phase1_queries;
    return result;
  }

  for (double delta : ordered) {
    if (IsIdentity(delta, config.phase_radians)) continue;
    Spectrum mutated = ApplyMutation(spectrum, ranking.first(n), delta, config.phase_radians);
    TimeSignal altered = Inverse(mutated);
    const Classification c = handle.Classify(altered);
    if (c.label == before.label) continue;
    result.success = true;
    result.after = c;
    result.plan.chosen_delta = delta;
    result.plan.n_frequencies = n;
    result.plan.bins_modified = BinSet(std::vector<size_t>(ranking.begin(), ranking.begin() + n));
    result.altered = std::move(altered);
    result.altered_spectrum = std::move(mutated);
    break;
  }
  result.query_count = handle.query_count() - start_queries;
  result.phase2_queries = result.query_count - result.phase1_queries;
  if (!result.success) {
    result.stop_reason = "no-flip";
    return result;
  }
  FillDistances(result, Inverse(spectrum));
  return result;
}

AttackResult FourierAttack(const Spectrum& spectrum, const ResponsibilityMap& map,
                           const BinSet& sufficient, ClassifierHandle& handle,
                           const AttackConfig& config) {
  const uint64_t start = handle.query_count();
  const Classification before = ClassifySpectrum(handle, spectrum);
  AttackResult result = FourierAttack(spectrum, map, sufficient, handle, config, before);
  result.query_count = handle.query_count() - start;
  return result;
}

AttackResult StftAttack(const TimeSignal& signal, const AttackResult& fourier,
                        ClassifierHandle& handle, const AttackConfig& config) {
  Validate(config);
  Validate(signal);
  AttackResult result;
  result.before = fourier.before;
  result.plan = fourier.plan;
  result.ranking = fourier.ranking;
  const uint64_t start_queries = handle.query_count();

  if (!fourier.success && config.require_fourier_success) {
    result.stop_reason = "fourier-failed";
    return result;
  }
  // Without a successful Fourier attack, fall back to its strongest mutation
  // on the full ranking within budget.
  double delta = OrderByStrength(config.deltas).back();
  BinSet bins = fourier.plan.bins_modified;
  if (fourier.success) {
    delta = *fourier.plan.chosen_delta;
  } else {
    const size_t n = std::min(fourier.ranking.size(), config.budget);
    bins = BinSet(std::vector<size_t>(fourier.ranking.begin(), fourier.ranking.begin() + n));
  }
  if (IsIdentity(delta, config.phase_radians) || bins.empty()) {
    result.stop_reason = "identity";
    return result;
  }
  const Complex factor = MutationFactor(delta, config.phase_radians);

  for (size_t frame_size : config.frame_schedule) {
    FrameSizeOutcome outcome;
    outcome.frame_size = frame_size;
    if (frame_size > signal.size()) {
      result.frame_sizes.push_back(outcome);
      continue;
    }
    outcome.attempted = true;
    const Spectrogram source = Stft(signal, frame_size);
    const BinSet mapped = MapBins(bins, signal.size(), source);

    std::vector<double> magnitude(source.num_frames, 0.0);
    for (size_t t = 0; t < source.num_frames; ++t) {
      for (size_t j : mapped) magnitude[t] += std::abs(source.at(t, j));
    }
    std::vector<size_t> frames(source.num_frames);
    std::iota(frames.begin(), frames.end(), size_t{0});
    std::stable_sort(frames.begin(), frames.end(),
                     [&](size_t a, size_t b) { return magnitude[a] > magnitude[b]; });
    const size_t frame_limit = config.max_frames == 0
                                   ? frames.size()
                                   : std::min(frames.size(), config.max_frames);

    Spectrogram mutated = source;
    for (size_t m = 0; m < frame_limit; ++m) {
      for (size_t j : mapped) mutated.at(frames[m], j) *= factor;
      TimeSignal altered = Istft(mutated);
      const Classification c = handle.Classify(altered);
      outcome.frames_tried = m + 1;
      if (c.label == fourier.before.label) continue;
      outcome.success = true;
      result.success = true;
      result.after = c;
      result.altered = std::move(altered);
      result.frames_modified = m + 1;
      result.frame_size_used = frame_size;
      result.stft_bins = mapped;
      break;
    }
    result.frame_sizes.push_back(outcome);
    if (result.success) break;
  }
  result.query_count = handle.query_count() - start_queries;
  if (!result.success) {
    result.stop_reason = "no-flip";
    return result;
  }
  FillDistances(result, signal);
  return result;
}

AttackReplay ReplayFourierAttack(const Spectrum& spectrum, const AttackResult& result,
                                 ClassifierHandle& handle, const AttackConfig& config) {
  AttackReplay replay;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    replay.failures.push_back(why);
  };
  if (!result.success) return replay;
  const MutationPlan& plan = result.plan;
  if (plan.n_frequencies > config.budget || plan.bins_modified.size() > config.budget) {
    fail(replay.budget_ok, "modified more bins than the budget allows");
  }
  if (!result.altered_spectrum || !plan.chosen_delta) {
    fail(replay.locality_ok, "missing altered spectrum");
    return replay;
  }
  const Spectrum& altered = *result.altered_spectrum;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    const bool modified = plan.bins_modified.Contains(k);
    if (!modified && !SameBits(altered.bins[k], spectrum.bins[k])) {
      fail(replay.locality_ok, "bin " + std::to_string(k) + " changed outside the plan");
      break;
    }
  }

  const std::span<const size_t> top(result.ranking.data(), plan.n_frequencies);
  if (BinSet(std::vector<size_t>(top.begin(), top.end())) != plan.bins_modified) {
    fail(replay.locality_ok, "modified bins are not the top of the ranking");
  }
  const Classification now = ClassifySpectrum(
      handle, ApplyMutation(spectrum, top, *plan.chosen_delta, config.phase_radians));
  if (now.label == result.before.label) fail(replay.flip_ok, "replayed mutation does not flip");

  const double chosen_strength = PerturbationStrength(*plan.chosen_delta);
  for (double delta : config.deltas) {
    if (!(PerturbationStrength(delta) < chosen_strength)) continue;
    const Classification c = ClassifySpectrum(
        handle, ApplyMutation(spectrum, top, delta, config.phase_radians));
    if (c.label != result.before.label) {
      fail(replay.minimal_ok, "weaker mutation " + std::to_string(delta) + " also flips");
    }
  }
  return replay;
}

}  // namespace freqcause

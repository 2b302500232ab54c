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

#include "freqcause/serialize.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace freqcause {

namespace {

Json Number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <typename T>
Json Optional(const std::optional<T>& value) {
  return value ? ToJson(*value) : Json(nullptr);
}

Json OptionalSize(const std::optional<size_t>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

Json ToJson(const Classification& c) {
  Json j = {{"label", c.label}, {"score", Number(c.score)}};
  if (c.full_scores) {
    Json scores = Json::object();
    for (const auto& [label, score] : *c.full_scores) scores[label] = Number(score);
    j["scores"] = std::move(scores);
  }
  return j;
}

Classification ClassificationFromJson(const Json& j) {
  Classification c;
  c.label = j.at("label").get<std::string>();
  c.score = j.at("score").get<double>();
  if (j.contains("scores")) c.full_scores = j.at("scores").get<std::map<std::string, double>>();
  return c;
}

Json ToJson(const BinSet& bins) { return Json(bins.indices()); }

BinSet BinSetFromJson(const Json& j) { return BinSet(j.get<std::vector<size_t>>()); }

Json ToJson(const PartitionConfig& config) {
  return {{"parts", config.parts},
          {"max_depth", config.max_depth},
          {"iterations", config.iterations},
          {"epsilon", Number(config.epsilon)},
          {"seed", config.seed}};
}

PartitionConfig PartitionConfigFromJson(const Json& j) {
  PartitionConfig c;
  c.parts = j.at("parts").get<size_t>();
  c.max_depth = j.at("max_depth").get<size_t>();
  c.iterations = j.at("iterations").get<size_t>();
  c.epsilon = j.at("epsilon").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("epsilon").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

Json ToJson(const ExtractionConfig& config) {
  return {{"chain_length", config.chain_length},
          {"min_score_ratio", config.min_score_ratio},
          {"step_bins", config.step_bins},
          {"tail_steps", config.tail_steps}};
}

ExtractionConfig ExtractionConfigFromJson(const Json& j) {
  ExtractionConfig c;
  c.chain_length = j.at("chain_length").get<size_t>();
  c.min_score_ratio = j.at("min_score_ratio").get<double>();
  c.step_bins = j.at("step_bins").get<size_t>();
  c.tail_steps = j.at("tail_steps").get<size_t>();
  return c;
}

Json ToJson(const AttackConfig& config) {
  return {{"deltas", config.deltas},
          {"budget", config.budget},
          {"phase_radians", config.phase_radians},
          {"frame_schedule", config.frame_schedule},
          {"max_frames", config.max_frames},
          {"require_fourier_success", config.require_fourier_success}};
}

AttackConfig AttackConfigFromJson(const Json& j) {
  AttackConfig c;
  c.deltas = j.at("deltas").get<std::vector<double>>();
  c.budget = j.at("budget").get<size_t>();
  c.phase_radians = j.at("phase_radians").get<double>();
  c.frame_schedule = j.at("frame_schedule").get<std::vector<size_t>>();
  c.max_frames = j.at("max_frames").get<size_t>();
  c.require_fourier_success = j.at("require_fourier_success").get<bool>();
  return c;
}

Json ToJson(const ResponsibilityMap& map) {
  Json nonzero = Json::array();
  for (size_t k = 0; k < map.scores.size(); ++k) {
    if (map.scores[k] > 0.0) nonzero.push_back(Json::array({k, map.scores[k]}));
  }
  Json trace = Json::array();
  for (double d : map.emd_trace) trace.push_back(Number(d));
  return {{"num_bins", map.scores.size()},
          {"nonzero", std::move(nonzero)},
          {"iterations_run", map.iterations_run},
          {"emd_trace", std::move(trace)},
          {"complete", map.complete},
          {"queries", map.queries}};
}

ResponsibilityMap ResponsibilityMapFromJson(const Json& j, size_t num_bins) {
  ResponsibilityMap map;
  map.scores.assign(num_bins, 0.0);
  for (const Json& entry : j.at("nonzero")) {
    const size_t k = entry.at(0).get<size_t>();
    if (k >= num_bins) throw InvalidArgument("responsibility bin out of range");
    map.scores[k] = entry.at(1).get<double>();
  }
  map.iterations_run = j.at("iterations_run").get<size_t>();
  for (const Json& d : j.at("emd_trace")) {
    map.emd_trace.push_back(d.is_null() ? std::numeric_limits<double>::infinity()
                                        : d.get<double>());
  }
  map.complete = j.at("complete").get<bool>();
  map.queries = j.at("queries").get<uint64_t>();
  return map;
}

Json ToJson(const SubsetReport& r) {
  auto fraction = [&](const std::optional<BinSet>& set) {
    return set && r.total_bins > 0
               ? Json(static_cast<double>(set->size()) / static_cast<double>(r.total_bins))
               : Json(nullptr);
  };
  return {{"original", ToJson(r.original)},
          {"sufficient", Optional(r.sufficient)},
          {"necessary", Optional(r.necessary)},
          {"complete", Optional(r.complete)},
          {"sufficient_fraction", fraction(r.sufficient)},
          {"necessary_fraction", fraction(r.necessary)},
          {"complete_fraction", fraction(r.complete)},
          {"at_sufficient", Optional(r.at_sufficient)},
          {"at_necessary", Optional(r.at_necessary)},
          {"at_complete", Optional(r.at_complete)},
          {"inverse_of_necessary", Optional(r.inverse_of_necessary)},
          {"sufficient_step", OptionalSize(r.sufficient_step)},
          {"necessary_step", OptionalSize(r.necessary_step)},
          {"complete_step", OptionalSize(r.complete_step)},
          {"steps_evaluated", r.steps_evaluated},
          {"total_bins", r.total_bins},
          {"query_count", r.query_count},
          {"diagnostics", r.diagnostics}};
}

Json ToJson(const AttackResult& r) {
  Json frame_sizes = Json::array();
  for (const FrameSizeOutcome& o : r.frame_sizes) {
    frame_sizes.push_back({{"frame_size", o.frame_size},
                           {"attempted", o.attempted},
                           {"success", o.success},
                           {"frames_tried", o.frames_tried}});
  }
  Json j = {{"success", r.success},
            {"stop_reason", r.stop_reason},
            {"before", ToJson(r.before)},
            {"after", Optional(r.after)},
            {"deltas", r.plan.deltas},
            {"chosen_delta", r.plan.chosen_delta ? Json(*r.plan.chosen_delta) : Json(nullptr)},
            {"bins_modified", ToJson(r.plan.bins_modified)},
            {"n_frequencies", r.success ? Json(r.plan.n_frequencies) : Json(nullptr)},
            {"budget", r.plan.budget},
            {"query_count", r.query_count},
            {"phase1_queries", r.phase1_queries},
            {"phase2_queries", r.phase2_queries},
            {"linf_delta", Number(r.linf_delta)},
            {"l2_delta", Number(r.l2_delta)}};
  if (!r.frame_sizes.empty()) {
    j["frame_sizes"] = std::move(frame_sizes);
    j["frames_modified"] = r.frames_modified;
    j["frame_size_used"] = r.success ? Json(r.frame_size_used) : Json(nullptr);
    j["stft_bins"] = ToJson(r.stft_bins);
  }
  return j;
}

std::string DumpJson(const Json& j) { return j.dump(2) + "\n"; }

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidArgument("malformed JSON in " + path + ": " + e.what());
  }
}

void WriteTextFile(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create " + target.parent_path().string() + ": " + ec.message());
  }
  const std::string temporary = path + ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + temporary);
    out << content;
    if (!out.flush()) throw IoError("write failed for " + temporary);
  }
  std::error_code ec;
  std::filesystem::rename(temporary, target, ec);
  if (ec) throw IoError("cannot move " + temporary + " into place: " + ec.message());
}

std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

void WriteResponsibilityCsv(const std::string& path, const ResponsibilityMap& map,
                            const Spectrum& spectrum) {
  if (map.scores.size() != spectrum.size()) {
    throw InvalidArgument("responsibility map does not cover the spectrum");
  }
  std::ostringstream out;
  out << "bin,frequency_hz,score\n";
  for (size_t k = 0; k < map.scores.size(); ++k) {
    out << k << ',' << FormatNumber(spectrum.FrequencyOf(k)) << ','
        << FormatNumber(map.scores[k]) << '\n';
  }
  WriteTextFile(path, out.str());
}

void WriteWaveformCsv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<const TimeSignal*>& signals) {
  if (names.size() != signals.size() || signals.empty()) {
    throw InvalidArgument("waveform CSV needs one name per signal");
  }
  const uint32_t rate = signals.front()->sample_rate;
  size_t length = 0;
  for (const TimeSignal* s : signals) length = std::max(length, s->size());
  std::ostringstream out;
  out << "sample,time_s";
  for (const std::string& name : names) out << ',' << CsvField(name);
  out << '\n';
  for (size_t i = 0; i < length; ++i) {
    out << i << ',' << FormatNumber(static_cast<double>(i) / rate);
    for (const TimeSignal* s : signals) {
      out << ',';
      if (i < s->size()) out << FormatNumber(s->samples[i]);
    }
    out << '\n';
  }
  WriteTextFile(path, out.str());
}

void WriteSpectrogramCsv(const std::string& path, const Spectrogram& spectrogram) {
  std::ostringstream out;
  out << "frame,time_s,bin,frequency_hz,magnitude\n";
  for (size_t t = 0; t < spectrogram.num_frames; ++t) {
    // Frame t is centered on sample t * hop because of the half-frame padding.
    const double time = static_cast<double>(t * spectrogram.hop) / spectrogram.sample_rate;
    for (size_t k = 0; k < spectrogram.num_bins(); ++k) {
      out << t << ',' << FormatNumber(time) << ',' << k << ','
          << FormatNumber(spectrogram.FrequencyOf(k)) << ','
          << FormatNumber(std::abs(spectrogram.at(t, k))) << '\n';
    }
  }
  WriteTextFile(path, out.str());
}

}  // namespace freqcause

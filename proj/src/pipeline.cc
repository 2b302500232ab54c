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

#include "freqcause/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "freqcause/bridge.h"
#include "freqcause/builtin_classifier.h"

namespace freqcause {

namespace fs = std::filesystem;

namespace {

constexpr int kReportVersion = 1;

std::string ReportPath(const RunConfig& config, const std::string& stem) {
  return (fs::path(config.output_dir) / "reports" / (stem + ".json")).string();
}

// Exports go to <out>/<dir>/<stem>.<suffix>; reports refer to them by the
// path relative to <out>.
std::string ExportRelative(const std::string& dir, const std::string& stem,
                           const std::string& suffix) {
  return dir + "/" + stem + "." + suffix;
}

std::string ExportPath(const RunConfig& config, const std::string& relative) {
  return (fs::path(config.output_dir) / relative).string();
}

void EnsureParent(const std::string& path) {
  std::error_code ec;
  fs::create_directories(fs::path(path).parent_path(), ec);
  if (ec) throw IoError("cannot create directory for " + path + ": " + ec.message());
}

Json StageJson(const std::optional<BinSet>& bins, const std::optional<Classification>& c,
               size_t total_bins) {
  if (!bins || !c) return nullptr;
  return {{"bins", bins->size()},
          {"fraction", static_cast<double>(bins->size()) / static_cast<double>(total_bins)},
          {"classification", ToJson(*c)}};
}

TimeSignal PadTo(const TimeSignal& signal, size_t length) {
  TimeSignal out = signal;
  out.samples.resize(std::max(length, signal.size()), 0.0f);
  return out;
}

// Whether the flip survives saving the altered signal in each wav encoding.
Json ExportFidelity(const AttackResult& attack, ClassifierHandle& handle) {
  Json out = Json::object();
  for (WavEncoding encoding : {WavEncoding::kFloat32, WavEncoding::kPcm16}) {
    const Classification c = handle.Classify(RoundTrip(attack.altered, encoding));
    out[std::string(ToString(encoding))] = {{"classification", ToJson(c)},
                                            {"flipped", c.label != attack.before.label}};
  }
  return out;
}

}  // namespace

std::string_view ToString(Stage stage) {
  switch (stage) {
    case Stage::kAnalyze:
      return "analyze";
    case Stage::kAttack:
      return "attack";
    case Stage::kStftAttack:
      return "stft-attack";
  }
  return "unknown";
}

void Validate(const RunConfig& config) {
  if (config.inputs.empty()) throw InvalidArgument("no input files");
  Validate(config.partition);
  Validate(config.extraction);
  Validate(config.attack);
  if (config.jobs == 0) throw InvalidArgument("jobs must be at least 1");
  if (config.query_budget && *config.query_budget == 0) {
    throw InvalidArgument("query budget must be positive");
  }
  std::set<std::string> stems;
  for (const std::string& input : config.inputs) {
    if (!stems.insert(StemOf(input)).second) {
      throw InvalidArgument("two inputs share the stem '" + StemOf(input) + "'");
    }
  }
}

Json ReproducibleJson(const RunConfig& config) {
  return {{"inputs", config.inputs},
          {"model", config.model},
          {"partition", ToJson(config.partition)},
          {"extraction", ToJson(config.extraction)},
          {"attack", ToJson(config.attack)},
          {"seed", config.seed},
          {"exports",
           {{"wav", config.exports.wav},
            {"csv", config.exports.csv},
            {"encoding", std::string(ToString(config.exports.encoding))}}},
          {"query_budget", config.query_budget ? Json(*config.query_budget) : Json(nullptr)}};
}

Json ToJson(const RunConfig& config) {
  Json j = ReproducibleJson(config);
  j["output_dir"] = config.output_dir;
  j["jobs"] = config.jobs;
  return j;
}

RunConfig RunConfigFromJson(const Json& j) {
  RunConfig c;
  c.inputs = j.at("inputs").get<std::vector<std::string>>();
  c.model = j.at("model").get<std::string>();
  c.partition = PartitionConfigFromJson(j.at("partition"));
  c.extraction = ExtractionConfigFromJson(j.at("extraction"));
  c.attack = AttackConfigFromJson(j.at("attack"));
  c.seed = j.at("seed").get<uint64_t>();
  const Json& exports = j.at("exports");
  c.exports.wav = exports.at("wav").get<bool>();
  c.exports.csv = exports.at("csv").get<bool>();
  c.exports.encoding = ParseWavEncoding(exports.at("encoding").get<std::string>());
  if (!j.at("query_budget").is_null()) c.query_budget = j.at("query_budget").get<uint64_t>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("jobs")) c.jobs = j.at("jobs").get<size_t>();
  return c;
}

ClassifierHandle MakeClassifier(const std::string& spec, std::optional<uint64_t> budget) {
  ClassifierHandle handle = [&] {
    if (spec == "builtin") return BuiltinReferenceClassifier();
    if (spec.starts_with("builtin:")) return BuiltinReferenceClassifier(spec.substr(8));
    if (spec.starts_with("cmd:") || spec.starts_with("tcp:")) {
      return BridgeClassifier(ParseEndpoint(spec));
    }
    throw InvalidArgument("unknown model '" + spec + "'; expected builtin, cmd:... or tcp:...");
  }();
  handle.set_budget(budget);
  return handle;
}

uint64_t FileSeed(uint64_t seed, std::string_view stem) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : stem) h = (h ^ c) * 0x100000001b3ull;
  return IterationSeed(seed, h);
}

std::string StemOf(const std::string& path) { return fs::path(path).stem().string(); }

std::string GroundTruthOf(std::string_view stem) {
  const size_t underscore = stem.rfind('_');
  return underscore == std::string_view::npos ? std::string() : std::string(stem.substr(0, underscore));
}

Json AnalyzeFile(const std::string& input, ClassifierHandle& handle, const RunConfig& config,
                 Stage stage) {
  const std::string stem = StemOf(input);
  const TimeSignal signal = LoadWav(input);
  const Spectrum spectrum = Forward(signal);
  const size_t n = spectrum.size();
  const uint64_t start = handle.query_count();
  if (config.query_budget) handle.set_budget(start + *config.query_budget);

  Json report = {{"format", "freqcause-report"},
                 {"version", kReportVersion},
                 {"input", input},
                 {"stem", stem},
                 {"ground_truth", GroundTruthOf(stem)},
                 {"stage", std::string(ToString(stage))},
                 {"sample_rate", signal.sample_rate},
                 {"num_samples", signal.size()},
                 {"num_bins", n},
                 {"config", ReproducibleJson(config)}};

  PartitionConfig partition = config.partition;
  partition.seed = FileSeed(config.seed, stem);
  report["file_seed"] = partition.seed;

  const Classification original = ClassifySpectrum(handle, spectrum);
  report["original"] = ToJson(original);
  const ResponsibilityMap map = Accumulate(handle, spectrum, partition, original);
  report["responsibility"] = ToJson(map);
  const SubsetReport subsets = Extract(spectrum, map, handle, config.extraction, original);
  report["subsets"] = ToJson(subsets);
  bool budget_exhausted = !map.complete;

  // The left-over signal: the necessary set removed, or the sufficient set
  // when there is no necessary one.
  std::optional<BinSet> removed;
  std::optional<Classification> inverse;
  std::string removed_name;
  if (subsets.necessary) {
    removed = subsets.necessary;
    removed_name = "necessary";
    inverse = subsets.inverse_of_necessary;
  } else if (subsets.sufficient) {
    removed = subsets.sufficient;
    removed_name = "sufficient";
    try {
      inverse = Invert(spectrum, *subsets.sufficient, handle).classification;
    } catch (const BudgetExhausted&) {
      budget_exhausted = true;
    }
  }
  report["inverse"] = inverse ? Json{{"removed", removed_name}, {"classification", ToJson(*inverse)}}
                              : Json(nullptr);

  std::optional<AttackResult> fourier;
  std::optional<AttackResult> stft;
  const TimeSignal reconstruction = Inverse(spectrum);
  if (stage != Stage::kAnalyze) {
    if (!subsets.sufficient) {
      report["attack"] = {{"skipped", "no sufficient set"}};
    } else {
      try {
        fourier = FourierAttack(spectrum, map, *subsets.sufficient, handle, config.attack,
                                original);
        report["attack"] = ToJson(*fourier);
        if (fourier->success) report["attack"]["export_fidelity"] = ExportFidelity(*fourier, handle);
        if (stage == Stage::kStftAttack) {
          stft = StftAttack(reconstruction, *fourier, handle, config.attack);
          report["stft_attack"] = ToJson(*stft);
          if (stft->success) report["stft_attack"]["export_fidelity"] = ExportFidelity(*stft, handle);
        }
      } catch (const BudgetExhausted&) {
        budget_exhausted = true;
        if (!report.contains("attack")) report["attack"] = {{"skipped", "query budget exhausted"}};
      }
    }
  }
  report["budget_exhausted"] = budget_exhausted;
  report["queries"] = handle.query_count() - start;

  // Stage signals, each exactly the input the recorded classification saw.
  struct StageSignal {
    std::string name;
    TimeSignal signal;
    Classification classification;
  };
  std::vector<StageSignal> stages;
  stages.push_back({"original", reconstruction, original});
  auto add_mask = [&](const char* name, const std::optional<BinSet>& bins,
                      const std::optional<Classification>& c) {
    if (bins && c) stages.push_back({name, Inverse(Mask(spectrum, *bins)), *c});
  };
  add_mask("sufficient", subsets.sufficient, subsets.at_sufficient);
  add_mask("necessary", subsets.necessary, subsets.at_necessary);
  add_mask("complete", subsets.complete, subsets.at_complete);
  if (removed && inverse) {
    stages.push_back({"inverse", Inverse(Mask(spectrum, removed->Complement(n))), *inverse});
  }
  if (fourier && fourier->success) stages.push_back({"fourier", fourier->altered, *fourier->after});
  if (stft && stft->success) stages.push_back({"stft", stft->altered, *stft->after});

  Json stage_json = Json::object();
  stage_json["original"] = {{"bins", n}, {"fraction", 1.0}, {"classification", ToJson(original)}};
  stage_json["sufficient"] = StageJson(subsets.sufficient, subsets.at_sufficient, n);
  stage_json["necessary"] = StageJson(subsets.necessary, subsets.at_necessary, n);
  stage_json["complete"] = StageJson(subsets.complete, subsets.at_complete, n);
  stage_json["inverse"] =
      removed && inverse ? StageJson(removed->Complement(n), inverse, n) : Json(nullptr);

  Json exports = {{"wav", Json::object()}, {"csv", Json::array()}};
  if (config.exports.wav) {
    for (const StageSignal& s : stages) {
      const std::string relative = ExportRelative("wav", stem, s.name + ".wav");
      const std::string path = ExportPath(config, relative);
      EnsureParent(path);
      SaveWav(s.signal, path, config.exports.encoding);
      exports["wav"][s.name] = {{"file", relative}, {"classification", ToJson(s.classification)}};
    }
  }
  if (config.exports.csv) {
    const std::string responsibility = ExportRelative("csv", stem, "responsibility.csv");
    WriteResponsibilityCsv(ExportPath(config, responsibility), map, spectrum);
    exports["csv"].push_back(responsibility);

    std::vector<std::string> names;
    std::vector<const TimeSignal*> signals;
    for (const StageSignal& s : stages) {
      if (s.name == "fourier" || s.name == "stft") continue;
      names.push_back(s.name);
      signals.push_back(&s.signal);
    }
    const std::string waveform = ExportRelative("csv", stem, "waveform.csv");
    WriteWaveformCsv(ExportPath(config, waveform), names, signals);
    exports["csv"].push_back(waveform);

    if (stft && stft->success) {
      const std::string before = ExportRelative("csv", stem, "stft_before.csv");
      const std::string after = ExportRelative("csv", stem, "stft_after.csv");
      WriteSpectrogramCsv(ExportPath(config, before), Stft(reconstruction, stft->frame_size_used));
      WriteSpectrogramCsv(ExportPath(config, after), Stft(stft->altered, stft->frame_size_used));
      exports["csv"].push_back(before);
      exports["csv"].push_back(after);
    }
  }
  report["stages"] = std::move(stage_json);
  report["exports"] = std::move(exports);

  WriteTextFile(ReportPath(config, stem), DumpJson(report));
  return report;
}

BatchResult RunBatch(const RunConfig& config, Stage stage) {
  Validate(config);
  std::error_code ec;
  fs::create_directories(fs::path(config.output_dir) / "reports", ec);
  if (ec) throw IoError("cannot create " + config.output_dir + ": " + ec.message());

  // Handshakes happen here so that an unreachable model fails the whole run.
  const size_t workers = std::min(config.jobs, config.inputs.size());
  std::vector<ClassifierHandle> handles;
  handles.push_back(MakeClassifier(config.model));
  for (size_t w = 1; w < workers; ++w) handles.push_back(handles.front().Clone());

  BatchResult batch;
  batch.files.resize(config.inputs.size());
  std::atomic<size_t> next{0};
  auto work = [&](ClassifierHandle& handle) {
    for (size_t i = next++; i < config.inputs.size(); i = next++) {
      FileResult& result = batch.files[i];
      result.input = config.inputs[i];
      result.stem = StemOf(result.input);
      const auto begin = std::chrono::steady_clock::now();
      const uint64_t queries_before = handle.query_count();
      try {
        result.report = AnalyzeFile(result.input, handle, config, stage);
        result.ok = true;
      } catch (const std::exception& e) {
        result.error = e.what();
        spdlog::error("{}: {}", result.input, e.what());
      }
      result.queries = handle.query_count() - queries_before;
      result.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
      if (result.ok) {
        spdlog::info("{}: {} queries, {:.2f} s", result.stem, result.queries, result.seconds);
      }
    }
  };
  if (workers == 1) {
    work(handles.front());
  } else {
    std::vector<std::thread> threads;
    for (size_t w = 0; w < workers; ++w) threads.emplace_back(work, std::ref(handles[w]));
    for (std::thread& t : threads) t.join();
  }

  Json errors = Json::array();
  Json timings = Json::array();
  for (const FileResult& r : batch.files) {
    if (!r.ok) {
      ++batch.failures;
      errors.push_back({{"input", r.input}, {"error", r.error}});
    }
    timings.push_back({{"input", r.input}, {"seconds", r.seconds}, {"queries", r.queries}});
  }
  const fs::path out(config.output_dir);
  WriteTextFile((out / "errors.json").string(), DumpJson(errors));
  WriteTextFile((out / "timings.json").string(), DumpJson(timings));
  return batch;
}

std::vector<Json> LoadReports(const std::string& run_dir) {
  const fs::path dir = fs::path(run_dir) / "reports";
  if (!fs::is_directory(dir)) throw InvalidArgument("no reports directory in " + run_dir);
  std::vector<fs::path> paths;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Json> reports;
  for (const fs::path& p : paths) reports.push_back(ReadJsonFile(p.string()));
  return reports;
}

Json RunCompose(const std::string& run_dir, const std::string& model, const std::string& out_dir,
                bool export_wav) {
  const std::vector<Json> reports = LoadReports(run_dir);
  struct Member {
    std::string stem;
    TimeSignal signal;
  };
  std::map<std::string, std::vector<Member>> by_label;
  for (const Json& r : reports) {
    const std::string truth = r.at("ground_truth").get<std::string>();
    const Json& sufficient = r.at("subsets").at("sufficient");
    if (truth.empty() || sufficient.is_null()) continue;
    if (r.at("original").at("label").get<std::string>() != truth) continue;
    const Spectrum spectrum = Forward(LoadWav(r.at("input").get<std::string>()));
    by_label[truth].push_back(
        {r.at("stem").get<std::string>(), Inverse(Mask(spectrum, BinSetFromJson(sufficient)))});
  }
  if (by_label.empty()) throw InvalidArgument("no correctly classified report with a sufficient set");

  ClassifierHandle handle = MakeClassifier(model);
  Json labels = Json::object();
  for (auto& [label, members] : by_label) {
    size_t length = 0;
    for (const Member& m : members) {
      if (m.signal.sample_rate != members.front().signal.sample_rate) {
        throw InvalidArgument("cannot compose '" + label + "': mixed sample rates");
      }
      length = std::max(length, m.signal.size());
    }
    // Zero padding to a common length keeps the sum a plain superposition.
    std::vector<Spectrum> spectra;
    Json stems = Json::array();
    for (const Member& m : members) {
      spectra.push_back(Forward(PadTo(m.signal, length)));
      stems.push_back(m.stem);
    }
    size_t prefix_successes = 0;
    Composition full;
    for (size_t k = 1; k <= spectra.size(); ++k) {
      Composition c = Compose({spectra.begin(), spectra.begin() + static_cast<std::ptrdiff_t>(k)},
                              handle, label);
      if (c.success) ++prefix_successes;
      if (k == spectra.size()) full = std::move(c);
    }
    Json entry = {{"clips", members.size()},
                  {"stems", stems},
                  {"full_success", full.success},
                  {"classification", ToJson(full.classification)},
                  {"prefix_successes", prefix_successes},
                  {"prefix_success_rate",
                   static_cast<double>(prefix_successes) / static_cast<double>(members.size())}};
    if (export_wav) {
      const std::string relative = "wav/compose." + label + ".wav";
      const std::string path = (fs::path(out_dir) / relative).string();
      EnsureParent(path);
      SaveWav(full.signal, path, WavEncoding::kFloat32);
      entry["file"] = relative;
    }
    labels[label] = std::move(entry);
  }
  const Json result = {{"format", "freqcause-compose"},
                       {"version", 1},
                       {"model", model},
                       {"labels", labels}};
  WriteTextFile((fs::path(out_dir) / "compose.json").string(), DumpJson(result));
  return result;
}

}  // namespace freqcause

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

// freqcause command-line front end.
//
// Exit codes: 0 success, 1 some inputs failed, 2 configuration or model
// handshake error.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "freqcause/corpus.h"
#include "freqcause/pipeline.h"
#include "freqcause/summary.h"

namespace fs = std::filesystem;
using namespace freqcause;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

double ParseEpsilon(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) throw InvalidArgument("invalid --epsilon '" + text + "'");
  return value;
}

// Directories expand to the .wav files directly inside them, sorted.
std::vector<std::string> ExpandInputs(const std::vector<std::string>& args) {
  std::vector<std::string> inputs;
  for (const std::string& arg : args) {
    if (!fs::is_directory(arg)) {
      inputs.push_back(arg);
      continue;
    }
    std::vector<std::string> found;
    for (const fs::directory_entry& e : fs::directory_iterator(arg)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") found.push_back(e.path().string());
    }
    std::sort(found.begin(), found.end());
    inputs.insert(inputs.end(), found.begin(), found.end());
  }
  return inputs;
}

struct RunOptions {
  RunConfig config;
  std::vector<std::string> inputs;
  std::string epsilon = FormatNumber(PartitionConfig{}.epsilon);
  std::string encoding = "float32";
  uint64_t query_budget = 0;
};

void AddRunOptions(CLI::App* cmd, RunOptions& o) {
  RunConfig& c = o.config;
  cmd->add_option("inputs", o.inputs, "wav files or directories of wav files")->required();
  cmd->add_option("--model", c.model, "builtin, builtin:<weights.json>, cmd:<argv> or tcp:<host>:<port>")
      ->capture_default_str();
  cmd->add_option("--partitions", c.partition.parts, "parts per partition level")
      ->capture_default_str();
  cmd->add_option("--max-depth", c.partition.max_depth, "partition refinement depth")
      ->capture_default_str();
  cmd->add_option("--iterations", c.partition.iterations, "maximum accumulation passes")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.epsilon, "EMD stopping threshold in bins, or inf")
      ->capture_default_str();
  cmd->add_option("--chain-length", c.extraction.chain_length, "stability chain length")
      ->capture_default_str();
  cmd->add_option("--min-score-ratio", c.extraction.min_score_ratio,
                  "minimum score relative to the original")
      ->capture_default_str();
  cmd->add_option("--step-bins", c.extraction.step_bins,
                  "bins added per greedy step; 0 groups equal responsibility")
      ->capture_default_str();
  cmd->add_option("--budget", c.attack.budget, "maximum number of altered frequencies")
      ->capture_default_str();
  cmd->add_option("--deltas", c.attack.deltas, "amplitude mutations")->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--phase", c.attack.phase_radians, "phase rotation applied with each mutation")
      ->capture_default_str();
  cmd->add_option("--frames", c.attack.frame_schedule, "STFT frame sizes, in order")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--max-frames", c.attack.max_frames, "frames tried per size, 0 for all")
      ->capture_default_str();
  cmd->add_option("--query-budget", o.query_budget, "per-file classifier query cap, 0 for none");
  cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  cmd->add_option("--out", c.output_dir, "output directory")->capture_default_str();
  cmd->add_flag("--export-wav", c.exports.wav, "write stage wavs");
  cmd->add_flag("--export-csv", c.exports.csv, "write responsibility, waveform and spectrogram CSVs");
  cmd->add_option("--wav-encoding", o.encoding, "float32 or pcm16")->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "worker threads")->capture_default_str();
}

int RunStage(RunOptions& o, Stage stage) {
  RunConfig& c = o.config;
  try {
    c.partition.epsilon = ParseEpsilon(o.epsilon);
    c.exports.encoding = ParseWavEncoding(o.encoding);
    if (o.query_budget > 0) c.query_budget = o.query_budget;
    c.inputs = ExpandInputs(o.inputs);
    Validate(c);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  BatchResult batch;
  try {
    batch = RunBatch(c, stage);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  spdlog::info("{}: {} of {} inputs done, reports in {}", ToString(stage),
               batch.files.size() - batch.failures, batch.files.size(), c.output_dir);
  return batch.failures == 0 ? kExitOk : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("freqcause"));
  CLI::App app{"Frequency-domain causal explanations and attacks for audio classifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->capture_default_str();

  CorpusConfig corpus;
  std::string corpus_out = "corpus";
  std::string corpus_encoding = "float32";
  CLI::App* gen = app.add_subcommand("gen-corpus", "write the synthetic builtin corpus");
  gen->add_option("--out", corpus_out, "output directory")->capture_default_str();
  gen->add_option("--seed", corpus.seed, "generator seed")->capture_default_str();
  gen->add_option("--clips-per-class", corpus.clips_per_class)->capture_default_str();
  gen->add_option("--wav-encoding", corpus_encoding, "float32 or pcm16")->capture_default_str();

  RunOptions analyze_options;
  RunOptions attack_options;
  RunOptions stft_options;
  CLI::App* analyze = app.add_subcommand("analyze", "responsibility map and subsets per file");
  CLI::App* attack = app.add_subcommand("attack", "analyze, then the Fourier attack");
  CLI::App* stft = app.add_subcommand("stft-attack", "analyze, Fourier attack, then the STFT attack");
  AddRunOptions(analyze, analyze_options);
  AddRunOptions(attack, attack_options);
  AddRunOptions(stft, stft_options);

  std::string compose_dir;
  std::string compose_model = "builtin";
  std::string compose_out;
  bool compose_wav = false;
  CLI::App* compose = app.add_subcommand("compose", "superpose same-label sufficient signals");
  compose->add_option("run_dir", compose_dir, "output directory of an analyze run")->required();
  compose->add_option("--model", compose_model)->capture_default_str();
  compose->add_option("--out", compose_out, "defaults to run_dir");
  compose->add_flag("--export-wav", compose_wav, "write the composed signals");

  std::string summary_dir;
  std::string summary_out;
  CLI::App* summarize = app.add_subcommand("summarize", "aggregate reports into tables");
  summarize->add_option("run_dir", summary_dir, "output directory of a run")->required();
  summarize->add_option("--out", summary_out, "defaults to run_dir/summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*analyze) return RunStage(analyze_options, Stage::kAnalyze);
  if (*attack) return RunStage(attack_options, Stage::kAttack);
  if (*stft) return RunStage(stft_options, Stage::kStftAttack);

  try {
    if (*gen) {
      try {
        corpus.encoding = ParseWavEncoding(corpus_encoding);
        GenerateCorpus(corpus, corpus_out);
      } catch (const InvalidArgument& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
      } catch (const IoError& e) {
        spdlog::error("{}", e.what());
        return kExitConfig;
      } catch (const Error& e) {
        // The corpus was written but fails its accuracy check.
        spdlog::error("{}", e.what());
        return kExitPartial;
      }
      return kExitOk;
    }
    if (*compose) {
      const Json result =
          RunCompose(compose_dir, compose_model, compose_out.empty() ? compose_dir : compose_out,
                     compose_wav);
      for (const auto& [label, entry] : result.at("labels").items()) {
        spdlog::info("{}: {} clips, full composition {}, prefix success rate {}", label,
                     entry.at("clips").get<size_t>(),
                     entry.at("full_success").get<bool>() ? "kept the label" : "lost the label",
                     entry.at("prefix_success_rate").get<double>());
      }
      return kExitOk;
    }
    if (*summarize) {
      const std::string out =
          summary_out.empty() ? (fs::path(summary_dir) / "summary").string() : summary_out;
      WriteSummary(SummarizeDirectory(summary_dir), out);
      spdlog::info("summary written to {}", out);
      return kExitOk;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}

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

// Batch harness behind the command-line tool.
//
// Output layout under RunConfig::output_dir:
//   reports/<stem>.json   one report per input, byte-identical across reruns
//   wav/<stem>.<stage>.wav, csv/<stem>.*.csv   optional exports
//   errors.json           inputs that failed, with the reason
//   timings.json          wall-clock seconds and queries per input
//   compose.json          written by RunCompose

#ifndef FREQCAUSE_PIPELINE_H_
#define FREQCAUSE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freqcause/attacks.h"
#include "freqcause/classifier.h"
#include "freqcause/responsibility.h"
#include "freqcause/serialize.h"
#include "freqcause/subsets.h"
#include "freqcause/wav.h"

namespace freqcause {

enum class Stage { kAnalyze, kAttack, kStftAttack };
std::string_view ToString(Stage stage);

struct ExportConfig {
  bool wav = false;
  bool csv = false;
  WavEncoding encoding = WavEncoding::kFloat32;
};

struct RunConfig {
  std::vector<std::string> inputs;
  // "builtin", "builtin:<weights.json>", "cmd:<argv>" or "tcp:<host>:<port>".
  std::string model = "builtin";
  // partition.seed is replaced per file by FileSeed(seed, stem).
  PartitionConfig partition;
  ExtractionConfig extraction;
  AttackConfig attack;
  std::string output_dir = "out";
  uint64_t seed = 0;
  ExportConfig exports;
  size_t jobs = 1;
  // Per-file query cap; unlimited when absent.
  std::optional<uint64_t> query_budget;
};

// Throws InvalidArgument on invalid module configs, no inputs or two inputs
// sharing a stem.
void Validate(const RunConfig& config);

Json ToJson(const RunConfig& config);
RunConfig RunConfigFromJson(const Json& j);
// The config as embedded in reports: without output_dir and jobs, which do
// not affect any result.
Json ReproducibleJson(const RunConfig& config);

// Throws InvalidArgument for unknown specs and BridgeError when a bridge
// cannot be reached or fails the handshake.
ClassifierHandle MakeClassifier(const std::string& spec,
                                std::optional<uint64_t> budget = std::nullopt);

uint64_t FileSeed(uint64_t seed, std::string_view stem);
std::string StemOf(const std::string& path);
// "classA_007" -> "classA"; empty when the stem has no underscore.
std::string GroundTruthOf(std::string_view stem);

// Runs `stage` (and every stage before it) on one file, writes its report and
// exports, and returns the report.
Json AnalyzeFile(const std::string& input, ClassifierHandle& handle, const RunConfig& config,
                 Stage stage);

struct FileResult {
  std::string input;
  std::string stem;
  bool ok = false;
  std::string error;
  Json report;
  double seconds = 0.0;
  uint64_t queries = 0;
};

struct BatchResult {
  std::vector<FileResult> files;
  size_t failures = 0;
};

// Per-file errors are recorded and the batch continues. Config and
// handshake errors throw before any file is processed.
BatchResult RunBatch(const RunConfig& config, Stage stage);

// Superposes the sufficient signals of all correctly classified reports of
// each label found in <run_dir>/reports and classifies the sums. Also scores
// every prefix of each label's list (in stem order). Writes
// <out_dir>/compose.json and returns its content.
Json RunCompose(const std::string& run_dir, const std::string& model, const std::string& out_dir,
                bool export_wav = false);

std::vector<Json> LoadReports(const std::string& run_dir);

}  // namespace freqcause

#endif  // FREQCAUSE_PIPELINE_H_

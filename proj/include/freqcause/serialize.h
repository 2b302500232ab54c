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

// JSON and CSV encodings of library results. JSON objects are written with
// sorted keys and shortest round-trip doubles, so equal values always dump to
// equal bytes. Non-finite doubles are written as null.

#ifndef FREQCAUSE_SERIALIZE_H_
#define FREQCAUSE_SERIALIZE_H_

#include <string>
#include <vector>

#include "json.hpp"

#include "freqcause/attacks.h"
#include "freqcause/classifier.h"
#include "freqcause/responsibility.h"
#include "freqcause/signal.h"
#include "freqcause/subsets.h"

namespace freqcause {

using Json = nlohmann::json;

Json ToJson(const Classification& c);
Classification ClassificationFromJson(const Json& j);

Json ToJson(const BinSet& bins);
BinSet BinSetFromJson(const Json& j);

Json ToJson(const PartitionConfig& config);
PartitionConfig PartitionConfigFromJson(const Json& j);
Json ToJson(const ExtractionConfig& config);
ExtractionConfig ExtractionConfigFromJson(const Json& j);
Json ToJson(const AttackConfig& config);
AttackConfig AttackConfigFromJson(const Json& j);

// Sparse: only nonzero bins are listed, as [bin, score] pairs.
Json ToJson(const ResponsibilityMap& map);
ResponsibilityMap ResponsibilityMapFromJson(const Json& j, size_t num_bins);

Json ToJson(const SubsetReport& report);

// Everything except the altered signal and spectrum.
Json ToJson(const AttackResult& result);

// Two-space indented dump with a trailing newline.
std::string DumpJson(const Json& j);
Json ReadJsonFile(const std::string& path);
// Writes through a temporary file and renames it into place.
void WriteTextFile(const std::string& path, const std::string& content);

// bin,frequency_hz,score
void WriteResponsibilityCsv(const std::string& path, const ResponsibilityMap& map,
                            const Spectrum& spectrum);

// sample,time_s,<name>... Shorter columns are left empty past their end.
void WriteWaveformCsv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<const TimeSignal*>& signals);

// frame,time_s,bin,frequency_hz,magnitude
void WriteSpectrogramCsv(const std::string& path, const Spectrogram& spectrogram);

// Minimal CSV writer: quotes fields containing separators, quotes or newlines.
std::string CsvField(const std::string& field);
std::string FormatNumber(double value);

}  // namespace freqcause

#endif  // FREQCAUSE_SERIALIZE_H_

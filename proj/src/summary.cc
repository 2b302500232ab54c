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

#include "freqcause/summary.h"

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "freqcause/pipeline.h"

namespace freqcause {

namespace fs = std::filesystem;

namespace {

// Empty cell for an undefined ratio.
std::string Ratio(size_t numerator, size_t denominator) {
  if (denominator == 0) return "";
  return FormatNumber(static_cast<double>(numerator) / static_cast<double>(denominator));
}

Json RatioJson(size_t numerator, size_t denominator) {
  if (denominator == 0) return nullptr;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

bool IsCorrect(const Json& report) {
  const std::string truth = report.at("ground_truth").get<std::string>();
  return truth.empty() || report.at("original").at("label").get<std::string>() == truth;
}

}  // namespace

CorpusSummary Summarize(const std::vector<Json>& reports, const std::optional<Json>& compose) {
  if (reports.empty()) throw InvalidArgument("no reports to summarize");
  CorpusSummary s;
  s.model = reports.front().at("config").at("model").get<std::string>();
  s.reports = reports.size();
  std::set<std::string> labels;
  std::vector<double> shifts;

  for (const Json& r : reports) {
    const std::string truth = r.at("ground_truth").get<std::string>();
    const std::string label = truth.empty() ? r.at("original").at("label").get<std::string>() : truth;
    labels.insert(label);
    if (!IsCorrect(r)) continue;
    ++s.correct;

    const Json& subsets = r.at("subsets");
    SufficiencyStats& suff = s.sufficiency[label];
    ++suff.reports;
    if (!subsets.at("sufficient").is_null()) {
      const double percent = 100.0 * subsets.at("sufficient_fraction").get<double>();
      ++suff.with_sufficient;
      suff.mean_percent += (percent - suff.mean_percent) / static_cast<double>(suff.with_sufficient);
    }

    if (!r.at("inverse").is_null()) {
      const std::string inverse =
          r.at("inverse").at("classification").at("label").get<std::string>();
      ++s.inversion[inverse];
      ++s.inversion_by_label[label][inverse];
    }

    if (!subsets.at("at_necessary").is_null() && !subsets.at("at_complete").is_null()) {
      const double shift = subsets.at("at_complete").at("score").get<double>() -
                           subsets.at("at_necessary").at("score").get<double>();
      shifts.push_back(std::abs(shift));
      if (shift > 0.0) {
        ++s.completeness.up;
      } else if (shift < 0.0) {
        ++s.completeness.down;
      } else {
        ++s.completeness.unchanged;
      }
    }

    if (r.contains("attack") && r.at("attack").contains("success")) {
      const Json& attack = r.at("attack");
      ++s.attack.attacked;
      if (attack.at("success").get<bool>()) {
        ++s.attack.success;
        const size_t n = attack.at("n_frequencies").get<size_t>();
        if (n == 1) ++s.attack.one_frequency;
        if (n <= 5) ++s.attack.within_five;
      }
      if (attack.at("success").get<bool>() && r.contains("stft_attack")) {
        const Json& stft = r.at("stft_attack");
        ++s.stft.attempted;
        if (stft.at("success").get<bool>()) ++s.stft.success;
        if (stft.contains("frame_sizes")) {
          for (const Json& o : stft.at("frame_sizes")) {
            FrameSizeStats& fs = s.stft.frame_sizes[o.at("frame_size").get<size_t>()];
            if (o.at("attempted").get<bool>()) ++fs.reached;
            if (o.at("success").get<bool>()) ++fs.success;
          }
        }
      }
    }
  }

  s.completeness.count = shifts.size();
  if (!shifts.empty()) {
    double sum = 0.0;
    for (double x : shifts) sum += x;
    const double mean = sum / static_cast<double>(shifts.size());
    double squares = 0.0;
    for (double x : shifts) squares += (x - mean) * (x - mean);
    s.completeness.mean_abs_shift = mean;
    s.completeness.std_abs_shift = std::sqrt(squares / static_cast<double>(shifts.size()));
  }

  if (compose) {
    for (const auto& [label, entry] : compose->at("labels").items()) {
      labels.insert(label);
      CompositionStats& c = s.composition[label];
      c.clips = entry.at("clips").get<size_t>();
      c.full_success = entry.at("full_success").get<bool>();
      c.prefix_success_rate = entry.at("prefix_success_rate").get<double>();
    }
  }
  s.labels.assign(labels.begin(), labels.end());
  return s;
}

CorpusSummary SummarizeDirectory(const std::string& run_dir) {
  const std::vector<Json> reports = LoadReports(run_dir);
  if (reports.empty()) throw InvalidArgument("no reports in " + run_dir);
  std::optional<Json> compose;
  const fs::path compose_path = fs::path(run_dir) / "compose.json";
  if (fs::exists(compose_path)) compose = ReadJsonFile(compose_path.string());
  return Summarize(reports, compose);
}

Json ToJson(const CorpusSummary& s) {
  Json sufficiency = Json::object();
  for (const auto& [label, v] : s.sufficiency) {
    sufficiency[label] = {{"reports", v.reports},
                          {"with_sufficient", v.with_sufficient},
                          {"mean_percent", v.with_sufficient ? Json(v.mean_percent) : Json(nullptr)}};
  }
  const CompletenessStats& c = s.completeness;
  Json composition = Json::object();
  for (const auto& [label, v] : s.composition) {
    composition[label] = {{"clips", v.clips},
                          {"full_success", v.full_success},
                          {"prefix_success_rate", v.prefix_success_rate}};
  }
  Json frame_sizes = Json::object();
  for (const auto& [size, v] : s.stft.frame_sizes) {
    frame_sizes[std::to_string(size)] = {{"reached", v.reached},
                                         {"success", v.success},
                                         {"success_rate", RatioJson(v.success, v.reached)}};
  }
  const AttackStats& a = s.attack;
  return {{"format", "freqcause-summary"},
          {"version", 1},
          {"model", s.model},
          {"reports", s.reports},
          {"correct", s.correct},
          {"labels", s.labels},
          {"sufficiency", sufficiency},
          {"inversion", s.inversion},
          {"inversion_by_label", s.inversion_by_label},
          {"completeness",
           {{"count", c.count},
            {"mean_abs_shift", c.count ? Json(c.mean_abs_shift) : Json(nullptr)},
            {"std_abs_shift", c.count ? Json(c.std_abs_shift) : Json(nullptr)},
            {"up", c.up},
            {"down", c.down},
            {"unchanged", c.unchanged},
            {"up_fraction", RatioJson(c.up, c.count)}}},
          {"composition", composition},
          {"attack",
           {{"attacked", a.attacked},
            {"success", a.success},
            {"one_frequency", a.one_frequency},
            {"within_five", a.within_five},
            {"success_rate", RatioJson(a.success, a.attacked)},
            {"one_frequency_rate", RatioJson(a.one_frequency, a.attacked)},
            {"within_five_rate", RatioJson(a.within_five, a.attacked)},
            {"one_frequency_share_of_successes", RatioJson(a.one_frequency, a.success)},
            {"within_five_share_of_successes", RatioJson(a.within_five, a.success)}}},
          {"stft",
           {{"attempted", s.stft.attempted},
            {"success", s.stft.success},
            {"success_rate", RatioJson(s.stft.success, s.stft.attempted)},
            {"frame_sizes", frame_sizes}}}};
}

void WriteSummary(const CorpusSummary& s, const std::string& out_dir) {
  const fs::path out(out_dir);
  WriteTextFile((out / "summary.json").string(), DumpJson(ToJson(s)));
  const std::string model = CsvField(s.model);

  std::ostringstream table1;
  table1 << "model";
  for (const std::string& label : s.labels) table1 << ',' << CsvField(label);
  table1 << '\n' << model;
  for (const std::string& label : s.labels) {
    table1 << ',';
    const auto it = s.sufficiency.find(label);
    if (it != s.sufficiency.end() && it->second.with_sufficient > 0) {
      table1 << FormatNumber(it->second.mean_percent);
    }
  }
  table1 << '\n';
  WriteTextFile((out / "table1_sufficiency.csv").string(), table1.str());

  std::ostringstream inversion;
  inversion << "model,true_label,inverse_label,count\n";
  for (const auto& [truth, counts] : s.inversion_by_label) {
    for (const auto& [label, count] : counts) {
      inversion << model << ',' << CsvField(truth) << ',' << CsvField(label) << ',' << count
                << '\n';
    }
  }
  WriteTextFile((out / "inversion_histogram.csv").string(), inversion.str());

  const CompletenessStats& c = s.completeness;
  std::ostringstream completeness;
  completeness << "model,count,mean_abs_shift,std_abs_shift,up_fraction,down_fraction\n"
               << model << ',' << c.count << ','
               << (c.count ? FormatNumber(c.mean_abs_shift) : "") << ','
               << (c.count ? FormatNumber(c.std_abs_shift) : "") << ',' << Ratio(c.up, c.count)
               << ',' << Ratio(c.down, c.count) << '\n';
  WriteTextFile((out / "completeness.csv").string(), completeness.str());

  std::ostringstream table2;
  table2 << "model";
  for (const std::string& label : s.labels) table2 << ',' << CsvField(label);
  table2 << '\n' << model;
  for (const std::string& label : s.labels) {
    table2 << ',';
    const auto it = s.composition.find(label);
    if (it != s.composition.end()) table2 << FormatNumber(it->second.prefix_success_rate);
  }
  table2 << '\n';
  WriteTextFile((out / "table2_composition.csv").string(), table2.str());

  const AttackStats& a = s.attack;
  std::ostringstream table3;
  table3 << "model,success,1_freq,5_freqs\n"
         << model << ',' << Ratio(a.success, a.attacked) << ','
         << Ratio(a.one_frequency, a.attacked) << ',' << Ratio(a.within_five, a.attacked) << '\n';
  WriteTextFile((out / "table3_attack.csv").string(), table3.str());

  std::ostringstream table4;
  table4 << "model,success";
  for (const auto& [size, v] : s.stft.frame_sizes) table4 << ',' << size;
  table4 << '\n' << model << ',' << Ratio(s.stft.success, s.stft.attempted);
  for (const auto& [size, v] : s.stft.frame_sizes) table4 << ',' << Ratio(v.success, v.reached);
  table4 << '\n';
  WriteTextFile((out / "table4_stft.csv").string(), table4.str());
}

}  // namespace freqcause

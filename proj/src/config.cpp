// Copyright 2026 The scorewatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "scorewatch/config.hpp"
#include "scorewatch/error.hpp"
#include "scorewatch/windows.hpp"

namespace scorewatch {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"windows.reference_size", [](RunConfig& c, auto& k, auto& v) { c.monitor.reference_size = to_count(k, v); }},
      {"windows.target_size", [](RunConfig& c, auto& k, auto& v) { c.monitor.target_size = to_count(k, v); }},
      {"windows.avg_daily_events", [](RunConfig& c, auto& k, auto& v) { c.avg_daily_events = to_real(k, v); }},
      {"signal.bin_count",
       [](RunConfig& c, auto& k, auto& v) { c.monitor.bin_count = c.report.bin_count = to_count(k, v); }},
      {"threshold.percentile", [](RunConfig& c, auto& k, auto& v) { c.monitor.threshold_percentile = to_real(k, v); }},
      {"sketch.bins", [](RunConfig& c, auto& k, auto& v) { c.monitor.sketch_bins = to_count(k, v); }},
      {"sketch.policy",
       [](RunConfig& c, auto& k, auto& v) {
         auto p = parse_direction_policy(v);
         if (!p) throw ConfigError(k + ": unknown direction policy '" + v + "'");
         c.monitor.policy = *p;
       }},
      {"alarm.refractory_events",
       [](RunConfig& c, auto& k, auto& v) { c.monitor.refractory_events = to_count(k, v); }},
      {"alarm.min_signal_samples",
       [](RunConfig& c, auto& k, auto& v) { c.monitor.min_signal_samples = to_count(k, v); }},
      {"alarm.snapshot",
       [](RunConfig& c, auto& k, auto& v) {
         auto m = parse_snapshot_mode(v);
         if (!m) throw ConfigError(k + ": unknown snapshot mode '" + v + "'");
         c.monitor.snapshot_mode = *m;
       }},
      {"valley.percentile", [](RunConfig& c, auto& k, auto& v) { c.monitor.valley_percentile = to_real(k, v); }},
      {"debug.landmark", [](RunConfig& c, auto& k, auto& v) { c.monitor.track_landmark = to_bool(k, v); }},
      {"filter.alpha", [](RunConfig& c, auto& k, auto& v) { c.filter.alpha = to_real(k, v); }},
      {"filter.p", [](RunConfig& c, auto& k, auto& v) { c.filter.p = to_real(k, v); }},
      {"filter.sample_size", [](RunConfig& c, auto& k, auto& v) { c.filter.sample_size = to_count(k, v); }},
      {"report.top_features", [](RunConfig& c, auto& k, auto& v) { c.report.top_features = to_count(k, v); }},
      {"report.top_events", [](RunConfig& c, auto& k, auto& v) { c.report.top_events = to_count(k, v); }},
      {"report.cv_folds", [](RunConfig& c, auto& k, auto& v) { c.report.cv_folds = to_count(k, v); }},
      {"report.curve_step", [](RunConfig& c, auto& k, auto& v) { c.report.curve_step = to_count(k, v); }},
      {"report.curve_max_k", [](RunConfig& c, auto& k, auto& v) { c.report.curve_max_k = to_count(k, v); }},
      {"report.workers", [](RunConfig& c, auto& k, auto& v) { c.report_workers = to_count(k, v); }},
      {"gbdt.trees", [](RunConfig& c, auto& k, auto& v) { c.report.gbdt.trees = to_count(k, v); }},
      {"gbdt.max_depth", [](RunConfig& c, auto& k, auto& v) { c.report.gbdt.max_depth = to_count(k, v); }},
      {"gbdt.learning_rate", [](RunConfig& c, auto& k, auto& v) { c.report.gbdt.learning_rate = to_real(k, v); }},
      {"gbdt.min_samples_split",
       [](RunConfig& c, auto& k, auto& v) { c.report.gbdt.min_samples_split = to_count(k, v); }},
      {"gbdt.min_samples_leaf", [](RunConfig& c, auto& k, auto& v) { c.report.gbdt.min_samples_leaf = to_count(k, v); }},
      {"input.format",
       [](RunConfig& c, auto& k, auto& v) {
         auto f = parse_stream_format(v);
         if (!f) throw ConfigError(k + ": unknown stream format '" + v + "'");
         c.format = *f;
       }},
      {"run.seed", [](RunConfig& c, auto& k, auto& v) { c.seed = to_u64(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::finalize() {
  if (monitor.reference_size == 0 || monitor.target_size == 0) {
    if (!avg_daily_events) throw ConfigError("set windows.reference_size and windows.target_size, or windows.avg_daily_events");
    const auto sizes = default_sizes(*avg_daily_events, monitor.bin_count);
    if (monitor.reference_size == 0) monitor.reference_size = sizes.reference;
    if (monitor.target_size == 0) monitor.target_size = sizes.target;
  }
  report.bin_count = monitor.bin_count;
  monitor.seed = seed;
  report.seed = seed;
  filter.seed = seed;
  if (report_workers == 0) throw ConfigError("report.workers must be at least 1");
  if (report.cv_folds < 2) throw ConfigError("report.cv_folds must be at least 2");
  if (report.gbdt.trees == 0 || report.gbdt.max_depth == 0) throw ConfigError("gbdt trees and depth must be positive");
  if (!(report.gbdt.learning_rate > 0.0)) throw ConfigError("gbdt.learning_rate must be positive");
  if (!(filter.alpha > 0.0 && filter.alpha < 1.0 && filter.p > 0.0 && filter.p < 1.0)) {
    throw ConfigError("filter.alpha and filter.p must be in (0, 1)");
  }
  if (report.curve_step && *report.curve_step == 0) throw ConfigError("report.curve_step must be positive");
  monitor.validate();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {
      {"windows.reference_size", monitor.reference_size},
      {"windows.target_size", monitor.target_size},
      {"signal.bin_count", monitor.bin_count},
      {"threshold.percentile", monitor.threshold_percentile},
      {"sketch.bins", monitor.sketch_bins},
      {"sketch.policy", to_string(monitor.policy)},
      {"alarm.refractory_events", monitor.refractory()},
      {"alarm.min_signal_samples", monitor.burn_in_samples()},
      {"alarm.snapshot", to_string(monitor.snapshot_mode)},
      {"valley.percentile", monitor.valley_percentile},
      {"debug.landmark", monitor.track_landmark},
      {"filter.alpha", filter.alpha},
      {"filter.p", filter.p},
      {"filter.sample_size", filter.sample_size},
      {"report.top_features", report.top_features},
      {"report.top_events", report.top_events},
      {"report.cv_folds", report.cv_folds},
      {"report.workers", report_workers},
      {"gbdt.trees", report.gbdt.trees},
      {"gbdt.max_depth", report.gbdt.max_depth},
      {"gbdt.learning_rate", report.gbdt.learning_rate},
      {"gbdt.min_samples_split", report.gbdt.min_samples_split},
      {"gbdt.min_samples_leaf", report.gbdt.min_samples_leaf},
      {"run.seed", seed},
  };
  if (avg_daily_events) j["windows.avg_daily_events"] = *avg_daily_events;
  if (report.curve_step) j["report.curve_step"] = *report.curve_step;
  if (report.curve_max_k) j["report.curve_max_k"] = *report.curve_max_k;
  if (format) j["input.format"] = *format == StreamFormat::csv ? "csv" : "jsonl";
  return j;
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(number) + ": unknown key '" + key + "'");
    it->second(config, key, value);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace scorewatch

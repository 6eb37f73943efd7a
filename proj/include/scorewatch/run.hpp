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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "scorewatch/config.hpp"

namespace scorewatch {

struct MonitorArgs {
  std::filesystem::path input;
  std::filesystem::path schema;
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  bool debug_landmark = false;
};

struct RunSummary {
  std::size_t events = 0;
  std::size_t signal_points = 0;
  std::size_t alarms = 0;
  std::size_t valleys = 0;
  std::string input_sha256;
};

/// Replays a stream and writes signal.csv, valleys.csv, reports/ and
/// manifest.json under out. Throws StreamError, ConfigError or Error.
RunSummary run_monitor(std::istream& input, const std::string& input_name, const FeatureSchema& schema,
                       StreamFormat format, RunConfig config, const std::filesystem::path& out);

/// CLI entry points; diagnostics go to err. Exit codes: 0 ok, 1 input error,
/// 2 configuration error.
int cmd_monitor(const MonitorArgs& args, std::ostream& err);
int cmd_generate(const std::filesystem::path& spec, const std::filesystem::path& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run, std::size_t alarm_id, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace scorewatch

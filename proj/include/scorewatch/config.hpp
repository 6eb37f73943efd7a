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
#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include <json.hpp>

#include "scorewatch/explain.hpp"
#include "scorewatch/monitor.hpp"
#include "scorewatch/report.hpp"
#include "scorewatch/stream_model.hpp"

namespace scorewatch {

/// Everything a monitoring run reads from its config file.
struct RunConfig {
  MonitorConfig monitor;
  ReportConfig report;
  explain::FilterParams filter;
  std::optional<double> avg_daily_events;  // sizes the windows when they are not given
  std::size_t report_workers = 2;
  std::optional<StreamFormat> format;  // default: from the input file extension
  std::uint64_t seed = 0;

  /// Applies the seed everywhere and fills in derived window sizes.
  void finalize();
  nlohmann::json to_json() const;
};

/// Flat "section.key = value" lines; '#' starts a comment. Unknown keys and
/// bad values throw ConfigError.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace scorewatch

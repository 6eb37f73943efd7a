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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scorewatch/explain.hpp"
#include "scorewatch/gbdt.hpp"
#include "scorewatch/monitor.hpp"
#include "scorewatch/stream_model.hpp"

namespace scorewatch {

struct ReportConfig {
  std::size_t bin_count = 100;
  std::size_t top_features = 10;
  std::size_t top_events = 100;
  std::size_t cv_folds = 5;
  gbdt::Params gbdt;
  std::optional<std::size_t> curve_step;   // default: max(1, |T| / 50)
  std::optional<std::size_t> curve_max_k;  // default: |T| / 2
  std::uint64_t seed = 0;
};

struct AlarmReport {
  nlohmann::json document;
  explain::ValidationCurve curve;
  gbdt::CvResult cv;
  std::vector<explain::RankedEvent> ranking;

  std::size_t alarm_id() const { return document.at("alarm_id").get<std::size_t>(); }
};

AlarmReport build_report(const AlarmTrigger& trigger, const explain::MicFilterResult& filter,
                         const FeatureSchema& schema, const ReportConfig& config);

/// Markdown rendering of a report document.
std::string render_markdown(const nlohmann::json& report);

void write_validation_csv(std::ostream& out, const nlohmann::json& report);
void write_roc_csv(std::ostream& out, const nlohmann::json& report);

}  // namespace scorewatch

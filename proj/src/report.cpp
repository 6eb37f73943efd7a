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

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "scorewatch/report.hpp"
#include "scorewatch/rng.hpp"

namespace scorewatch {

namespace {

using nlohmann::json;

json point_json(const SignalPoint& p) {
  return {{"event_index", p.event_index}, {"timestamp", p.timestamp}, {"signal", p.signal},
          {"threshold", p.threshold}};
}

json window_json(const std::vector<Event>& events, std::uint64_t first_index) {
  json w = {{"first_index", first_index}, {"size", events.size()}};
  if (!events.empty()) {
    w["start_timestamp"] = events.front().timestamp;
    w["end_timestamp"] = events.back().timestamp;
  }
  return w;
}

json value_json(const FeatureValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return nullptr;
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string md_escape(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

AlarmReport build_report(const AlarmTrigger& trigger, const explain::MicFilterResult& filter,
                         const FeatureSchema& schema, const ReportConfig& config) {
  const WindowSnapshot& snap = *trigger.snapshot;
  const std::uint64_t base = mix_seed(config.seed, 0x5eed0000ULL + trigger.alarm_id);

  AlarmReport report;
  std::vector<std::string> warnings = filter.warnings;

  auto encoded = explain::encode(snap, schema, filter);
  warnings.insert(warnings.end(), encoded.warnings.begin(), encoded.warnings.end());

  const auto model = gbdt::fit(encoded.matrix, config.gbdt);
  report.ranking = explain::rank_target_events(model, encoded, snap.target_first_index());

  const std::size_t n_t = snap.target.size();
  const std::size_t step = config.curve_step.value_or(std::max<std::size_t>(1, n_t / 50));
  const std::size_t max_k = std::min(config.curve_max_k.value_or(n_t / 2), n_t - 1);
  report.curve = explain::validation_curve(snap, report.ranking, step, max_k, mix_seed(base, 1), config.bin_count);

  report.cv = gbdt::kfold_auc(encoded.matrix, config.cv_folds, config.gbdt, mix_seed(base, 2));
  warnings.insert(warnings.end(), report.cv.warnings.begin(), report.cv.warnings.end());

  const auto importance = gbdt::feature_importance(model);
  json top_features = json::array();
  for (std::size_t i = 0; i < importance.size() && i < config.top_features; ++i) {
    top_features.push_back({{"name", importance[i].first}, {"gain", importance[i].second}});
  }

  // Table columns: model columns by importance, then filtered-out features.
  std::vector<std::string> columns;
  std::vector<int> source;  // schema index, or -1 for the score
  for (const auto& [name, gain] : importance) {
    columns.push_back(name);
    source.push_back(name == explain::kScoreColumn ? -1 : static_cast<int>(*schema.index_of(name)));
  }
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (f < filter.features.size() && filter.removed(f)) {
      columns.push_back(schema[f].name);
      source.push_back(static_cast<int>(f));
    }
  }

  json rows = json::array();
  const std::size_t shown = std::min(config.top_events, report.ranking.size());
  for (std::size_t r = 0; r < shown; ++r) {
    const auto& ranked = report.ranking[r];
    const Event& e = snap.target[ranked.position];
    json values = json::array();
    for (int s : source) values.push_back(s < 0 ? json(e.score) : value_json(e.features.at(s)));
    json extras = json::object();
    for (const auto& [k, v] : e.extras) extras[k] = v;
    rows.push_back({{"rank", r + 1},
                    {"event_index", ranked.event_index},
                    {"timestamp", e.timestamp},
                    {"alarm_score", ranked.alarm_score},
                    {"values", std::move(values)},
                    {"extras", std::move(extras)}});
  }

  json rocs = json::array();
  for (const auto& fold : report.cv.roc) {
    json pts = json::array();
    for (const auto& p : fold) pts.push_back({p.fpr, p.tpr});
    rocs.push_back(std::move(pts));
  }

  report.document = {
      {"alarm_id", trigger.alarm_id},
      {"trigger", point_json(trigger.trigger)},
      {"snapshot", point_json(trigger.snapshot_point)},
      {"windows",
       {{"reference", window_json(snap.reference, snap.first_index)},
        {"target", window_json(snap.target, snap.target_first_index())}}},
      {"feature_importance", std::move(top_features)},
      {"discriminator",
       {{"trees", model.trees.size()},
        {"degenerate", model.degenerate},
        {"cv_folds", report.cv.folds},
        {"cv_mean_auc", report.cv.mean_auc},
        {"cv_fold_aucs", report.cv.fold_aucs},
        {"roc", std::move(rocs)}}},
      {"validation_curve", report.curve.to_json()},
      {"top_events", {{"columns", columns}, {"rows", std::move(rows)}}},
      {"time_correlation_filter", filter.to_json()},
      {"mic_estimator", explain::kMicEstimator},
      {"warnings", warnings},
  };
  return report;
}

std::string render_markdown(const json& r) {
  std::ostringstream md;
  const auto& trig = r.at("trigger");
  const auto& snap = r.at("snapshot");
  md << "# Alarm " << r.at("alarm_id").get<std::size_t>() << "\n\n";
  md << "- Trigger event: " << trig.at("event_index") << " (timestamp " << trig.at("timestamp") << ")\n";
  md << "- Signal: " << fixed(trig.at("signal").get<double>(), 6) << " sh, threshold "
     << fixed(trig.at("threshold").get<double>(), 6) << " sh\n";
  md << "- Snapshot event: " << snap.at("event_index") << ", signal " << fixed(snap.at("signal").get<double>(), 6)
     << " sh\n\n";

  md << "## Windows\n\n| window | first event | size | start | end |\n|---|---|---|---|---|\n";
  for (const char* name : {"reference", "target"}) {
    const auto& w = r.at("windows").at(name);
    md << "| " << name << " | " << w.at("first_index") << " | " << w.at("size") << " | "
       << w.value("start_timestamp", json()).dump() << " | " << w.value("end_timestamp", json()).dump() << " |\n";
  }

  md << "\n## Feature importance\n\n| rank | feature | gain |\n|---|---|---|\n";
  std::size_t rank = 1;
  for (const auto& f : r.at("feature_importance")) {
    md << "| " << rank++ << " | " << md_escape(f.at("name").get<std::string>()) << " | "
       << fixed(f.at("gain").get<double>()) << " |\n";
  }

  const auto& disc = r.at("discriminator");
  md << "\n## Discriminator\n\n";
  md << "- Cross-validated AUC (" << disc.at("cv_folds") << " folds): " << fixed(disc.at("cv_mean_auc").get<double>())
     << "\n- Trees: " << disc.at("trees") << "\n";

  const auto& curve = r.at("validation_curve");
  md << "\n## Validation curve\n\n| k | ranked removal | random removal |\n|---|---|---|\n";
  for (std::size_t i = 0; i < curve.at("k").size(); ++i) {
    md << "| " << curve.at("k")[i] << " | " << fixed(curve.at("ranked_removal")[i].get<double>(), 6) << " | "
       << fixed(curve.at("random_removal")[i].get<double>(), 6) << " |\n";
  }

  const auto& top = r.at("top_events");
  md << "\n## Top events\n\n| rank | event | timestamp | alarm score |";
  for (const auto& c : top.at("columns")) md << ' ' << md_escape(c.get<std::string>()) << " |";
  md << " extras |\n|---|---|---|---|";
  for (std::size_t i = 0; i < top.at("columns").size(); ++i) md << "---|";
  md << "---|\n";
  for (const auto& row : top.at("rows")) {
    md << "| " << row.at("rank") << " | " << row.at("event_index") << " | " << row.at("timestamp") << " | "
       << fixed(row.at("alarm_score").get<double>()) << " |";
    for (const auto& v : row.at("values")) md << ' ' << md_escape(cell(v)) << " |";
    std::string extras;
    for (const auto& [k, v] : row.at("extras").items()) {
      if (!extras.empty()) extras += ", ";
      extras += k + "=" + v.get<std::string>();
    }
    md << ' ' << md_escape(extras) << " |\n";
  }

  const auto& filter = r.at("time_correlation_filter");
  md << "\n## Time-correlated features\n\nEstimator: " << r.at("mic_estimator").get<std::string>() << "\n\n";
  md << "| feature | MIC | shuffle max | removed |\n|---|---|---|---|\n";
  for (const auto& f : filter.at("features")) {
    md << "| " << md_escape(f.at("name").get<std::string>()) << " | " << fixed(f.at("mic").get<double>()) << " | "
       << fixed(f.at("shuffle_threshold").get<double>()) << " | " << (f.at("removed").get<bool>() ? "yes" : "no")
       << " |\n";
  }

  if (!r.at("warnings").empty()) {
    md << "\n## Warnings\n\n";
    for (const auto& w : r.at("warnings")) md << "- " << w.get<std::string>() << "\n";
  }
  return md.str();
}

void write_validation_csv(std::ostream& out, const json& r) {
  const auto& c = r.at("validation_curve");
  out << "k,ranked_removal,random_removal\n";
  for (std::size_t i = 0; i < c.at("k").size(); ++i) {
    out << c.at("k")[i].get<std::size_t>() << ',' << format_double(c.at("ranked_removal")[i].get<double>()) << ','
        << format_double(c.at("random_removal")[i].get<double>()) << '\n';
  }
}

void write_roc_csv(std::ostream& out, const json& r) {
  out << "fold,fpr,tpr\n";
  std::size_t fold = 0;
  for (const auto& pts : r.at("discriminator").at("roc")) {
    for (const auto& p : pts) {
      out << fold << ',' << format_double(p[0].get<double>()) << ',' << format_double(p[1].get<double>()) << '\n';
    }
    ++fold;
  }
}

}  // namespace scorewatch

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

#include "scorewatch/stream_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <system_error>

#include "scorewatch/error.hpp"

namespace scorewatch {

namespace {

constexpr const char* kExtraPrefix = "extra.";

bool parse_int64(std::string_view text, std::int64_t& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Returns false on malformed text; NaN / inf spellings parse successfully.
bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

FeatureValue numeric_value(double value) {
  if (!std::isfinite(value)) return Missing{};
  return value;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) throw ConfigError("schema: empty feature name");
    if (f.name == "timestamp" || f.name == "score" || f.name.rfind(kExtraPrefix, 0) == 0) {
      throw ConfigError("schema: reserved feature name '" + f.name + "'");
    }
    if (!seen.insert(f.name).second) throw ConfigError("schema: duplicate feature '" + f.name + "'");
  }
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw ConfigError("schema: expected an object with a 'features' array");
  }
  std::vector<FeatureSpec> specs;
  for (const auto& item : doc["features"]) {
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string()) {
      throw ConfigError("schema: every feature needs a string 'name'");
    }
    FeatureSpec spec;
    spec.name = item["name"].get<std::string>();
    const std::string kind = item.value("kind", std::string("numeric"));
    if (kind == "numeric") {
      spec.kind = FeatureKind::numeric;
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::categorical;
    } else {
      throw ConfigError("schema: unknown kind '" + kind + "' for feature '" + spec.name + "'");
    }
    specs.push_back(std::move(spec));
  }
  return FeatureSchema(std::move(specs));
}

FeatureSchema FeatureSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("schema file " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : features_) {
    features.push_back({{"name", f.name}, {"kind", f.kind == FeatureKind::numeric ? "numeric" : "categorical"}});
  }
  return {{"features", features}};
}

std::optional<std::size_t> FeatureSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<StreamFormat> parse_stream_format(const std::string& name) {
  if (name == "csv") return StreamFormat::csv;
  if (name == "jsonl" || name == "json") return StreamFormat::jsonl;
  return std::nullopt;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && current.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
      was_quoted = false;
    } else if (c == '\r' && i + 1 == line.size()) {
      // tolerate CRLF
    } else {
      current.push_back(c);
    }
  }
  if (quoted) throw std::invalid_argument("unterminated quoted field");
  fields.push_back(std::move(current));
  return fields;
}

std::string quote_csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string csv_header(const FeatureSchema& schema, const std::vector<std::string>& extra_keys) {
  std::string out = "timestamp,score";
  for (const auto& f : schema.features()) out += "," + quote_csv_field(f.name);
  for (const auto& k : extra_keys) out += "," + quote_csv_field(kExtraPrefix + k);
  return out;
}

std::string to_csv_row(const Event& event, const std::vector<std::string>& extra_keys) {
  std::string out = std::to_string(event.timestamp) + "," + format_double(event.score);
  for (const auto& value : event.features) {
    out.push_back(',');
    if (const auto* d = std::get_if<double>(&value)) {
      out += format_double(*d);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
      out += quote_csv_field(*s);
    }
  }
  for (const auto& k : extra_keys) {
    out.push_back(',');
    if (auto it = event.extras.find(k); it != event.extras.end()) out += quote_csv_field(it->second);
  }
  return out;
}

EventReader::EventReader(std::istream& source, FeatureSchema schema, StreamFormat format)
    : source_(source), schema_(std::move(schema)), format_(format) {}

void EventReader::read_header() {
  header_done_ = true;
  if (format_ != StreamFormat::csv) return;
  std::string text;
  if (!std::getline(source_, text)) return;
  ++line_;
  std::vector<std::string> names;
  try {
    names = split_csv_record(text);
  } catch (const std::invalid_argument& e) {
    throw StreamError(StreamError::Kind::malformed, line_, std::string("header: ") + e.what());
  }
  column_count_ = names.size();
  std::optional<std::size_t> ts, score;
  std::vector<std::optional<std::size_t>> features(schema_.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::string name(trim(names[c]));
    if (name == "timestamp") {
      ts = c;
    } else if (name == "score") {
      score = c;
    } else if (name.rfind(kExtraPrefix, 0) == 0) {
      extra_columns_.push_back(c);
      extra_names_.push_back(name.substr(std::char_traits<char>::length(kExtraPrefix)));
    } else if (auto idx = schema_.index_of(name)) {
      features[*idx] = c;
    } else {
      throw StreamError(StreamError::Kind::malformed, line_, "header: unexpected column '" + name + "'");
    }
  }
  if (!ts) throw StreamError(StreamError::Kind::malformed, line_, "header: missing 'timestamp' column");
  if (!score) throw StreamError(StreamError::Kind::malformed, line_, "header: missing 'score' column");
  timestamp_column_ = *ts;
  score_column_ = *score;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!features[i]) {
      throw StreamError(StreamError::Kind::malformed, line_,
                        "header: missing feature column '" + schema_[i].name + "'");
    }
    feature_columns_.push_back(*features[i]);
  }
}

std::optional<Event> EventReader::next() {
  if (!header_done_) read_header();
  std::string text;
  while (std::getline(source_, text)) {
    ++line_;
    if (trim(text).empty()) continue;
    Event event = format_ == StreamFormat::csv ? parse_csv(text) : parse_json(text);
    validate(event);
    ++events_;
    return event;
  }
  return std::nullopt;
}

Event EventReader::parse_csv(const std::string& text) {
  std::vector<std::string> cells;
  try {
    cells = split_csv_record(text);
  } catch (const std::invalid_argument& e) {
    throw StreamError(StreamError::Kind::malformed, line_, e.what());
  }
  if (cells.size() != column_count_) {
    throw StreamError(StreamError::Kind::malformed, line_,
                      "expected " + std::to_string(column_count_) + " fields, got " + std::to_string(cells.size()));
  }
  Event event;
  if (!parse_int64(trim(cells[timestamp_column_]), event.timestamp)) {
    throw StreamError(StreamError::Kind::malformed, line_, "bad timestamp '" + cells[timestamp_column_] + "'");
  }
  if (!parse_double(trim(cells[score_column_]), event.score)) {
    throw StreamError(StreamError::Kind::malformed, line_, "bad score '" + cells[score_column_] + "'");
  }
  event.features.reserve(schema_.size());
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    const std::string& cell = cells[feature_columns_[i]];
    if (schema_[i].kind == FeatureKind::categorical) {
      if (cell.empty()) {
        event.features.emplace_back(Missing{});
      } else {
        event.features.emplace_back(cell);
      }
      continue;
    }
    const auto value = trim(cell);
    if (value.empty()) {
      event.features.emplace_back(Missing{});
      continue;
    }
    double parsed = 0.0;
    if (!parse_double(value, parsed)) {
      throw StreamError(StreamError::Kind::malformed, line_,
                        "bad numeric value '" + cell + "' for feature '" + schema_[i].name + "'");
    }
    event.features.push_back(numeric_value(parsed));
  }
  for (std::size_t i = 0; i < extra_columns_.size(); ++i) {
    const std::string& cell = cells[extra_columns_[i]];
    if (!cell.empty()) event.extras.emplace(extra_names_[i], cell);
  }
  return event;
}

Event EventReader::parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw StreamError(StreamError::Kind::malformed, line_, e.what());
  }
  if (!doc.is_object()) throw StreamError(StreamError::Kind::malformed, line_, "expected a JSON object");
  Event event;
  const auto ts = doc.find("timestamp");
  if (ts == doc.end() || !ts->is_number_integer()) {
    throw StreamError(StreamError::Kind::malformed, line_, "missing or non-integer 'timestamp'");
  }
  event.timestamp = ts->get<std::int64_t>();
  const auto score = doc.find("score");
  if (score == doc.end() || !score->is_number()) {
    throw StreamError(StreamError::Kind::malformed, line_, "missing or non-numeric 'score'");
  }
  event.score = score->get<double>();
  event.features.reserve(schema_.size());
  for (const auto& spec : schema_.features()) {
    const auto it = doc.find(spec.name);
    if (it == doc.end() || it->is_null()) {
      event.features.emplace_back(Missing{});
    } else if (spec.kind == FeatureKind::numeric) {
      if (!it->is_number()) {
        throw StreamError(StreamError::Kind::malformed, line_, "non-numeric value for feature '" + spec.name + "'");
      }
      event.features.push_back(numeric_value(it->get<double>()));
    } else if (it->is_string()) {
      const auto s = it->get<std::string>();
      if (s.empty()) {
        event.features.emplace_back(Missing{});
      } else {
        event.features.emplace_back(s);
      }
    } else {
      event.features.emplace_back(it->dump());
    }
  }
  for (const auto& [key, value] : doc.items()) {
    if (key.rfind(kExtraPrefix, 0) != 0) {
      if (key != "timestamp" && key != "score" && !schema_.index_of(key)) {
        throw StreamError(StreamError::Kind::malformed, line_, "unexpected key '" + key + "'");
      }
      continue;
    }
    const std::string name = key.substr(std::char_traits<char>::length(kExtraPrefix));
    if (value.is_null()) continue;
    event.extras.emplace(name, value.is_string() ? value.get<std::string>() : value.dump());
  }
  return event;
}

void EventReader::validate(const Event& event) {
  if (!(event.score >= 0.0 && event.score <= 1.0)) {
    throw StreamError(StreamError::Kind::rejected, line_,
                      "score " + format_double(event.score) + " outside [0, 1]");
  }
  if (last_timestamp_ && event.timestamp < *last_timestamp_) {
    throw StreamError(StreamError::Kind::ordering, line_,
                      "timestamp " + std::to_string(event.timestamp) + " precedes " +
                          std::to_string(*last_timestamp_));
  }
  last_timestamp_ = event.timestamp;
}

}  // namespace scorewatch

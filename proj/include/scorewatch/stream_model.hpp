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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace scorewatch {

struct Missing {
  bool operator==(const Missing&) const = default;
};

/// Numeric(real) | Categorical(string) | Missing.
using FeatureValue = std::variant<Missing, double, std::string>;

/// Numeric value with NaN and infinities normalized to Missing.
FeatureValue numeric_value(double value);

inline bool is_missing(const FeatureValue& v) { return std::holds_alternative<Missing>(v); }

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
};

/// Ordered, name-unique feature declaration for a stream.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  /// {"features": [{"name": "amount", "kind": "numeric"}, ...]}
  static FeatureSchema from_json(const nlohmann::json& doc);
  static FeatureSchema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t i) const { return features_[i]; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  std::optional<std::size_t> index_of(const std::string& name) const;

 private:
  std::vector<FeatureSpec> features_;
};

/// One scored transaction.
struct Event {
  std::int64_t timestamp = 0;  // epoch milliseconds
  double score = 0.0;          // in [0, 1]
  std::vector<FeatureValue> features;
  std::map<std::string, std::string> extras;  // display-only

  bool operator==(const Event&) const = default;
};

enum class StreamFormat { csv, jsonl };

std::optional<StreamFormat> parse_stream_format(const std::string& name);

/// Single-pass reader over CSV or JSON-lines input. Throws StreamError.
class EventReader {
 public:
  EventReader(std::istream& source, FeatureSchema schema, StreamFormat format);

  /// Next event in file order, or nullopt at end of input.
  std::optional<Event> next();

  /// 1-based line number of the last line consumed.
  std::size_t line() const { return line_; }
  std::size_t events_read() const { return events_; }
  const FeatureSchema& schema() const { return schema_; }
  /// Extra column names (without the "extra." prefix) seen in the CSV header.
  const std::vector<std::string>& extra_columns() const { return extra_names_; }

 private:
  void read_header();
  Event parse_csv(const std::string& text);
  Event parse_json(const std::string& text);
  void validate(const Event& event);

  std::istream& source_;
  FeatureSchema schema_;
  StreamFormat format_;
  std::size_t line_ = 0;
  std::size_t events_ = 0;
  std::optional<std::int64_t> last_timestamp_;
  bool header_done_ = false;
  // CSV column layout.
  std::size_t column_count_ = 0;
  std::size_t timestamp_column_ = 0;
  std::size_t score_column_ = 0;
  std::vector<std::size_t> feature_columns_;
  std::vector<std::size_t> extra_columns_;
  std::vector<std::string> extra_names_;
};

/// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_record(const std::string& line);
std::string quote_csv_field(const std::string& field);

/// Shortest round-trip text form of a double.
std::string format_double(double value);

std::string csv_header(const FeatureSchema& schema, const std::vector<std::string>& extra_keys = {});
std::string to_csv_row(const Event& event, const std::vector<std::string>& extra_keys = {});

}  // namespace scorewatch

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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scorewatch/rng.hpp"
#include "scorewatch/stream_model.hpp"

namespace scorewatch::synthetic {

struct BetaComponent {
  double weight = 1.0;
  double alpha = 2.0;
  double beta = 2.0;
};

/// Mixture of beta distributions on [0, 1].
struct ScoreMixture {
  std::vector<BetaComponent> components;
  double sample(Rng& rng) const;
};

struct NumericParams {
  double mean = 0.0;
  double stddev = 1.0;
  double trend = 0.0;  // added per event index
  std::optional<std::size_t> step_at;
  double step_shift = 0.0;
};

struct FeatureGenerator {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  NumericParams numeric;
  std::vector<std::pair<std::string, double>> categories;  // weights
  double missing_rate = 0.0;
};

struct FeatureOverride {
  std::optional<double> mean;
  std::optional<double> stddev;
  std::vector<std::pair<std::string, double>> categories;
};

struct DriftSegment {
  std::size_t start = 0;
  std::size_t length = 0;
  std::optional<ScoreMixture> score;
  std::map<std::string, FeatureOverride> features;
};

struct SyntheticSpec {
  std::size_t events = 0;
  std::uint64_t seed = 0;
  std::int64_t start_timestamp = 1'700'000'000'000;
  std::int64_t interval_ms = 1000;
  ScoreMixture score;
  std::vector<FeatureGenerator> features;
  std::vector<DriftSegment> drifts;

  /// Throws ConfigError on malformed specs and overlapping or out-of-range drifts.
  static SyntheticSpec from_json(const nlohmann::json& doc);
  void validate() const;
  FeatureSchema schema() const;
};

/// Deterministic event source for a spec.
class Generator {
 public:
  explicit Generator(SyntheticSpec spec);

  bool done() const { return index_ >= spec_.events; }
  std::size_t index() const { return index_; }
  /// Next event; sets drifted when it falls inside a drift segment.
  Event next(bool* drifted = nullptr);
  const FeatureSchema& schema() const { return schema_; }

 private:
  const DriftSegment* segment_at(std::size_t i) const;

  SyntheticSpec spec_;
  FeatureSchema schema_;
  Rng rng_;
  std::size_t index_ = 0;
};

struct GeneratedFiles {
  std::filesystem::path stream;
  std::filesystem::path truth;
  std::filesystem::path schema;
  std::size_t events = 0;
  std::size_t drifted = 0;
};

/// Writes the CSV stream, a truth file (one drifted event index per line)
/// and the schema next to it.
GeneratedFiles write(const SyntheticSpec& spec, const std::filesystem::path& out);

}  // namespace scorewatch::synthetic

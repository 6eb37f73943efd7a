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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scorewatch/gbdt.hpp"
#include "scorewatch/stream_model.hpp"
#include "scorewatch/windows.hpp"

namespace scorewatch::explain {

/// Maximal information coefficient over equi-frequency grids: the maximum of
/// I(X_a; T_b) / log2(min(a, b)) over a, b >= 2 with a * b <= n^0.6, where each
/// axis is cut into equal-count groups by rank (tied values share a group).
/// Returns 0 when either series is constant. Throws RangeError if the lengths
/// differ or n < 50.
double mic(std::span<const double> x, std::span<const double> t);

inline constexpr const char* kMicEstimator = "equi-frequency grid, a*b <= n^0.6";

/// Smallest M with 1 - (1 - alpha)^M >= p. Throws RangeError outside (0, 1).
std::size_t shuffle_count(double alpha, double p);

struct FeatureMic {
  std::string name;
  double mic = 0.0;
  double shuffle_threshold = 0.0;  // max MIC over the shuffled series
  bool removed = false;
  std::size_t shuffle_count = 0;
  std::string warning;
};

struct MicFilterResult {
  std::vector<FeatureMic> features;  // schema order
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  bool removed(std::size_t feature) const { return features.at(feature).removed; }
  std::vector<std::string> removed_names() const;
  nlohmann::json to_json() const;
};

struct FilterParams {
  double alpha = 0.05;
  double p = 0.95;
  std::size_t sample_size = 1000;
  std::uint64_t seed = 0;
};

/// Flags features whose MIC against arrival order beats every one of M
/// shuffled copies. Samples sample_size uniformly spaced burn-in events.
MicFilterResult time_correlation_filter(std::span<const Event> burn_in, const FeatureSchema& schema,
                                        const FilterParams& params = {});

/// Frequency-rank codes: most frequent category -> 1, next -> 2, ...;
/// missing -> 0. Ties in frequency resolve by category name.
std::vector<double> category_codes(std::span<const FeatureValue> values);

struct EncodedWindows {
  gbdt::TrainingMatrix matrix;             // reference rows (label 0) then target rows (label 1)
  std::vector<std::size_t> kept_features;  // schema indices, column order; model_score is last
  std::size_t reference_rows = 0;
  std::size_t target_rows = 0;
  std::vector<std::string> warnings;
};

inline constexpr const char* kScoreColumn = "model_score";

EncodedWindows encode(const WindowSnapshot& snapshot, const FeatureSchema& schema, const MicFilterResult& filter);

struct RankedEvent {
  std::size_t position = 0;  // offset into the target window
  std::uint64_t event_index = 0;
  double alarm_score = 0.0;
};

/// Target-window events by predicted probability, highest first; ties put
/// the newest event first.
std::vector<RankedEvent> rank_target_events(const gbdt::TreeEnsemble& model, const EncodedWindows& encoded,
                                            std::uint64_t target_first_index);

struct ValidationCurve {
  std::vector<std::size_t> k;
  std::vector<double> ranked;  // jsd(R, T without the top-k ranked events)
  std::vector<double> random;  // jsd(R, T without k random events)
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

/// k runs over 0, step, 2 step, ... and ends at max_k. Throws RangeError
/// unless max_k < |T| and step >= 1.
ValidationCurve validation_curve(const WindowSnapshot& snapshot, std::span<const RankedEvent> ranking,
                                 std::size_t step, std::size_t max_k, std::uint64_t seed,
                                 std::size_t bin_count = 100);

}  // namespace scorewatch::explain

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
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scorewatch/rng.hpp"

namespace scorewatch {

enum class DirectionPolicy { left_right, right_left, bidirectional_average, alternate, random };

std::string to_string(DirectionPolicy policy);
std::optional<DirectionPolicy> parse_direction_policy(const std::string& name);

/// One left-to-right wall-moving pass over the n+1 percentile positions.
///
/// `count` is the number of values consumed before `x`. Every bin holds
/// count/n values before the pass; the pass restores the equal-count
/// invariant for (count+1)/n after adding `x`. Deficit bins grow rightwards
/// by eating the next bin at its density; once x's bin is passed the
/// surplus bins shed into their right neighbour at their own density.
/// A zero-width bin has infinite density, so walls bordering it do not move.
void update_percentiles(std::span<double> positions, double x, double count);

/// Mirror-image pass: -Reverse(update(Reverse(-P), -x)).
void update_percentiles_reversed(std::span<double> positions, double x, double count);

/// SPEAR streaming percentile estimator with n bins (n+1 wall positions).
/// O(n) time per value and constant space.
class PercentileSketch {
 public:
  explicit PercentileSketch(std::size_t bins = 100, DirectionPolicy policy = DirectionPolicy::random,
                            std::uint64_t seed = 0);

  /// Throws RejectedValueError for non-finite values.
  void consume(double x);

  /// Linear interpolation between walls on the equal-mass assumption.
  /// q in [0, 100] else RangeError; WarmUpError before n+1 values.
  double percentile(double q) const;

  bool initialized() const { return count_ >= bins_ + 1; }
  std::uint64_t count() const { return count_; }
  std::size_t bins() const { return bins_; }
  DirectionPolicy policy() const { return policy_; }
  const std::vector<double>& positions() const { return positions_; }

  /// Checkpoint: positions, count, bins, policy and RNG state.
  nlohmann::json to_json() const;
  static PercentileSketch from_json(const nlohmann::json& doc);

 private:
  void insert_initial(double x);

  std::size_t bins_;
  DirectionPolicy policy_;
  std::vector<double> positions_;
  std::vector<double> scratch_;
  std::uint64_t count_ = 0;
  bool next_forward_ = true;
  Rng rng_;
};

}  // namespace scorewatch

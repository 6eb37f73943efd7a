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

#include "scorewatch/spear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scorewatch/error.hpp"

namespace scorewatch {

std::string to_string(DirectionPolicy policy) {
  switch (policy) {
    case DirectionPolicy::left_right: return "left_right";
    case DirectionPolicy::right_left: return "right_left";
    case DirectionPolicy::bidirectional_average: return "bidirectional_average";
    case DirectionPolicy::alternate: return "alternate";
    case DirectionPolicy::random: return "random";
  }
  return "random";
}

std::optional<DirectionPolicy> parse_direction_policy(const std::string& name) {
  if (name == "left_right") return DirectionPolicy::left_right;
  if (name == "right_left") return DirectionPolicy::right_left;
  if (name == "bidirectional_average" || name == "bidirectional") return DirectionPolicy::bidirectional_average;
  if (name == "alternate") return DirectionPolicy::alternate;
  if (name == "random") return DirectionPolicy::random;
  return std::nullopt;
}

void update_percentiles(std::span<double> p, double x, double count) {
  const std::size_t n = p.size() - 1;
  const double per_bin = count / static_cast<double>(n);
  const double target = (count + 1.0) / static_cast<double>(n);

  double current = per_bin;  // count held by bin i while visiting wall i
  if (x < p[0]) p[0] = x;
  if (x < p[1]) current += 1.0;

  for (std::size_t i = 1; i < n; ++i) {
    const double deficit = target - current;
    if (deficit > 0.0) {
      const double next_count = x < p[i + 1] ? 1.0 + per_bin : per_bin;
      const double width = p[i + 1] - p[i];
      if (width > 0.0) {
        const double density = next_count / width;
        p[i] += deficit / density;
        current = density * (p[i + 1] - p[i]);
      } else {
        current = next_count - deficit;
      }
    } else {
      const double width = p[i] - p[i - 1];
      if (width > 0.0) {
        const double density = current / width;
        p[i] += deficit / density;
      }
      current = per_bin - deficit;
    }
  }
  if (x > p[n]) p[n] = x;

  // Rounding can only push a wall past its neighbour by a few ulps.
  for (std::size_t i = 1; i <= n; ++i) p[i] = std::max(p[i], p[i - 1]);
}

namespace {

void negate_reverse(std::span<double> p) {
  std::reverse(p.begin(), p.end());
  for (double& v : p) v = -v;
}

}  // namespace

void update_percentiles_reversed(std::span<double> p, double x, double count) {
  negate_reverse(p);
  update_percentiles(p, -x, count);
  negate_reverse(p);
}

PercentileSketch::PercentileSketch(std::size_t bins, DirectionPolicy policy, std::uint64_t seed)
    : bins_(bins), policy_(policy), rng_(seed) {
  if (bins < 2) throw ConfigError("percentile sketch needs at least 2 bins");
  positions_.reserve(bins + 1);
  scratch_.resize(bins + 1);
}

void PercentileSketch::insert_initial(double x) {
  // Keep initial walls strictly increasing.
  while (std::binary_search(positions_.begin(), positions_.end(), x)) x += 1e-9 * (1.0 + std::abs(x));
  positions_.insert(std::upper_bound(positions_.begin(), positions_.end(), x), x);
}

void PercentileSketch::consume(double x) {
  if (!std::isfinite(x)) throw RejectedValueError("percentile sketch: non-finite value");
  if (count_ < bins_ + 1) {
    insert_initial(x);
    ++count_;
    return;
  }
  const double c = static_cast<double>(count_);
  std::span<double> p(positions_);
  switch (policy_) {
    case DirectionPolicy::left_right:
      update_percentiles(p, x, c);
      break;
    case DirectionPolicy::right_left:
      update_percentiles_reversed(p, x, c);
      break;
    case DirectionPolicy::bidirectional_average: {
      std::copy(positions_.begin(), positions_.end(), scratch_.begin());
      update_percentiles(p, x, c);
      update_percentiles_reversed(scratch_, x, c);
      for (std::size_t i = 0; i <= bins_; ++i) positions_[i] = 0.5 * (positions_[i] + scratch_[i]);
      break;
    }
    case DirectionPolicy::alternate:
      if (next_forward_) {
        update_percentiles(p, x, c);
      } else {
        update_percentiles_reversed(p, x, c);
      }
      next_forward_ = !next_forward_;
      break;
    case DirectionPolicy::random:
      if (rng_.coin()) {
        update_percentiles(p, x, c);
      } else {
        update_percentiles_reversed(p, x, c);
      }
      break;
  }
  ++count_;
}

double PercentileSketch::percentile(double q) const {
  if (!(q >= 0.0 && q <= 100.0)) throw RangeError("percentile must be in [0, 100]");
  if (!initialized()) throw WarmUpError("percentile sketch not initialized");
  const double rank = q / 100.0 * static_cast<double>(bins_);
  const auto lower = static_cast<std::size_t>(std::floor(rank));
  if (lower >= bins_) return positions_[bins_];
  const double frac = rank - static_cast<double>(lower);
  return positions_[lower] + frac * (positions_[lower + 1] - positions_[lower]);
}

nlohmann::json PercentileSketch::to_json() const {
  std::ostringstream engine;
  engine << rng_.engine();
  return {{"bins", bins_},
          {"count", count_},
          {"policy", to_string(policy_)},
          {"positions", positions_},
          {"next_forward", next_forward_},
          {"rng", engine.str()}};
}

PercentileSketch PercentileSketch::from_json(const nlohmann::json& doc) {
  try {
    const auto policy = parse_direction_policy(doc.at("policy").get<std::string>());
    if (!policy) throw ConfigError("sketch checkpoint: unknown policy");
    PercentileSketch sketch(doc.at("bins").get<std::size_t>(), *policy);
    sketch.count_ = doc.at("count").get<std::uint64_t>();
    sketch.positions_ = doc.at("positions").get<std::vector<double>>();
    sketch.next_forward_ = doc.value("next_forward", true);
    const auto expected = std::min<std::uint64_t>(sketch.count_, sketch.bins_ + 1);
    if (sketch.positions_.size() != expected || !std::is_sorted(sketch.positions_.begin(), sketch.positions_.end())) {
      throw ConfigError("sketch checkpoint: inconsistent positions");
    }
    if (doc.contains("rng")) {
      std::istringstream engine(doc["rng"].get<std::string>());
      engine >> sketch.rng_.engine();
    }
    return sketch;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sketch checkpoint: ") + e.what());
  }
}

}  // namespace scorewatch

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
#include <vector>

#include "scorewatch/windows.hpp"

namespace scorewatch {

/// Equal-width histogram of scores on [0, 1]; score 1.0 lands in the last bin.
class ScoreHistogram {
 public:
  explicit ScoreHistogram(std::size_t bin_count = 100);

  /// Batch construction. Throws EmptyWindowError on empty input.
  static ScoreHistogram from_scores(std::span<const double> scores, std::size_t bin_count = 100);
  template <typename Events>
  static ScoreHistogram from_events(const Events& events, std::size_t bin_count = 100) {
    ScoreHistogram h(bin_count);
    for (const auto& e : events) h.add(e.score);
    return h;
  }

  std::size_t bin_index(double score) const;
  void add(double score);
  /// Removes one previously added score. Throws if the bin is empty.
  void remove(double score);

  std::size_t bin_count() const { return counts_.size(); }
  std::uint64_t total() const { return total_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  double mass(std::size_t bin) const;
  std::vector<double> masses() const;

  bool operator==(const ScoreHistogram&) const = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Jensen-Shannon divergence in shannons (base-2), in [0, 1].
/// Throws IncompatibleHistogramsError on bin-count mismatch and
/// EmptyWindowError when either side is empty.
double jsd(const ScoreHistogram& p, const ScoreHistogram& q);

/// Same measure over two probability vectors of equal length.
double jsd(std::span<const double> p, std::span<const double> q);

/// Batch signal over the current windows. Throws WarmUpError if the pair
/// is not warmed up.
double signal(const WindowPair& pair, std::size_t bin_count = 100);

/// Keeps R and T histograms in step with a WindowPair as events are pushed.
class SignalTracker {
 public:
  explicit SignalTracker(std::size_t bin_count = 100) : reference_(bin_count), target_(bin_count) {}

  void on_push(double new_score, const WindowPair::PushResult& result);
  double signal() const { return jsd(reference_, target_); }

  const ScoreHistogram& reference() const { return reference_; }
  const ScoreHistogram& target() const { return target_; }

 private:
  ScoreHistogram reference_;
  ScoreHistogram target_;
};

}  // namespace scorewatch

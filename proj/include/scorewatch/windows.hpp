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
#include <deque>
#include <optional>
#include <vector>

#include "scorewatch/stream_model.hpp"

namespace scorewatch {

struct WindowSizes {
  std::size_t reference = 0;
  std::size_t target = 0;
};

/// Rule-of-thumb sizes: R = 3 days, T = half a day of events, each at least
/// two events per histogram bin. Throws ConfigError for non-positive input.
WindowSizes default_sizes(double avg_daily_events, std::size_t bin_count = 100);

/// Frozen copy of both windows. Arrival indices are contiguous, starting at
/// first_index for reference.front().
struct WindowSnapshot {
  std::vector<Event> reference;
  std::vector<Event> target;
  std::uint64_t first_index = 0;

  std::uint64_t target_first_index() const { return first_index + reference.size(); }
};

/// Contiguous fixed-size windows: the target holds the newest n_T events and
/// the reference the n_R events immediately before them.
class WindowPair {
 public:
  WindowPair(std::size_t reference_size, std::size_t target_size);

  struct PushResult {
    /// Score of the event that moved from T into R, if any.
    std::optional<double> moved_score;
    /// Event that fell out of R, if any.
    std::optional<Event> discarded;
  };

  PushResult push(Event event);

  bool warmed_up() const { return reference_.size() == reference_size_ && target_.size() == target_size_; }

  std::size_t reference_size() const { return reference_size_; }
  std::size_t target_size() const { return target_size_; }
  const std::deque<Event>& reference() const { return reference_; }
  const std::deque<Event>& target() const { return target_; }

  /// Events pushed so far; the newest event has index pushed() - 1.
  std::uint64_t pushed() const { return pushed_; }
  std::uint64_t first_index() const { return pushed_ - target_.size() - reference_.size(); }

  WindowSnapshot snapshot() const;

 private:
  std::size_t reference_size_;
  std::size_t target_size_;
  std::deque<Event> reference_;
  std::deque<Event> target_;
  std::uint64_t pushed_ = 0;
};

}  // namespace scorewatch

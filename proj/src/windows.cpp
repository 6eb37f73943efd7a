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

#include "scorewatch/windows.hpp"

#include <algorithm>
#include <cmath>

#include "scorewatch/error.hpp"

namespace scorewatch {

WindowSizes default_sizes(double avg_daily_events, std::size_t bin_count) {
  if (!(avg_daily_events > 0.0) || !std::isfinite(avg_daily_events)) {
    throw ConfigError("average daily events must be positive");
  }
  if (bin_count == 0) throw ConfigError("bin count must be positive");
  const auto floor = static_cast<std::size_t>(2 * bin_count);
  const auto reference = static_cast<std::size_t>(std::llround(3.0 * avg_daily_events));
  const auto target = static_cast<std::size_t>(std::llround(0.5 * avg_daily_events));
  return {std::max(reference, floor), std::max(target, floor)};
}

WindowPair::WindowPair(std::size_t reference_size, std::size_t target_size)
    : reference_size_(reference_size), target_size_(target_size) {
  if (reference_size == 0 || target_size == 0) throw ConfigError("window sizes must be positive");
}

WindowPair::PushResult WindowPair::push(Event event) {
  PushResult result;
  target_.push_back(std::move(event));
  ++pushed_;
  if (target_.size() > target_size_) {
    result.moved_score = target_.front().score;
    reference_.push_back(std::move(target_.front()));
    target_.pop_front();
    if (reference_.size() > reference_size_) {
      result.discarded = std::move(reference_.front());
      reference_.pop_front();
    }
  }
  return result;
}

WindowSnapshot WindowPair::snapshot() const {
  WindowSnapshot snap;
  snap.reference.assign(reference_.begin(), reference_.end());
  snap.target.assign(target_.begin(), target_.end());
  snap.first_index = first_index();
  return snap;
}

}  // namespace scorewatch

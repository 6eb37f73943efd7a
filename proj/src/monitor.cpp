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

#include "scorewatch/monitor.hpp"

#include <algorithm>
#include <cmath>

#include "scorewatch/error.hpp"

namespace scorewatch {

std::string to_string(SnapshotMode mode) { return mode == SnapshotMode::peak ? "peak" : "trigger"; }

std::optional<SnapshotMode> parse_snapshot_mode(const std::string& name) {
  if (name == "peak") return SnapshotMode::peak;
  if (name == "trigger") return SnapshotMode::trigger;
  return std::nullopt;
}

void MonitorConfig::validate() const {
  if (reference_size == 0 || target_size == 0) throw ConfigError("window sizes must be positive");
  if (bin_count == 0) throw ConfigError("bin_count must be positive");
  if (!(threshold_percentile > 0.0 && threshold_percentile < 100.0)) {
    throw ConfigError("threshold percentile must be in (0, 100)");
  }
  if (!(valley_percentile >= 0.0 && valley_percentile <= 100.0)) {
    throw ConfigError("valley percentile must be in [0, 100]");
  }
  if (sketch_bins < 2) throw ConfigError("sketch_bins must be at least 2");
  if (refractory() < 1) throw ConfigError("refractory_events must be at least 1");
  if (burn_in_samples() < sketch_bins + 1) {
    throw ConfigError("min_signal_samples must be at least sketch_bins + 1");
  }
}

void LandmarkQuantile::add(double value) {
  if (lower_.empty() || value <= lower_.top()) {
    lower_.push(value);
  } else {
    upper_.push(value);
  }
  // lower_ holds the floor(h) + 1 smallest values.
  const std::size_t n = size();
  const auto want = static_cast<std::size_t>(std::floor(static_cast<double>(n - 1) * q_)) + 1;
  while (lower_.size() > want) {
    upper_.push(lower_.top());
    lower_.pop();
  }
  while (lower_.size() < want && !upper_.empty()) {
    lower_.push(upper_.top());
    upper_.pop();
  }
}

std::optional<double> LandmarkQuantile::value() const {
  if (lower_.empty()) return std::nullopt;
  const double h = static_cast<double>(size() - 1) * q_;
  const double frac = h - std::floor(h);
  const double lo = lower_.top();
  if (upper_.empty() || frac == 0.0) return lo;
  return lo + frac * (upper_.top() - lo);
}

double exact_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyWindowError("percentile of an empty series");
  if (!(q >= 0.0 && q <= 100.0)) throw RangeError("percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * q / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Monitor::Monitor(MonitorConfig config)
    : config_((config.validate(), config)),
      windows_(config_.reference_size, config_.target_size),
      tracker_(config_.bin_count),
      sketch_(config_.sketch_bins, config_.policy, mix_seed(config_.seed, 1)) {
  if (config_.track_landmark) landmark_.emplace(config_.threshold_percentile);
  if (config_.snapshot_mode == SnapshotMode::peak) retired_capacity_ = config_.refractory();
}

StepResult Monitor::step(Event event) {
  StepResult out;
  const std::uint64_t index = windows_.pushed();
  const std::int64_t timestamp = event.timestamp;
  const double score = event.score;

  auto pushed = windows_.push(std::move(event));
  tracker_.on_push(score, pushed);
  if (pushed.discarded && retired_capacity_ > 0) {
    retired_.push_back(std::move(*pushed.discarded));
    if (retired_.size() > retired_capacity_) retired_.pop_front();
  }
  if (!windows_.warmed_up()) return out;
  if (!warm_reported_) {
    warm_reported_ = true;
    out.warmed_up_now = true;
  }

  const double value = tracker_.signal();
  const bool past_burn_in = sketch_.count() >= config_.burn_in_samples();
  SignalPoint point;
  if (past_burn_in) {
    point.event_index = index;
    point.timestamp = timestamp;
    point.signal = value;
    point.threshold = sketch_.percentile(config_.threshold_percentile);
    point.is_alarm = value > point.threshold;
    point.is_valley_candidate = value <= sketch_.percentile(config_.valley_percentile);
    if (landmark_) point.landmark = landmark_->value();
  }
  sketch_.consume(value);
  if (landmark_) landmark_->add(value);
  if (!past_burn_in) return out;

  const std::size_t refractory = config_.refractory();
  if (episode_) {
    if (point.signal > episode_->peak.signal) episode_->peak = point;
  } else if (point.is_alarm && (!last_alarm_index_ || index >= *last_alarm_index_ + refractory)) {
    last_alarm_index_ = index;
    episode_ = Episode{next_alarm_id_++, point, point};
  }
  if (episode_ && (config_.snapshot_mode == SnapshotMode::trigger ||
                   index + 1 >= episode_->trigger.event_index + refractory)) {
    out.alarm = close_episode();
  }
  out.point = point;
  return out;
}

std::optional<AlarmTrigger> Monitor::finish() {
  if (!episode_) return std::nullopt;
  return close_episode();
}

AlarmTrigger Monitor::close_episode() {
  AlarmTrigger alarm;
  alarm.alarm_id = episode_->id;
  alarm.trigger = episode_->trigger;
  alarm.snapshot_point = config_.snapshot_mode == SnapshotMode::peak ? episode_->peak : episode_->trigger;
  alarm.snapshot = std::make_shared<const WindowSnapshot>(snapshot_at(alarm.snapshot_point.event_index));
  episode_.reset();
  return alarm;
}

WindowSnapshot Monitor::snapshot_at(std::uint64_t newest_index) const {
  const std::uint64_t newest = windows_.pushed() - 1;
  if (newest_index == newest) return windows_.snapshot();
  const std::uint64_t lag = newest - newest_index;
  if (lag > retired_.size()) throw Error("snapshot requested beyond retained history");

  // Buffer = retired_ ++ R ++ T, contiguous in arrival order.
  const std::uint64_t buffer_first = windows_.first_index() - retired_.size();
  auto at = [&](std::uint64_t idx) -> const Event& {
    std::uint64_t offset = idx - buffer_first;
    if (offset < retired_.size()) return retired_[offset];
    offset -= retired_.size();
    const auto& r = windows_.reference();
    if (offset < r.size()) return r[offset];
    return windows_.target()[offset - r.size()];
  };

  WindowSnapshot snap;
  const std::uint64_t t_first = newest_index + 1 - config_.target_size;
  snap.first_index = t_first - config_.reference_size;
  snap.reference.reserve(config_.reference_size);
  snap.target.reserve(config_.target_size);
  for (std::uint64_t i = snap.first_index; i < t_first; ++i) snap.reference.push_back(at(i));
  for (std::uint64_t i = t_first; i <= newest_index; ++i) snap.target.push_back(at(i));
  return snap;
}

std::vector<std::uint64_t> select_valleys(std::span<const SignalPoint> series, std::size_t count,
                                          std::size_t min_spacing, double valley_percentile) {
  std::vector<std::uint64_t> chosen;
  if (series.empty() || count == 0) return chosen;
  std::vector<double> values;
  values.reserve(series.size());
  for (const auto& p : series) values.push_back(p.signal);
  const double cutoff = exact_percentile(values, valley_percentile);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series[i].signal;
    if (v > cutoff) continue;
    if (i > 0 && series[i - 1].signal < v) continue;
    if (i + 1 < series.size() && series[i + 1].signal < v) continue;
    candidates.push_back(i);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return series[a].signal < series[b].signal; });
  for (std::size_t i : candidates) {
    const std::uint64_t idx = series[i].event_index;
    const bool spaced = std::all_of(chosen.begin(), chosen.end(), [&](std::uint64_t c) {
      return (idx > c ? idx - c : c - idx) >= min_spacing;
    });
    if (!spaced) continue;
    chosen.push_back(idx);
    if (chosen.size() == count) break;
  }
  return chosen;
}

void write_signal_header(std::ostream& out, bool with_landmark) {
  out << "event_index,timestamp,signal,threshold,is_alarm";
  if (with_landmark) out << ",landmark";
  out << '\n';
}

void write_signal_row(std::ostream& out, const SignalPoint& point, bool with_landmark) {
  out << point.event_index << ',' << point.timestamp << ',' << format_double(point.signal) << ','
      << format_double(point.threshold) << ',' << (point.is_alarm ? 1 : 0);
  if (with_landmark) {
    out << ',';
    if (point.landmark) out << format_double(*point.landmark);
  }
  out << '\n';
}

}  // namespace scorewatch

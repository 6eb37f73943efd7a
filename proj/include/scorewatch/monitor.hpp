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
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "scorewatch/divergence.hpp"
#include "scorewatch/spear.hpp"
#include "scorewatch/windows.hpp"

namespace scorewatch {

/// Where an alarm's report snapshot is taken.
enum class SnapshotMode {
  trigger,  // windows as they are on the triggering event
  peak,     // windows at the highest signal within the refractory period
};

std::string to_string(SnapshotMode mode);
std::optional<SnapshotMode> parse_snapshot_mode(const std::string& name);

struct MonitorConfig {
  std::size_t reference_size = 0;
  std::size_t target_size = 0;
  std::size_t bin_count = 100;
  double threshold_percentile = 95.0;
  std::size_t sketch_bins = 100;
  DirectionPolicy policy = DirectionPolicy::random;
  std::optional<std::size_t> refractory_events;   // default: target_size
  std::optional<std::size_t> min_signal_samples;  // default: 10 * sketch_bins
  double valley_percentile = 10.0;
  SnapshotMode snapshot_mode = SnapshotMode::peak;
  bool track_landmark = false;
  std::uint64_t seed = 0;

  std::size_t refractory() const { return refractory_events.value_or(target_size); }
  std::size_t burn_in_samples() const { return min_signal_samples.value_or(10 * sketch_bins); }

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

struct SignalPoint {
  std::uint64_t event_index = 0;
  std::int64_t timestamp = 0;
  double signal = 0.0;     // shannons
  double threshold = 0.0;  // sketch percentile before this signal was consumed
  bool is_alarm = false;   // signal > threshold
  bool is_valley_candidate = false;
  std::optional<double> landmark;  // exact percentile of all earlier signals
};

struct AlarmTrigger {
  std::size_t alarm_id = 0;
  SignalPoint trigger;
  SignalPoint snapshot_point;
  std::shared_ptr<const WindowSnapshot> snapshot;
};

struct StepResult {
  std::optional<SignalPoint> point;
  std::optional<AlarmTrigger> alarm;
  bool warmed_up_now = false;
};

/// Exact running q-quantile (linear interpolation between order statistics,
/// h = (N-1) q) maintained with two heaps. Memory grows with the stream; it
/// backs the optional debug column only.
class LandmarkQuantile {
 public:
  explicit LandmarkQuantile(double percentile) : q_(percentile / 100.0) {}
  void add(double value);
  std::optional<double> value() const;
  std::size_t size() const { return lower_.size() + upper_.size(); }

 private:
  double q_;
  std::priority_queue<double> lower_;
  std::priority_queue<double, std::vector<double>, std::greater<>> upper_;
};

/// Sort-based percentile with linear interpolation (h = (N-1) q/100).
double exact_percentile(std::vector<double> values, double q);

class Monitor {
 public:
  explicit Monitor(MonitorConfig config);

  /// Pushes one event; emits a SignalPoint once past burn-in and an
  /// AlarmTrigger when an alarm episode completes.
  StepResult step(Event event);

  /// Closes an alarm episode left open at end of stream.
  std::optional<AlarmTrigger> finish();

  const MonitorConfig& config() const { return config_; }
  const WindowPair& windows() const { return windows_; }
  const PercentileSketch& sketch() const { return sketch_; }
  std::uint64_t signal_samples() const { return sketch_.count(); }
  std::size_t alarms() const { return next_alarm_id_; }

  WindowSnapshot snapshot() const { return windows_.snapshot(); }

 private:
  struct Episode {
    std::size_t id;
    SignalPoint trigger;
    SignalPoint peak;
  };

  AlarmTrigger close_episode();
  WindowSnapshot snapshot_at(std::uint64_t newest_index) const;

  MonitorConfig config_;
  WindowPair windows_;
  SignalTracker tracker_;
  PercentileSketch sketch_;
  std::optional<LandmarkQuantile> landmark_;
  std::deque<Event> retired_;
  std::size_t retired_capacity_ = 0;
  std::optional<Episode> episode_;
  std::optional<std::uint64_t> last_alarm_index_;
  std::size_t next_alarm_id_ = 0;
  bool warm_reported_ = false;
};

/// Local minima at or below the valley percentile of the series, lowest
/// first (ties: earliest), pairwise at least min_spacing events apart.
std::vector<std::uint64_t> select_valleys(std::span<const SignalPoint> series, std::size_t count,
                                          std::size_t min_spacing, double valley_percentile = 10.0);

void write_signal_header(std::ostream& out, bool with_landmark);
void write_signal_row(std::ostream& out, const SignalPoint& point, bool with_landmark);

}  // namespace scorewatch

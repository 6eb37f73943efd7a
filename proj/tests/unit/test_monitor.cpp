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

#include <gtest/gtest.h>

#include <sstream>

#include "scorewatch/error.hpp"
#include "scorewatch/monitor.hpp"
#include "scorewatch/rng.hpp"

namespace {

using namespace scorewatch;

MonitorConfig small_config() {
  MonitorConfig c;
  c.reference_size = 120;
  c.target_size = 40;
  c.bin_count = 20;
  c.sketch_bins = 20;
  c.min_signal_samples = 200;
  c.seed = 7;
  return c;
}

Event scored(double score, std::int64_t ts) {
  Event e;
  e.timestamp = ts;
  e.score = score;
  return e;
}

// Scores from Beta(2, 5), switching to Beta(5, 2) at shift_at.
std::vector<Event> replay(std::size_t n, std::uint64_t seed, std::size_t shift_at = SIZE_MAX) {
  Rng rng(seed);
  std::vector<Event> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(scored(i >= shift_at ? rng.beta(5, 2) : rng.beta(2, 5), i));
  return out;
}

struct Trace {
  std::vector<SignalPoint> points;
  std::vector<AlarmTrigger> alarms;
};

Trace run(const MonitorConfig& config, const std::vector<Event>& events) {
  Monitor m(config);
  Trace t;
  for (const auto& e : events) {
    auto r = m.step(e);
    if (r.point) t.points.push_back(*r.point);
    if (r.alarm) t.alarms.push_back(*r.alarm);
  }
  if (auto last = m.finish()) t.alarms.push_back(*last);
  return t;
}

TEST(MonitorConfig, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.threshold_percentile = 100;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.refractory_events = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.min_signal_samples = 5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.target_size = 0;
  EXPECT_THROW(Monitor{c}, ConfigError);
  EXPECT_EQ(MonitorConfig{}.burn_in_samples(), 1000u);
}

TEST(Monitor, BurnInGating) {
  const auto c = small_config();
  Monitor m(c);
  const auto events = replay(1000, 1);
  std::size_t first = SIZE_MAX;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto r = m.step(events[i]);
    if (i + 1 < 160) EXPECT_FALSE(r.point);
    EXPECT_EQ(r.warmed_up_now, i == 159);
    if (r.point && first == SIZE_MAX) first = i;
    if (first == SIZE_MAX) EXPECT_FALSE(r.alarm);
  }
  EXPECT_EQ(first, 159u + 200u);
}

TEST(Monitor, ThresholdReadBeforeConsume) {
  auto c = small_config();
  Monitor m(c);
  PercentileSketch shadow(c.sketch_bins, c.policy, mix_seed(c.seed, 1));
  const auto events = replay(5000, 2, 3000);
  for (const auto& e : events) {
    auto r = m.step(e);
    if (!m.windows().warmed_up()) continue;
    const double s = signal(m.windows(), c.bin_count);
    if (r.point) {
      EXPECT_EQ(r.point->signal, s);
      EXPECT_EQ(r.point->threshold, shadow.percentile(95));
      EXPECT_EQ(r.point->is_alarm, s > r.point->threshold);
    }
    shadow.consume(s);
  }
}

TEST(Monitor, RefractoryGap) {
  auto c = small_config();
  c.threshold_percentile = 80;
  const auto t = run(c, replay(20000, 3));
  ASSERT_GT(t.alarms.size(), 3u);
  for (std::size_t i = 1; i < t.alarms.size(); ++i) {
    EXPECT_GE(t.alarms[i].trigger.event_index, t.alarms[i - 1].trigger.event_index + c.refractory());
    EXPECT_EQ(t.alarms[i].alarm_id, i);
  }
  for (const auto& a : t.alarms) EXPECT_TRUE(a.trigger.is_alarm);
}

TEST(Monitor, RaisingThresholdNeverAddsAlarms) {
  const auto events = replay(20000, 4, 12000);
  std::size_t previous = SIZE_MAX;
  for (double q : {70.0, 80.0, 85.0, 90.0, 95.0, 99.0}) {
    auto c = small_config();
    c.threshold_percentile = q;
    const std::size_t alarms = run(c, events).alarms.size();
    EXPECT_LE(alarms, previous) << q;
    previous = alarms;
  }
}

TEST(Monitor, DetectsAbruptShift) {
  auto c = small_config();
  const std::size_t k = 8000;
  const auto t = run(c, replay(12000, 5, k));
  const auto after = std::find_if(t.alarms.begin(), t.alarms.end(),
                                  [&](const auto& a) { return a.trigger.event_index >= k; });
  ASSERT_NE(after, t.alarms.end());
  EXPECT_LT(after->trigger.event_index, k + c.target_size);
}

TEST(Monitor, DeterministicSeries) {
  const auto events = replay(6000, 6, 4000);
  const auto a = run(small_config(), events), b = run(small_config(), events);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].signal, b.points[i].signal);
    EXPECT_EQ(a.points[i].threshold, b.points[i].threshold);
  }
  EXPECT_EQ(a.alarms.size(), b.alarms.size());
}

TEST(Monitor, PeakSnapshotMatchesWindowsAtPeak) {
  auto c = small_config();
  const auto events = replay(10000, 7, 7000);
  std::vector<std::vector<Event>> targets;  // T at every step
  Monitor m(c);
  std::vector<AlarmTrigger> alarms;
  std::vector<SignalPoint> points;
  for (const auto& e : events) {
    auto r = m.step(e);
    const auto& t = m.windows().target();
    targets.emplace_back(t.begin(), t.end());
    if (r.point) points.push_back(*r.point);
    if (r.alarm) alarms.push_back(*r.alarm);
  }
  ASSERT_FALSE(alarms.empty());
  for (const auto& a : alarms) {
    const auto idx = a.snapshot_point.event_index;
    EXPECT_GE(idx, a.trigger.event_index);
    EXPECT_LT(idx, a.trigger.event_index + c.refractory());
    for (const auto& p : points) {
      if (p.event_index >= a.trigger.event_index && p.event_index < a.trigger.event_index + c.refractory()) {
        EXPECT_LE(p.signal, a.snapshot_point.signal);
      }
    }
    EXPECT_EQ(a.snapshot->target, targets[idx]);
    EXPECT_EQ(a.snapshot->reference.size(), c.reference_size);
    EXPECT_EQ(a.snapshot->reference.back().timestamp + 1, a.snapshot->target.front().timestamp);
    EXPECT_EQ(a.snapshot->target_first_index() + c.target_size - 1, idx);
    const auto h = jsd(ScoreHistogram::from_events(a.snapshot->reference, c.bin_count),
                       ScoreHistogram::from_events(a.snapshot->target, c.bin_count));
    EXPECT_EQ(h, a.snapshot_point.signal);
  }
}

TEST(Monitor, TriggerModeSnapshotsAtTrigger) {
  auto c = small_config();
  c.snapshot_mode = SnapshotMode::trigger;
  const auto t = run(c, replay(10000, 7, 7000));
  ASSERT_FALSE(t.alarms.empty());
  for (const auto& a : t.alarms) {
    EXPECT_EQ(a.snapshot_point.event_index, a.trigger.event_index);
    EXPECT_EQ(static_cast<std::uint64_t>(a.snapshot->target.back().timestamp), a.trigger.event_index);
  }
  EXPECT_EQ(parse_snapshot_mode("peak"), SnapshotMode::peak);
  EXPECT_FALSE(parse_snapshot_mode("late"));
}

TEST(Monitor, FinishClosesOpenEpisode) {
  auto c = small_config();
  c.refractory_events = 100000;
  Monitor m(c);
  std::size_t emitted = 0;
  for (const auto& e : replay(6000, 8, 4000)) emitted += m.step(e).alarm ? 1 : 0;
  EXPECT_EQ(emitted, 0u);
  auto last = m.finish();
  ASSERT_TRUE(last);
  EXPECT_EQ(last->alarm_id, 0u);
  EXPECT_FALSE(m.finish());
}

TEST(Monitor, LandmarkIsExactPercentileOfEarlierSignals) {
  auto c = small_config();
  c.track_landmark = true;
  const auto t = run(c, replay(3000, 9));
  // All signal values, including burn-in ones, in order.
  Monitor m(c);
  std::vector<double> seen;
  std::size_t checked = 0;
  for (const auto& e : replay(3000, 9)) {
    auto r = m.step(e);
    if (!m.windows().warmed_up()) continue;
    if (r.point) {
      ASSERT_TRUE(r.point->landmark);
      EXPECT_NEAR(*r.point->landmark, exact_percentile(seen, 95), 1e-15);
      ++checked;
    }
    seen.push_back(signal(m.windows(), c.bin_count));
  }
  EXPECT_EQ(checked, t.points.size());
}

TEST(LandmarkQuantile, MatchesSort) {
  Rng rng(10);
  LandmarkQuantile q(95);
  std::vector<double> all;
  EXPECT_FALSE(q.value());
  for (int i = 0; i < 3000; ++i) {
    const double v = rng.coin() ? rng.normal() : std::round(rng.normal());
    q.add(v);
    all.push_back(v);
    EXPECT_NEAR(*q.value(), exact_percentile(all, 95), 1e-12);
  }
}

TEST(ExactPercentile, Interpolates) {
  EXPECT_EQ(exact_percentile({3, 1, 2, 4}, 0), 1.0);
  EXPECT_EQ(exact_percentile({3, 1, 2, 4}, 100), 4.0);
  EXPECT_DOUBLE_EQ(exact_percentile({3, 1, 2, 4}, 50), 2.5);
  EXPECT_THROW(exact_percentile({}, 50), EmptyWindowError);
}

SignalPoint pt(std::uint64_t i, double s) {
  SignalPoint p;
  p.event_index = i;
  p.signal = s;
  return p;
}

TEST(Valleys, ConstantSignalTakesEarliestSpaced) {
  std::vector<SignalPoint> series;
  for (std::uint64_t i = 0; i < 100; ++i) series.push_back(pt(i, 0.0));
  EXPECT_EQ(select_valleys(series, 4, 10), (std::vector<std::uint64_t>{0, 10, 20, 30}));
}

TEST(Valleys, VShapeGlobalMinimumFirst) {
  std::vector<SignalPoint> series;
  for (std::uint64_t i = 0; i < 101; ++i) series.push_back(pt(i, std::abs(static_cast<double>(i) - 37.0)));
  const auto v = select_valleys(series, 3, 10);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front(), 37u);
  EXPECT_EQ(v.size(), 1u);
}

TEST(Valleys, MonotoneSeriesAndEmptyInputs) {
  std::vector<SignalPoint> series;
  for (std::uint64_t i = 0; i < 50; ++i) series.push_back(pt(i, static_cast<double>(i)));
  // The only local minimum is the first point, which is below the cutoff.
  EXPECT_EQ(select_valleys(series, 5, 10), (std::vector<std::uint64_t>{0}));
  EXPECT_TRUE(select_valleys({}, 5, 10).empty());
  EXPECT_TRUE(select_valleys(series, 0, 10).empty());
}

TEST(Valleys, StationaryReplayBelowTenthPercentile) {
  const auto t = run(small_config(), replay(30000, 11));
  const auto v = select_valleys(t.points, 20, 40);
  ASSERT_FALSE(v.empty());
  std::vector<double> values;
  for (const auto& p : t.points) values.push_back(p.signal);
  const double cutoff = exact_percentile(values, 10);
  const std::uint64_t base = t.points.front().event_index;
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_LE(t.points[v[i] - base].signal, cutoff);
    if (i > 0) EXPECT_GE(t.points[v[i] - base].signal, t.points[v[i - 1] - base].signal);
    for (std::size_t j = 0; j < i; ++j) EXPECT_GE(v[i] > v[j] ? v[i] - v[j] : v[j] - v[i], 40u);
  }
}

TEST(SignalCsv, Format) {
  std::ostringstream out;
  write_signal_header(out, true);
  SignalPoint p = pt(12, 0.25);
  p.timestamp = 1000;
  p.threshold = 0.125;
  p.is_alarm = true;
  write_signal_row(out, p, true);
  p.landmark = 0.5;
  write_signal_row(out, p, true);
  write_signal_row(out, p, false);
  EXPECT_EQ(out.str(),
            "event_index,timestamp,signal,threshold,is_alarm,landmark\n"
            "12,1000,0.25,0.125,1,\n"
            "12,1000,0.25,0.125,1,0.5\n"
            "12,1000,0.25,0.125,1\n");
}

}  // namespace

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

#include <cmath>
#include <numeric>

#include "scorewatch/divergence.hpp"
#include "scorewatch/error.hpp"
#include "scorewatch/rng.hpp"

namespace {

using namespace scorewatch;

std::vector<double> random_masses(Rng& rng, std::size_t bins) {
  std::vector<double> m(bins);
  for (auto& v : m) v = rng.coin() ? rng.uniform() : 0.0;
  m[rng.below(bins)] += 0.1;
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  for (auto& v : m) v /= total;
  return m;
}

// Entropy form H(m) - (H(p) + H(q)) / 2, written independently.
double jsd_entropy_form(const std::vector<double>& p, const std::vector<double>& q) {
  auto h = [](const std::vector<double>& d) {
    double s = 0.0;
    for (double v : d) {
      if (v > 0.0) s -= v * std::log2(v);
    }
    return s;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return h(m) - 0.5 * (h(p) + h(q));
}

TEST(Histogram, BoundaryConvention) {
  const std::vector<double> scores{0.0, 0.5, 1.0};
  auto h = ScoreHistogram::from_scores(scores, 2);
  EXPECT_DOUBLE_EQ(h.mass(0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(h.mass(1), 2.0 / 3.0);
}

TEST(Histogram, PointMass) {
  const std::vector<double> scores(50, 0.25);
  auto h = ScoreHistogram::from_scores(scores);
  EXPECT_EQ(h.mass(25), 1.0);
  const auto masses = h.masses();
  EXPECT_NEAR(std::accumulate(masses.begin(), masses.end(), 0.0), 1.0, 1e-9);
}

TEST(Histogram, UniformSample) {
  Rng rng(5);
  std::vector<double> scores(100000);
  for (auto& s : scores) s = rng.uniform();
  auto h = ScoreHistogram::from_scores(scores);
  for (std::size_t b = 0; b < 100; ++b) EXPECT_NEAR(h.mass(b), 0.01, 0.004) << b;
  const auto masses = h.masses();
  EXPECT_NEAR(std::accumulate(masses.begin(), masses.end(), 0.0), 1.0, 1e-9);
}

TEST(Histogram, EmptyInputThrows) {
  EXPECT_THROW(ScoreHistogram::from_scores(std::vector<double>{}), EmptyWindowError);
  ScoreHistogram h(10);
  EXPECT_THROW(jsd(h, h), EmptyWindowError);
}

TEST(Histogram, AddRemoveMatchesBatch) {
  Rng rng(9);
  std::vector<double> scores(300);
  for (auto& s : scores) s = rng.uniform();
  ScoreHistogram h(20);
  for (double s : scores) h.add(s);
  for (std::size_t i = 0; i < 100; ++i) h.remove(scores[i]);
  EXPECT_EQ(h, ScoreHistogram::from_scores(std::span(scores).subspan(100), 20));
  ScoreHistogram one(20);
  one.add(0.05);
  EXPECT_THROW(one.remove(0.9), Error);
}

TEST(Jsd, WorkedExamples) {
  const std::vector<double> a{1, 0}, b{0, 1}, c{0.5, 0.5};
  EXPECT_NEAR(jsd(a, a), 0.0, 1e-9);
  EXPECT_NEAR(jsd(a, b), 1.0, 1e-9);
  EXPECT_NEAR(jsd(a, c), 0.311278, 1e-6);
  // 0.811278 - 0.5 from the entropy identity.
  EXPECT_NEAR(jsd(a, c), -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25)) - 0.5, 1e-12);
}

TEST(Jsd, BinMismatch) {
  ScoreHistogram p(10), q(20);
  p.add(0.1);
  q.add(0.1);
  EXPECT_THROW(jsd(p, q), IncompatibleHistogramsError);
  const std::vector<double> x{1, 0}, y{0.3, 0.3, 0.4};
  EXPECT_THROW(jsd(x, y), IncompatibleHistogramsError);
}

TEST(Jsd, PropertiesOverRandomPairs) {
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t bins = 2 + rng.below(100);
    auto p = random_masses(rng, bins);
    auto q = random_masses(rng, bins);
    const double d = jsd(p, q);
    EXPECT_EQ(d, jsd(q, p));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_EQ(jsd(p, p), 0.0);
    EXPECT_NEAR(d, jsd_entropy_form(p, q), 1e-12);
  }
}

TEST(Signal, PointMassAndDisjoint) {
  WindowPair same(20, 10), split(20, 10);
  for (int i = 0; i < 30; ++i) {
    Event e;
    e.score = 0.4;
    same.push(e);
    e.score = i < 20 ? 0.2 : 0.7;
    split.push(e);
  }
  EXPECT_EQ(signal(same), 0.0);
  EXPECT_NEAR(signal(split), 1.0, 1e-12);
}

TEST(Signal, WarmUpRequired) {
  WindowPair w(5, 5);
  Event e;
  w.push(e);
  EXPECT_THROW(signal(w), WarmUpError);
}

TEST(Signal, IncrementalMatchesBatch) {
  Rng rng(12);
  WindowPair w(300, 50);
  SignalTracker tracker(100);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Event e;
    e.score = i > 5000 ? rng.beta(5, 2) : rng.beta(2, 5);
    if (i % 97 == 0) e.score = 1.0;
    const double s = e.score;
    tracker.on_push(s, w.push(std::move(e)));
    if (w.warmed_up()) worst = std::max(worst, std::abs(tracker.signal() - signal(w)));
  }
  EXPECT_LT(worst, 1e-9);
}

}  // namespace

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

#include "scorewatch/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "scorewatch/error.hpp"

namespace scorewatch {

ScoreHistogram::ScoreHistogram(std::size_t bin_count) : counts_(bin_count, 0) {
  if (bin_count == 0) throw ConfigError("histogram needs at least one bin");
}

ScoreHistogram ScoreHistogram::from_scores(std::span<const double> scores, std::size_t bin_count) {
  if (scores.empty()) throw EmptyWindowError("cannot build a histogram from no scores");
  ScoreHistogram h(bin_count);
  for (double s : scores) h.add(s);
  return h;
}

std::size_t ScoreHistogram::bin_index(double score) const {
  const auto bins = counts_.size();
  if (!(score > 0.0)) return 0;
  const auto index = static_cast<std::size_t>(score * static_cast<double>(bins));
  return std::min(index, bins - 1);
}

void ScoreHistogram::add(double score) {
  ++counts_[bin_index(score)];
  ++total_;
}

void ScoreHistogram::remove(double score) {
  auto& count = counts_[bin_index(score)];
  if (count == 0) throw Error("histogram remove: bin already empty");
  --count;
  --total_;
}

double ScoreHistogram::mass(std::size_t bin) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(counts_[bin]) / static_cast<double>(total_);
}

std::vector<double> ScoreHistogram::masses() const {
  std::vector<double> out(counts_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mass(i);
  return out;
}

namespace {

// Per-bin contribution 1/2 [p log2(2p/(p+q)) + q log2(2q/(p+q))]. Each term is
// non-negative and the expression is exactly symmetric in (p, q).
inline double jsd_term(double p, double q) {
  const double m = p + q;
  if (m <= 0.0) return 0.0;
  double term = 0.0;
  if (p > 0.0) term += p * std::log2(2.0 * p / m);
  if (q > 0.0) term += q * std::log2(2.0 * q / m);
  return 0.5 * term;
}

inline double clamp_unit(double value) { return std::clamp(value, 0.0, 1.0); }

}  // namespace

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw IncompatibleHistogramsError("histograms have different bin counts");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += jsd_term(p[i], q[i]);
  return clamp_unit(total);
}

double jsd(const ScoreHistogram& p, const ScoreHistogram& q) {
  if (p.bin_count() != q.bin_count()) {
    throw IncompatibleHistogramsError("histograms have different bin counts");
  }
  if (p.total() == 0 || q.total() == 0) throw EmptyWindowError("jsd of an empty histogram");
  const double np = static_cast<double>(p.total());
  const double nq = static_cast<double>(q.total());
  double total = 0.0;
  for (std::size_t i = 0; i < p.bin_count(); ++i) {
    total += jsd_term(static_cast<double>(p.counts()[i]) / np, static_cast<double>(q.counts()[i]) / nq);
  }
  return clamp_unit(total);
}

double signal(const WindowPair& pair, std::size_t bin_count) {
  if (!pair.warmed_up()) throw WarmUpError("signal requested before both windows are full");
  return jsd(ScoreHistogram::from_events(pair.reference(), bin_count),
             ScoreHistogram::from_events(pair.target(), bin_count));
}

void SignalTracker::on_push(double new_score, const WindowPair::PushResult& result) {
  target_.add(new_score);
  if (result.moved_score) {
    target_.remove(*result.moved_score);
    reference_.add(*result.moved_score);
  }
  if (result.discarded) reference_.remove(result.discarded->score);
}

}  // namespace scorewatch

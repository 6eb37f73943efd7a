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

// Reference implementations used only by tests. Written for clarity, not
// speed, and without sharing code with the library.

#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace scorewatch::oracle {

// One left-to-right SPEAR pass with an explicit per-bin count array.
// c[k] is the estimated count of bin k = [P[k-1], P[k]], k = 1..n.
inline std::vector<double> spear_forward(std::vector<double> P, double x, double C) {
  const std::size_t n = P.size() - 1;
  const double per = C / static_cast<double>(n);
  const double target = (C + 1.0) / static_cast<double>(n);
  std::vector<double> c(n + 1, per);
  std::size_t home = n;
  for (std::size_t k = 1; k < n; ++k) {
    if (x < P[k]) {
      home = k;
      break;
    }
  }
  // x beyond the last wall is not inside bin n until the final step
  if (x < P[n]) c[home] += 1.0;
  if (x < P[0]) P[0] = x;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = target - c[i];
    if (d > 0.0) {
      // bin i grows into bin i+1 at bin i+1's density
      const double w = P[i + 1] - P[i];
      if (w > 0.0) P[i] += d * w / c[i + 1];
    } else {
      // bin i sheds into bin i+1 at its own density
      const double w = P[i] - P[i - 1];
      if (w > 0.0) P[i] += d * w / c[i];
    }
    c[i + 1] -= d;
    c[i] = target;
  }
  if (x > P[n]) P[n] = x;
  return P;
}

// The same pass run right to left, coded directly rather than by mirroring.
inline std::vector<double> spear_backward(std::vector<double> P, double x, double C) {
  const std::size_t n = P.size() - 1;
  const double per = C / static_cast<double>(n);
  const double target = (C + 1.0) / static_cast<double>(n);
  std::vector<double> c(n + 1, per);
  std::size_t home = 1;
  for (std::size_t k = n - 1; k >= 1; --k) {
    if (x > P[k]) {
      home = k + 1;
      break;
    }
  }
  if (x > P[0]) c[home] += 1.0;
  if (x > P[n]) P[n] = x;
  for (std::size_t i = n - 1; i >= 1; --i) {
    const double d = target - c[i + 1];
    if (d > 0.0) {
      const double w = P[i] - P[i - 1];
      if (w > 0.0) P[i] -= d * w / c[i];
    } else {
      const double w = P[i + 1] - P[i];
      if (w > 0.0) P[i] -= d * w / c[i + 1];
    }
    c[i] -= d;
    c[i + 1] = target;
  }
  if (x < P[0]) P[0] = x;
  return P;
}

// Mann-Whitney U by counting every positive/negative pair.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Equal-count grid MIC by brute force: group of v[i] = (#values below v[i]) * g / n.
inline double mic_grid(const std::vector<double>& x, const std::vector<double>& t) {
  const std::size_t n = x.size();
  auto groups = [&](const std::vector<double>& v, std::size_t g) {
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t below = 0;
      for (double w : v) below += w < v[i] ? 1 : 0;
      out[i] = below * g / n;
    }
    return out;
  };
  const double limit = std::pow(static_cast<double>(n), 0.6);
  double best = 0.0;
  for (std::size_t a = 2; 2 * a <= limit; ++a) {
    for (std::size_t b = 2; static_cast<double>(a * b) <= limit; ++b) {
      const auto gx = groups(x, a);
      const auto gt = groups(t, b);
      std::map<std::pair<std::size_t, std::size_t>, double> joint;
      std::map<std::size_t, double> px, pt;
      for (std::size_t i = 0; i < n; ++i) {
        joint[{gx[i], gt[i]}] += 1.0 / static_cast<double>(n);
        px[gx[i]] += 1.0 / static_cast<double>(n);
        pt[gt[i]] += 1.0 / static_cast<double>(n);
      }
      double mi = 0.0;
      for (const auto& [cell, p] : joint) mi += p * std::log2(p / (px[cell.first] * pt[cell.second]));
      best = std::max(best, mi / std::log2(static_cast<double>(std::min(a, b))));
    }
  }
  return std::min(best, 1.0);
}

}  // namespace scorewatch::oracle

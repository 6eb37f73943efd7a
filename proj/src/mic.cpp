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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scorewatch/error.hpp"
#include "scorewatch/explain.hpp"
#include "scorewatch/rng.hpp"

namespace scorewatch::explain {

namespace {

constexpr std::size_t kMinMicLength = 50;

// Group labels for each partition size 2..max_groups; labels[g - 2][i] is the
// group of element i when cut into g equal-count groups.
using Partitions = std::vector<std::vector<int>>;

Partitions equi_frequency_partitions(std::span<const double> values, std::size_t max_groups) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  // Rank position where each element's tie run starts.
  std::vector<std::size_t> run_start(n);
  for (std::size_t r = 0; r < n;) {
    std::size_t end = r;
    while (end < n && values[order[end]] == values[order[r]]) ++end;
    for (std::size_t j = r; j < end; ++j) run_start[order[j]] = r;
    r = end;
  }
  Partitions parts;
  for (std::size_t g = 2; g <= max_groups; ++g) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(run_start[i] * g / n);
    parts.push_back(std::move(labels));
  }
  return parts;
}

double mutual_information(std::span<const int> x, std::size_t a, std::span<const int> t, std::size_t b,
                          std::vector<std::size_t>& cells) {
  const std::size_t n = x.size();
  cells.assign(a * b, 0);
  std::vector<std::size_t> rows(a, 0), cols(b, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++cells[static_cast<std::size_t>(x[i]) * b + static_cast<std::size_t>(t[i])];
    ++rows[static_cast<std::size_t>(x[i])];
    ++cols[static_cast<std::size_t>(t[i])];
  }
  const double total = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const auto c = cells[i * b + j];
      if (c == 0) continue;
      const double pc = static_cast<double>(c);
      mi += pc / total * std::log2(pc * total / (static_cast<double>(rows[i]) * static_cast<double>(cols[j])));
    }
  }
  return std::max(mi, 0.0);
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double grid_limit(std::size_t n) { return std::pow(static_cast<double>(n), 0.6); }

std::size_t max_groups(std::size_t n) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(grid_limit(n) / 2.0)));
}

double mic_from_partitions(const Partitions& xp, const Partitions& tp, std::size_t n) {
  const double limit = grid_limit(n);
  std::vector<std::size_t> cells;
  double best = 0.0;
  for (std::size_t a = 2; a - 2 < xp.size(); ++a) {
    for (std::size_t b = 2; b - 2 < tp.size(); ++b) {
      if (static_cast<double>(a * b) > limit) break;
      const double mi = mutual_information(xp[a - 2], a, tp[b - 2], b, cells);
      best = std::max(best, mi / std::log2(static_cast<double>(std::min(a, b))));
    }
  }
  return std::min(best, 1.0);
}

void check_lengths(std::size_t nx, std::size_t nt) {
  if (nx != nt) throw RangeError("mic: series lengths differ");
  if (nx < kMinMicLength) throw RangeError("mic: needs at least 50 points");
}

}  // namespace

double mic(std::span<const double> x, std::span<const double> t) {
  check_lengths(x.size(), t.size());
  if (is_constant(x) || is_constant(t)) return 0.0;
  // Fixed argument order keeps mic(x, t) == mic(t, x) bit for bit.
  if (std::lexicographical_compare(t.begin(), t.end(), x.begin(), x.end())) std::swap(x, t);
  const std::size_t groups = max_groups(x.size());
  return mic_from_partitions(equi_frequency_partitions(x, groups), equi_frequency_partitions(t, groups), x.size());
}

std::size_t shuffle_count(double alpha, double p) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(p > 0.0 && p < 1.0)) {
    throw RangeError("shuffle_count: alpha and p must lie in (0, 1)");
  }
  const double ratio = std::log1p(-p) / std::log1p(-alpha);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
}

std::vector<double> category_codes(std::span<const FeatureValue> values) {
  std::map<std::string, std::size_t> counts;
  for (const auto& v : values) {
    if (const auto* s = std::get_if<std::string>(&v)) ++counts[*s];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<std::string, double> code;
  for (std::size_t r = 0; r < ranked.size(); ++r) code[ranked[r].first] = static_cast<double>(r + 1);
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    const auto* s = std::get_if<std::string>(&v);
    out.push_back(s ? code[*s] : 0.0);
  }
  return out;
}

std::vector<std::string> MicFilterResult::removed_names() const {
  std::vector<std::string> out;
  for (const auto& f : features) {
    if (f.removed) out.push_back(f.name);
  }
  return out;
}

nlohmann::json MicFilterResult::to_json() const {
  nlohmann::json doc;
  doc["estimator"] = kMicEstimator;
  doc["sample_size"] = sample_size;
  doc["seed"] = seed;
  doc["warnings"] = warnings;
  doc["features"] = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json item{{"name", f.name},
                        {"mic", f.mic},
                        {"shuffle_threshold", f.shuffle_threshold},
                        {"shuffle_count", f.shuffle_count},
                        {"removed", f.removed}};
    if (!f.warning.empty()) item["warning"] = f.warning;
    doc["features"].push_back(std::move(item));
  }
  return doc;
}

namespace {

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

MicFilterResult time_correlation_filter(std::span<const Event> burn_in, const FeatureSchema& schema,
                                        const FilterParams& params) {
  MicFilterResult result;
  result.seed = params.seed;
  const std::size_t shuffles = shuffle_count(params.alpha, params.p);

  std::vector<std::size_t> sample;
  const std::size_t total = burn_in.size();
  if (total < params.sample_size) {
    result.warnings.push_back("burn-in has " + std::to_string(total) + " events, fewer than the requested " +
                              std::to_string(params.sample_size) + "; using all of them");
    sample.resize(total);
    std::iota(sample.begin(), sample.end(), std::size_t{0});
  } else {
    for (std::size_t j = 0; j < params.sample_size; ++j) sample.push_back(j * total / params.sample_size);
  }
  result.sample_size = sample.size();

  std::vector<double> order(sample.size());
  std::iota(order.begin(), order.end(), 0.0);

  for (std::size_t f = 0; f < schema.size(); ++f) {
    FeatureMic entry;
    entry.name = schema[f].name;
    entry.shuffle_count = shuffles;

    std::vector<FeatureValue> raw;
    raw.reserve(sample.size());
    for (std::size_t i : sample) raw.push_back(burn_in[i].features.at(f));
    std::vector<double> x;
    if (schema[f].kind == FeatureKind::categorical) {
      x = category_codes(raw);
    } else {
      std::vector<double> present;
      for (const auto& v : raw) {
        if (const auto* d = std::get_if<double>(&v)) present.push_back(*d);
      }
      const double fill = median_of(present);
      for (const auto& v : raw) {
        const auto* d = std::get_if<double>(&v);
        x.push_back(d ? *d : fill);
      }
    }

    if (x.size() < kMinMicLength) {
      entry.warning = "too few burn-in points for MIC; feature kept";
      result.features.push_back(std::move(entry));
      continue;
    }
    if (is_constant(x)) {
      result.features.push_back(std::move(entry));
      continue;
    }

    const std::size_t groups = max_groups(x.size());
    const Partitions xp = equi_frequency_partitions(x, groups);
    const Partitions tp = equi_frequency_partitions(order, groups);
    entry.mic = mic_from_partitions(xp, tp, x.size());

    // Shuffling the series permutes its group labels.
    Rng rng(mix_seed(params.seed, f));
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Partitions shuffled = xp;
    for (std::size_t m = 0; m < shuffles; ++m) {
      rng.shuffle(std::span<std::size_t>(perm));
      for (std::size_t g = 0; g < xp.size(); ++g) {
        for (std::size_t i = 0; i < perm.size(); ++i) shuffled[g][i] = xp[g][perm[i]];
      }
      entry.shuffle_threshold = std::max(entry.shuffle_threshold, mic_from_partitions(shuffled, tp, x.size()));
    }
    entry.removed = entry.mic > entry.shuffle_threshold;
    result.features.push_back(std::move(entry));
  }
  return result;
}

}  // namespace scorewatch::explain

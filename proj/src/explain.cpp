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
#include <numeric>

#include "scorewatch/divergence.hpp"
#include "scorewatch/error.hpp"
#include "scorewatch/explain.hpp"
#include "scorewatch/rng.hpp"

namespace scorewatch::explain {

namespace {

double column_median(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::sort(values.begin(), values.end());
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

EncodedWindows encode(const WindowSnapshot& snapshot, const FeatureSchema& schema, const MicFilterResult& filter) {
  EncodedWindows out;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (f < filter.features.size() && filter.removed(f)) continue;
    out.kept_features.push_back(f);
    names.push_back(schema[f].name);
  }
  names.emplace_back(kScoreColumn);

  const std::size_t rows = snapshot.reference.size() + snapshot.target.size();
  auto event_at = [&](std::size_t i) -> const Event& {
    return i < snapshot.reference.size() ? snapshot.reference[i] : snapshot.target[i - snapshot.reference.size()];
  };

  // Column-major encoding first, then rows.
  std::vector<std::vector<double>> columns;
  for (std::size_t f : out.kept_features) {
    std::vector<FeatureValue> raw;
    raw.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) raw.push_back(event_at(i).features.at(f));
    if (schema[f].kind == FeatureKind::categorical) {
      columns.push_back(category_codes(raw));
      continue;
    }
    std::vector<double> present;
    for (const auto& v : raw) {
      if (const auto* d = std::get_if<double>(&v)) present.push_back(*d);
    }
    double fill = 0.0;
    if (present.empty()) {
      out.warnings.push_back("feature '" + schema[f].name + "' is missing in every event; encoded as 0");
    } else {
      if (present.size() < rows) fill = column_median(present);
    }
    std::vector<double> col;
    col.reserve(rows);
    for (const auto& v : raw) {
      const auto* d = std::get_if<double>(&v);
      col.push_back(d ? *d : fill);
    }
    columns.push_back(std::move(col));
  }

  out.matrix = gbdt::TrainingMatrix(std::move(names));
  std::vector<double> row(columns.size() + 1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) row[c] = columns[c][i];
    row.back() = event_at(i).score;
    out.matrix.add_row(row, i < snapshot.reference.size() ? 0 : 1);
  }
  out.reference_rows = snapshot.reference.size();
  out.target_rows = snapshot.target.size();
  return out;
}

std::vector<RankedEvent> rank_target_events(const gbdt::TreeEnsemble& model, const EncodedWindows& encoded,
                                            std::uint64_t target_first_index) {
  std::vector<RankedEvent> ranked;
  ranked.reserve(encoded.target_rows);
  for (std::size_t j = 0; j < encoded.target_rows; ++j) {
    const double score = gbdt::predict_proba(model, encoded.matrix.row(encoded.reference_rows + j));
    ranked.push_back({j, target_first_index + j, score});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedEvent& a, const RankedEvent& b) {
    if (a.alarm_score != b.alarm_score) return a.alarm_score > b.alarm_score;
    return a.position > b.position;
  });
  return ranked;
}

nlohmann::json ValidationCurve::to_json() const {
  return {{"k", k}, {"ranked_removal", ranked}, {"random_removal", random}, {"seed", seed}};
}

ValidationCurve validation_curve(const WindowSnapshot& snapshot, std::span<const RankedEvent> ranking,
                                 std::size_t step, std::size_t max_k, std::uint64_t seed, std::size_t bin_count) {
  const std::size_t n = snapshot.target.size();
  if (step == 0) throw RangeError("validation curve step must be positive");
  if (max_k >= n) throw RangeError("validation curve max_k must be smaller than the target window");
  if (ranking.size() < max_k) throw RangeError("validation curve needs a ranking of at least max_k events");

  ValidationCurve curve;
  curve.seed = seed;
  for (std::size_t k = 0; k <= max_k; k += step) curve.k.push_back(k);
  if (curve.k.back() != max_k) curve.k.push_back(max_k);

  const auto reference = ScoreHistogram::from_events(snapshot.reference, bin_count);
  const auto full = ScoreHistogram::from_events(snapshot.target, bin_count);

  std::vector<std::size_t> random_order(n);
  std::iota(random_order.begin(), random_order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(random_order));

  auto trace = [&](auto position_at, std::vector<double>& out) {
    ScoreHistogram target = full;
    std::size_t removed = 0;
    for (std::size_t k : curve.k) {
      while (removed < k) target.remove(snapshot.target[position_at(removed++)].score);
      out.push_back(jsd(reference, target));
    }
  };
  trace([&](std::size_t r) { return ranking[r].position; }, curve.ranked);
  trace([&](std::size_t r) { return random_order[r]; }, curve.random);
  return curve;
}

}  // namespace scorewatch::explain

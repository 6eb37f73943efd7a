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
#include <fstream>

#include "scorewatch/error.hpp"
#include "scorewatch/synthetic.hpp"

namespace scorewatch::synthetic {

namespace {

using nlohmann::json;

ScoreMixture mixture_from_json(const json& j) {
  ScoreMixture m;
  for (const auto& c : j.at("components")) {
    m.components.push_back({c.value("weight", 1.0), c.at("alpha").get<double>(), c.at("beta").get<double>()});
  }
  if (m.components.empty()) throw ConfigError("score mixture needs at least one component");
  for (const auto& c : m.components) {
    if (!(c.weight > 0.0 && c.alpha > 0.0 && c.beta > 0.0)) throw ConfigError("mixture weights and shapes must be positive");
  }
  return m;
}

std::vector<std::pair<std::string, double>> categories_from_json(const json& j) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [name, w] : j.items()) {
    if (!(w.get<double>() > 0.0)) throw ConfigError("category weight for '" + name + "' must be positive");
    out.emplace_back(name, w.get<double>());
  }
  return out;
}

const std::string& pick(Rng& rng, const std::vector<std::pair<std::string, double>>& weights) {
  double total = 0.0;
  for (const auto& [_, w] : weights) total += w;
  double u = rng.uniform() * total;
  for (const auto& [name, w] : weights) {
    if (u < w) return name;
    u -= w;
  }
  return weights.back().first;
}

}  // namespace

double ScoreMixture::sample(Rng& rng) const {
  double total = 0.0;
  for (const auto& c : components) total += c.weight;
  double u = rng.uniform() * total;
  const BetaComponent* chosen = &components.back();
  for (const auto& c : components) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  return std::clamp(rng.beta(chosen->alpha, chosen->beta), 0.0, 1.0);
}

SyntheticSpec SyntheticSpec::from_json(const json& doc) {
  try {
    SyntheticSpec s;
    s.events = doc.at("events").get<std::size_t>();
    s.seed = doc.value("seed", std::uint64_t{0});
    s.start_timestamp = doc.value("start_timestamp", s.start_timestamp);
    s.interval_ms = doc.value("interval_ms", s.interval_ms);
    s.score = mixture_from_json(doc.at("score"));
    for (const auto& f : doc.value("features", json::array())) {
      FeatureGenerator g;
      g.name = f.at("name").get<std::string>();
      const auto kind = f.value("kind", std::string("numeric"));
      g.missing_rate = f.value("missing_rate", 0.0);
      if (kind == "numeric") {
        g.numeric.mean = f.value("mean", 0.0);
        g.numeric.stddev = f.value("stddev", 1.0);
        g.numeric.trend = f.value("trend", 0.0);
        if (f.contains("step_at")) g.numeric.step_at = f.at("step_at").get<std::size_t>();
        g.numeric.step_shift = f.value("step_shift", 0.0);
      } else if (kind == "categorical") {
        g.kind = FeatureKind::categorical;
        g.categories = categories_from_json(f.at("categories"));
        if (g.categories.empty()) throw ConfigError("categorical feature '" + g.name + "' has no categories");
      } else {
        throw ConfigError("unknown feature kind '" + kind + "'");
      }
      s.features.push_back(std::move(g));
    }
    for (const auto& d : doc.value("drifts", json::array())) {
      DriftSegment seg;
      seg.start = d.at("start").get<std::size_t>();
      seg.length = d.at("length").get<std::size_t>();
      if (d.contains("score")) seg.score = mixture_from_json(d.at("score"));
      const json overrides = d.value("features", json::object());
      for (const auto& [name, o] : overrides.items()) {
        FeatureOverride fo;
        if (o.contains("mean")) fo.mean = o.at("mean").get<double>();
        if (o.contains("stddev")) fo.stddev = o.at("stddev").get<double>();
        if (o.contains("categories")) fo.categories = categories_from_json(o.at("categories"));
        seg.features.emplace(name, std::move(fo));
      }
      s.drifts.push_back(std::move(seg));
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
}

void SyntheticSpec::validate() const {
  if (events == 0) throw ConfigError("synthetic spec needs at least one event");
  if (interval_ms < 0) throw ConfigError("interval_ms must be non-negative");
  for (const auto& f : features) {
    if (!(f.missing_rate >= 0.0 && f.missing_rate <= 1.0)) throw ConfigError("missing_rate must be in [0, 1]");
    if (f.kind == FeatureKind::numeric && !(f.numeric.stddev >= 0.0)) throw ConfigError("stddev must be non-negative");
  }
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& d : drifts) {
    if (d.length == 0) throw ConfigError("drift segment length must be positive");
    if (d.start > events || d.length > events - d.start) throw ConfigError("drift segment extends past the stream");
    for (const auto& [name, o] : d.features) {
      const auto it = std::find_if(features.begin(), features.end(), [&](const auto& f) { return f.name == name; });
      if (it == features.end()) throw ConfigError("drift overrides unknown feature '" + name + "'");
      if (it->kind == FeatureKind::categorical && (o.mean || o.stddev)) {
        throw ConfigError("numeric override on categorical feature '" + name + "'");
      }
      if (it->kind == FeatureKind::numeric && !o.categories.empty()) {
        throw ConfigError("category override on numeric feature '" + name + "'");
      }
    }
    spans.emplace_back(d.start, d.start + d.length);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) throw ConfigError("drift segments overlap");
  }
  schema();
}

FeatureSchema SyntheticSpec::schema() const {
  std::vector<FeatureSpec> specs;
  for (const auto& f : features) specs.push_back({f.name, f.kind});
  return FeatureSchema(std::move(specs));
}

Generator::Generator(SyntheticSpec spec) : spec_(std::move(spec)), schema_(spec_.schema()), rng_(spec_.seed) {
  std::sort(spec_.drifts.begin(), spec_.drifts.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
}

const DriftSegment* Generator::segment_at(std::size_t i) const {
  for (const auto& d : spec_.drifts) {
    if (i < d.start) break;
    if (i < d.start + d.length) return &d;
  }
  return nullptr;
}

Event Generator::next(bool* drifted) {
  const std::size_t i = index_++;
  const DriftSegment* seg = segment_at(i);
  if (drifted) *drifted = seg != nullptr;

  Event e;
  e.timestamp = spec_.start_timestamp + static_cast<std::int64_t>(i) * spec_.interval_ms;
  e.score = (seg && seg->score ? *seg->score : spec_.score).sample(rng_);
  e.features.reserve(spec_.features.size());
  for (const auto& f : spec_.features) {
    const FeatureOverride* o = nullptr;
    if (seg) {
      const auto it = seg->features.find(f.name);
      if (it != seg->features.end()) o = &it->second;
    }
    // Draws happen in a fixed order so drifts do not shift later randomness.
    const double miss = rng_.uniform();
    if (f.kind == FeatureKind::numeric) {
      const double z = rng_.normal();
      double mean = o && o->mean ? *o->mean : f.numeric.mean;
      const double sd = o && o->stddev ? *o->stddev : f.numeric.stddev;
      mean += f.numeric.trend * static_cast<double>(i);
      if (f.numeric.step_at && i >= *f.numeric.step_at) mean += f.numeric.step_shift;
      e.features.push_back(miss < f.missing_rate ? FeatureValue(Missing{}) : FeatureValue(mean + sd * z));
    } else {
      const auto& cats = o && !o->categories.empty() ? o->categories : f.categories;
      const std::string& c = pick(rng_, cats);
      e.features.push_back(miss < f.missing_rate ? FeatureValue(Missing{}) : FeatureValue(c));
    }
  }
  e.extras["id"] = "e" + std::to_string(i);
  return e;
}

GeneratedFiles write(const SyntheticSpec& spec, const std::filesystem::path& out) {
  GeneratedFiles files;
  files.stream = out;
  files.truth = std::filesystem::path(out).replace_extension(".truth");
  files.schema = std::filesystem::path(out).replace_extension(".schema.json");

  Generator gen(spec);
  std::ofstream csv(files.stream, std::ios::binary);
  std::ofstream truth(files.truth, std::ios::binary);
  std::ofstream schema(files.schema, std::ios::binary);
  if (!csv || !truth || !schema) throw Error("cannot write generator output next to " + out.string());

  schema << gen.schema().to_json().dump(2) << '\n';
  const std::vector<std::string> extras = {"id"};
  csv << csv_header(gen.schema(), extras) << '\n';
  while (!gen.done()) {
    bool drifted = false;
    const std::size_t i = gen.index();
    const Event e = gen.next(&drifted);
    csv << to_csv_row(e, extras) << '\n';
    if (drifted) {
      truth << i << '\n';
      ++files.drifted;
    }
    ++files.events;
  }
  csv.flush();
  truth.flush();
  if (!csv || !truth) throw Error("write failed for " + out.string());
  return files;
}

}  // namespace scorewatch::synthetic

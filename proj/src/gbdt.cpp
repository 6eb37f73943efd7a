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

#include "scorewatch/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scorewatch/error.hpp"
#include "scorewatch/rng.hpp"

namespace scorewatch::gbdt {

namespace {

constexpr double kMinGain = 1e-12;
constexpr double kMinHessian = 1e-12;
constexpr double kBaseRateClamp = 1e-6;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log sigmoid(z) for y = 1, -log(1 - sigmoid(z)) for y = 0.
double log_loss(double z, int y) {
  const double m = y == 1 ? -z : z;
  return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m)));
}

double mean_loss(const TrainingMatrix& data, std::span<const double> raw, double total_weight) {
  double loss = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) loss += data.weight(i) * log_loss(raw[i], data.label(i));
  return loss / total_weight;
}

struct NodeStats {
  double weight = 0.0;    // sum w
  double residual = 0.0;  // sum w r
  std::size_t count = 0;
};

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  NodeStats left;
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingMatrix& data, const std::vector<std::vector<std::size_t>>& order, const Params& params)
      : data_(data), order_(order), params_(params), node_of_(data.rows(), 0) {}

  // Fits one least-squares tree to the residuals; leaves carry Newton steps.
  RegressionTree build(std::span<const double> residual, std::span<const double> hessian,
                       std::vector<double>& importance) {
    RegressionTree tree;
    auto& nodes = tree.nodes();
    std::fill(node_of_.begin(), node_of_.end(), 0);
    NodeStats root;
    for (std::size_t i = 0; i < data_.rows(); ++i) {
      root.weight += data_.weight(i);
      root.residual += data_.weight(i) * residual[i];
      ++root.count;
    }
    nodes.push_back(TreeNode{});
    nodes[0].samples = root.count;
    std::vector<NodeStats> stats{root};
    std::vector<int> frontier{0};

    for (std::size_t depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> slot(nodes.size(), -1);
      std::vector<int> open;
      for (int nd : frontier) {
        const auto& s = stats[nd];
        if (s.count >= params_.min_samples_split && s.count >= 2 * params_.min_samples_leaf && s.weight > 0.0) {
          slot[nd] = static_cast<int>(open.size());
          open.push_back(nd);
        }
      }
      if (open.empty()) break;

      std::vector<SplitCandidate> best(open.size());
      std::vector<NodeStats> running(open.size());
      std::vector<double> last(open.size());
      std::vector<char> seen(open.size());
      for (std::size_t f = 0; f < data_.cols(); ++f) {
        std::fill(running.begin(), running.end(), NodeStats{});
        std::fill(seen.begin(), seen.end(), 0);
        for (std::size_t i : order_[f]) {
          const int s = slot[node_of_[i]];
          if (s < 0) continue;
          const double v = data_.at(i, f);
          auto& left = running[s];
          if (seen[s] && v > last[s]) {
            const auto& parent = stats[open[s]];
            const std::size_t right_count = parent.count - left.count;
            const double right_weight = parent.weight - left.weight;
            if (left.count >= params_.min_samples_leaf && right_count >= params_.min_samples_leaf &&
                left.weight > 0.0 && right_weight > 0.0) {
              const double right_residual = parent.residual - left.residual;
              const double gain = left.residual * left.residual / left.weight +
                                  right_residual * right_residual / right_weight -
                                  parent.residual * parent.residual / parent.weight;
              if (gain > best[s].gain) {
                double threshold = 0.5 * (last[s] + v);
                if (!(threshold < v)) threshold = last[s];
                best[s] = SplitCandidate{gain, static_cast<int>(f), threshold, left};
              }
            }
          }
          const double w = data_.weight(i);
          left.weight += w;
          left.residual += w * residual[i];
          ++left.count;
          last[s] = v;
          seen[s] = 1;
        }
      }

      std::vector<int> next;
      std::vector<int> split_left(nodes.size(), -1);
      for (std::size_t s = 0; s < open.size(); ++s) {
        const auto& cand = best[s];
        if (cand.feature < 0 || !(cand.gain > kMinGain)) continue;
        const int nd = open[s];
        const auto& parent = stats[nd];
        NodeStats right{parent.weight - cand.left.weight, parent.residual - cand.left.residual,
                        parent.count - cand.left.count};
        const int l = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        nodes.push_back(TreeNode{});
        stats.push_back(cand.left);
        stats.push_back(right);
        auto& node = nodes[nd];
        node.feature = cand.feature;
        node.threshold = cand.threshold;
        node.gain = cand.gain;
        node.left = l;
        node.right = l + 1;
        nodes[l].samples = cand.left.count;
        nodes[l + 1].samples = right.count;
        importance[cand.feature] += cand.gain;
        split_left[nd] = l;
        next.push_back(l);
        next.push_back(l + 1);
      }
      if (next.empty()) break;
      for (std::size_t i = 0; i < data_.rows(); ++i) {
        const int nd = node_of_[i];
        if (nd >= static_cast<int>(split_left.size()) || split_left[nd] < 0) continue;
        const auto& node = nodes[nd];
        node_of_[i] = data_.at(i, node.feature) <= node.threshold ? node.left : node.right;
      }
      frontier = std::move(next);
    }

    std::vector<double> numerator(nodes.size(), 0.0), denominator(nodes.size(), 0.0);
    for (std::size_t i = 0; i < data_.rows(); ++i) {
      numerator[node_of_[i]] += data_.weight(i) * residual[i];
      denominator[node_of_[i]] += data_.weight(i) * hessian[i];
    }
    for (std::size_t nd = 0; nd < nodes.size(); ++nd) {
      if (nodes[nd].feature >= 0) continue;
      nodes[nd].value = denominator[nd] > kMinHessian ? numerator[nd] / denominator[nd] : 0.0;
    }
    return tree;
  }

  const std::vector<int>& node_of() const { return node_of_; }

 private:
  const TrainingMatrix& data_;
  const std::vector<std::vector<std::size_t>>& order_;
  const Params& params_;
  std::vector<int> node_of_;
};

nlohmann::json node_to_json(const RegressionTree& tree, const std::vector<std::string>& names, int nd) {
  const auto& node = tree.nodes()[nd];
  if (node.feature < 0) return {{"leaf", node.value}, {"samples", node.samples}};
  return {{"feature", names[node.feature]},
          {"feature_index", node.feature},
          {"threshold", node.threshold},
          {"gain", node.gain},
          {"samples", node.samples},
          {"left", node_to_json(tree, names, node.left)},
          {"right", node_to_json(tree, names, node.right)}};
}

int node_from_json(const nlohmann::json& doc, std::vector<TreeNode>& nodes) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back(TreeNode{});
  TreeNode node;
  node.samples = doc.value("samples", std::size_t{0});
  if (doc.contains("leaf")) {
    node.value = doc.at("leaf").get<double>();
  } else {
    node.feature = doc.at("feature_index").get<int>();
    node.threshold = doc.at("threshold").get<double>();
    node.gain = doc.value("gain", 0.0);
    node.left = node_from_json(doc.at("left"), nodes);
    node.right = node_from_json(doc.at("right"), nodes);
  }
  nodes[id] = node;
  return id;
}

}  // namespace

void TrainingMatrix::add_row(std::span<const double> features, int label, double weight) {
  if (features.size() != cols()) throw ModelError("training row arity does not match the column count");
  if (label != 0 && label != 1) throw ModelError("labels must be 0 or 1");
  if (!(weight >= 0.0)) throw ModelError("weights must be non-negative");
  values_.insert(values_.end(), features.begin(), features.end());
  labels_.push_back(label);
  weights_.push_back(weight);
}

TrainingMatrix TrainingMatrix::subset(std::span<const std::size_t> indices) const {
  TrainingMatrix out(column_names_);
  for (std::size_t i : indices) out.add_row(row(i), labels_[i], weights_[i]);
  return out;
}

double RegressionTree::predict(std::span<const double> x) const {
  int nd = 0;
  while (nodes_[nd].feature >= 0) {
    const auto& node = nodes_[nd];
    nd = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return nodes_[nd].value;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t nd = 0; nd < nodes_.size(); ++nd) {
    const auto& node = nodes_[nd];
    if (node.feature < 0) continue;
    depth[node.left] = depth[node.right] = depth[nd] + 1;
    deepest = std::max(deepest, depth[nd] + 1);
  }
  return deepest;
}

double TreeEnsemble::raw_score(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(x);
  return initial_score + learning_rate * sum;
}

nlohmann::json TreeEnsemble::to_json() const {
  nlohmann::json doc;
  doc["initial_score"] = initial_score;
  doc["learning_rate"] = learning_rate;
  doc["columns"] = column_names;
  doc["importance"] = importance;
  doc["degenerate"] = degenerate;
  doc["trees"] = nlohmann::json::array();
  for (const auto& tree : trees) doc["trees"].push_back(node_to_json(tree, column_names, 0));
  return doc;
}

TreeEnsemble TreeEnsemble::from_json(const nlohmann::json& doc) {
  TreeEnsemble model;
  model.initial_score = doc.at("initial_score").get<double>();
  model.learning_rate = doc.at("learning_rate").get<double>();
  model.column_names = doc.at("columns").get<std::vector<std::string>>();
  model.importance = doc.at("importance").get<std::vector<double>>();
  model.degenerate = doc.value("degenerate", false);
  for (const auto& t : doc.at("trees")) {
    RegressionTree tree;
    node_from_json(t, tree.nodes());
    model.trees.push_back(std::move(tree));
  }
  return model;
}

TreeEnsemble fit(const TrainingMatrix& data, const Params& params) {
  if (data.rows() == 0) throw ModelError("cannot fit on empty data");
  if (data.cols() == 0) throw ModelError("cannot fit without feature columns");

  TreeEnsemble model;
  model.learning_rate = params.learning_rate;
  model.column_names = data.column_names();
  model.importance.assign(data.cols(), 0.0);

  double total_weight = 0.0, positive_weight = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    total_weight += data.weight(i);
    if (data.label(i) == 1) positive_weight += data.weight(i);
  }
  if (!(total_weight > 0.0)) throw ModelError("training weights sum to zero");
  double base_rate = positive_weight / total_weight;
  if (base_rate <= 0.0 || base_rate >= 1.0) model.degenerate = true;
  base_rate = std::clamp(base_rate, kBaseRateClamp, 1.0 - kBaseRateClamp);
  model.initial_score = std::log(base_rate / (1.0 - base_rate));

  std::vector<double> raw(data.rows(), model.initial_score);
  model.training_loss.push_back(mean_loss(data, raw, total_weight));
  if (model.degenerate) return model;

  std::vector<std::vector<std::size_t>> order(data.cols());
  for (std::size_t f = 0; f < data.cols(); ++f) {
    auto& idx = order[f];
    idx.resize(data.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data.at(a, f) < data.at(b, f); });
  }

  TreeBuilder builder(data, order, params);
  std::vector<double> residual(data.rows()), hessian(data.rows());
  for (std::size_t t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const double p = sigmoid(raw[i]);
      residual[i] = static_cast<double>(data.label(i)) - p;
      hessian[i] = p * (1.0 - p);
    }
    RegressionTree tree = builder.build(residual, hessian, model.importance);
    const auto& node_of = builder.node_of();
    for (std::size_t i = 0; i < data.rows(); ++i) raw[i] += params.learning_rate * tree.nodes()[node_of[i]].value;
    model.trees.push_back(std::move(tree));
    model.training_loss.push_back(mean_loss(data, raw, total_weight));
  }
  return model;
}

double predict_proba(const TreeEnsemble& model, std::span<const double> x) {
  if (x.size() != model.column_names.size()) throw ModelError("feature vector arity does not match the model");
  return sigmoid(model.raw_score(x));
}

std::vector<std::pair<std::string, double>> feature_importance(const TreeEnsemble& model) {
  std::vector<std::size_t> idx(model.importance.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return model.importance[a] > model.importance[b]; });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.emplace_back(model.column_names[i], model.importance[i]);
  return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ModelError("auc: scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  double positives = 0.0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t end = start;
    while (end < idx.size() && scores[idx[end]] == scores[idx[start]]) ++end;
    const double mid_rank = 0.5 * static_cast<double>(start + 1 + end);  // mean of ranks start+1..end
    for (std::size_t j = start; j < end; ++j) {
      if (labels[idx[j]] == 1) {
        positive_rank_sum += mid_rank;
        positives += 1.0;
      }
    }
    start = end;
  }
  const double negatives = static_cast<double>(scores.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw ModelError("auc needs both classes");
  const double u = positive_rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ModelError("roc: scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double positives = 0.0;
  for (int y : labels) positives += y == 1 ? 1.0 : 0.0;
  const double negatives = static_cast<double>(labels.size()) - positives;
  if (positives == 0.0 || negatives == 0.0) throw ModelError("roc needs both classes");
  std::vector<RocPoint> curve{{0.0, 0.0}};
  double tp = 0.0, fp = 0.0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t end = start;
    while (end < idx.size() && scores[idx[end]] == scores[idx[start]]) {
      (labels[idx[end]] == 1 ? tp : fp) += 1.0;
      ++end;
    }
    curve.push_back({fp / negatives, tp / positives});
    start = end;
  }
  return curve;
}

CvResult kfold_auc(const TrainingMatrix& data, std::size_t k, const Params& params, std::uint64_t seed) {
  std::vector<std::size_t> positives, negatives;
  for (std::size_t i = 0; i < data.rows(); ++i) (data.label(i) == 1 ? positives : negatives).push_back(i);
  if (positives.empty() || negatives.empty()) throw ModelError("cross-validation needs both classes");

  CvResult result;
  std::size_t folds = std::min({k, positives.size(), negatives.size()});
  if (folds < 2) throw ModelError("cross-validation needs at least two rows of each class");
  if (folds < k) {
    result.warnings.push_back("reduced cross-validation folds from " + std::to_string(k) + " to " +
                              std::to_string(folds) + ": smallest class has too few rows");
  }
  result.folds = folds;

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(positives));
  rng.shuffle(std::span<std::size_t>(negatives));
  std::vector<std::size_t> fold_of(data.rows());
  for (std::size_t j = 0; j < positives.size(); ++j) fold_of[positives[j]] = j % folds;
  for (std::size_t j = 0; j < negatives.size(); ++j) fold_of[negatives[j]] = j % folds;

  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.rows(); ++i) (fold_of[i] == fold ? test : train).push_back(i);
    const TreeEnsemble model = fit(data.subset(train), params);
    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(test.size());
    for (std::size_t i : test) {
      scores.push_back(predict_proba(model, data.row(i)));
      labels.push_back(data.label(i));
    }
    result.fold_aucs.push_back(auc(scores, labels));
    result.roc.push_back(roc_curve(scores, labels));
  }
  result.mean_auc = std::accumulate(result.fold_aucs.begin(), result.fold_aucs.end(), 0.0) /
                    static_cast<double>(folds);
  return result;
}

}  // namespace scorewatch::gbdt

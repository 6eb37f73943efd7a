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

// Small gradient-boosted tree classifier (logistic loss) used to tell target
// window events from reference window events.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace scorewatch::gbdt {

/// Row-major dense matrix with binary labels and non-negative weights.
class TrainingMatrix {
 public:
  TrainingMatrix() = default;
  explicit TrainingMatrix(std::vector<std::string> column_names) : column_names_(std::move(column_names)) {}

  void add_row(std::span<const double> features, int label, double weight = 1.0);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return column_names_.size(); }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
  double at(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  int label(std::size_t i) const { return labels_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

  /// Rows at the given indices, in that order.
  TrainingMatrix subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> column_names_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::vector<double> weights_;
};

struct Params {
  std::size_t trees = 50;
  std::size_t max_depth = 5;
  double learning_rate = 0.1;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // Newton step (leaves)
  std::size_t samples = 0;
  double gain = 0.0;  // weighted squared-error reduction of the split
};

class RegressionTree {
 public:
  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& nodes() { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeEnsemble {
  double initial_score = 0.0;  // log-odds of the weighted base rate
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;
  std::vector<std::string> column_names;
  std::vector<double> importance;     // total split gain per column
  std::vector<double> training_loss;  // mean log-loss after 0..trees iterations
  bool degenerate = false;            // single-class training data

  double raw_score(std::span<const double> x) const;
  nlohmann::json to_json() const;
  static TreeEnsemble from_json(const nlohmann::json& doc);
};

/// Throws ModelError on empty data or ragged rows.
TreeEnsemble fit(const TrainingMatrix& data, const Params& params = {});

/// sigmoid(initial + lr * sum tree(x)). Throws ModelError on arity mismatch.
double predict_proba(const TreeEnsemble& model, std::span<const double> x);

/// Columns by total gain, descending; ties keep column order.
std::vector<std::pair<std::string, double>> feature_importance(const TreeEnsemble& model);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Area under the ROC curve from mid-ranks (ties count one half).
double auc(std::span<const double> scores, std::span<const int> labels);
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

struct CvResult {
  std::size_t folds = 0;
  double mean_auc = 0.0;
  std::vector<double> fold_aucs;
  std::vector<std::vector<RocPoint>> roc;
  std::vector<std::string> warnings;
};

/// Stratified k-fold cross-validated AUC; k shrinks (with a warning) when a
/// class has fewer than k rows. Throws ModelError if a class is absent.
CvResult kfold_auc(const TrainingMatrix& data, std::size_t k = 5, const Params& params = {},
                   std::uint64_t seed = 0);

}  // namespace scorewatch::gbdt

#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <utility>
#include <vector>

namespace clonedet {

// Binary classification throughout; class labels are 0 and 1.

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, 2> class_distribution = {0.0, 0.0};

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at index 0

  // Class distribution of the leaf the row lands in. Rows go left when
  // value <= threshold.
  std::array<double, 2> predict_proba(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

enum class ForestKind { RandomForest, ExtraTrees };

std::string to_string(ForestKind kind);
ForestKind parse_forest_kind(const std::string& text);

struct TreeConfig {
  ForestKind kind = ForestKind::RandomForest;
  int max_features = 0;  // candidate features per split; 0 evaluates all
  int max_depth = 25;
  int min_samples_split = 2;
  unsigned long long seed = 0;
};

// Trains a single tree on rows sample_indices of X (duplicates allowed, so
// the forest can pass bootstrap samples). RandomForest picks the best Gini
// split over midpoint thresholds of each candidate feature's sorted unique
// values; ExtraTrees draws one uniform threshold per candidate feature.
// Gain ties break to the lowest feature index, then the lowest threshold.
DecisionTree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const std::vector<int>& sample_indices, const TreeConfig& config);
DecisionTree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const TreeConfig& config);  // full sample

struct ForestModel {
  ForestKind kind = ForestKind::RandomForest;
  int num_features = 0;
  unsigned long long seed = 0;
  std::vector<DecisionTree> trees;
};

// RandomForest bootstraps each tree's sample; ExtraTrees trains every tree
// on the full sample. Per-tree seeds derive from (seed, tree index), so
// results do not depend on training order. max_features -1 selects
// floor(sqrt(d)). Requires both classes present.
ForestModel train_forest(const Eigen::MatrixXd& x, const std::vector<int>& y, ForestKind kind,
                         int n_trees, unsigned long long seed, int max_features = -1);

// Mean of the per-tree leaf distributions, one row per input row.
Eigen::MatrixXd predict_proba_forest(const ForestModel& model, const Eigen::MatrixXd& x);

struct LogisticModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double l2_penalty = 0.0;
};

// Mean log-loss plus l2_penalty * ||w||^2 / 2 (intercept excluded).
double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                     const Eigen::VectorXd& w, double intercept, double l2_penalty);
// Analytic gradient of logistic_loss; returns (d/dw, d/db).
std::pair<Eigen::VectorXd, double> logistic_gradient(const Eigen::MatrixXd& x,
                                                     const std::vector<int>& y,
                                                     const Eigen::VectorXd& w, double intercept,
                                                     double l2_penalty);

// Full-batch gradient descent from zero parameters, learning rate
// learning_rate / sqrt(t) at epoch t. Inputs are assumed pre-scaled to
// [0,1]. Requires finite features and both classes present.
LogisticModel train_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             double l2_penalty = 1e-3, int epochs = 500,
                             double learning_rate = 0.1);

// Column 1 is sigmoid(x w + b); column 0 its complement (rows sum to 1).
Eigen::MatrixXd predict_proba_logistic(const LogisticModel& model, const Eigen::MatrixXd& x);

}  // namespace clonedet

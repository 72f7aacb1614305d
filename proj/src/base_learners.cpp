#include "clonedet/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clonedet/rng.hpp"

namespace clonedet {

// ---------------------------------------------------------------------------
// Decision trees
// ---------------------------------------------------------------------------

std::string to_string(ForestKind kind) {
  return kind == ForestKind::RandomForest ? "random_forest" : "extra_trees";
}

ForestKind parse_forest_kind(const std::string& text) {
  if (text == "random_forest") return ForestKind::RandomForest;
  if (text == "extra_trees") return ForestKind::ExtraTrees;
  throw std::invalid_argument("unknown forest kind: " + text);
}

std::array<double, 2> DecisionTree::predict_proba(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const TreeNode& cur = nodes[static_cast<std::size_t>(node)];
    node = (row(cur.feature) <= cur.threshold) ? cur.left : cur.right;
  }
  return nodes[static_cast<std::size_t>(node)].class_distribution;
}

namespace {

double gini_impurity(double count0, double count1) {
  const double total = count0 + count1;
  if (total <= 0.0) return 0.0;
  const double p0 = count0 / total;
  const double p1 = count1 / total;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct BestSplit {
  bool found = false;
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Gain ties break to the lowest feature index, then the lowest threshold,
// so the chosen split never depends on the random feature order.
void consider(BestSplit& best, double gain, int feature, double threshold) {
  if (!best.found || gain > best.gain ||
      (gain == best.gain &&
       (feature < best.feature || (feature == best.feature && threshold < best.threshold)))) {
    best = {true, gain, feature, threshold};
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const std::vector<int>& y, const TreeConfig& config)
      : x_(x), y_(y), config_(config), rng_(config.seed) {}

  DecisionTree build(std::vector<int> samples) {
    DecisionTree tree;
    grow(tree, std::move(samples), 0);
    return tree;
  }

 private:
  int make_leaf(DecisionTree& tree, const std::vector<int>& samples) {
    double count0 = 0.0;
    double count1 = 0.0;
    for (int i : samples) (y_[static_cast<std::size_t>(i)] == 0 ? count0 : count1) += 1.0;
    const double total = count0 + count1;
    TreeNode node;
    node.class_distribution = {count0 / total, count1 / total};
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  // Midpoint of consecutive sorted unique values; falls back to the lower
  // value when rounding would let the upper value leak into the left child.
  static double midpoint(double lo, double hi) {
    const double mid = lo + (hi - lo) / 2.0;
    return mid >= hi ? lo : mid;
  }

  void best_gini_split(BestSplit& best, const std::vector<int>& samples, int feature,
                       double parent_impurity) {
    std::vector<std::pair<double, int>> values;
    values.reserve(samples.size());
    for (int i : samples)
      values.emplace_back(x_(i, feature), y_[static_cast<std::size_t>(i)]);
    std::sort(values.begin(), values.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const double total = static_cast<double>(values.size());
    double total1 = 0.0;
    for (const auto& [value, label] : values) total1 += label;
    const double total0 = total - total1;

    double left0 = 0.0;
    double left1 = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      (values[i].second == 0 ? left0 : left1) += 1.0;
      if (values[i].first == values[i + 1].first) continue;
      const double left_n = left0 + left1;
      const double right_n = total - left_n;
      const double child_impurity = (left_n / total) * gini_impurity(left0, left1) +
                                    (right_n / total) * gini_impurity(total0 - left0, total1 - left1);
      consider(best, parent_impurity - child_impurity, feature,
               midpoint(values[i].first, values[i + 1].first));
    }
  }

  void random_split(BestSplit& best, const std::vector<int>& samples, int feature,
                    double parent_impurity, double min_value, double max_value) {
    double threshold = min_value + rng_.next_double() * (max_value - min_value);
    if (threshold >= max_value) threshold = std::nextafter(max_value, min_value);
    double left0 = 0.0, left1 = 0.0, right0 = 0.0, right1 = 0.0;
    for (int i : samples) {
      const bool left = x_(i, feature) <= threshold;
      if (y_[static_cast<std::size_t>(i)] == 0)
        (left ? left0 : right0) += 1.0;
      else
        (left ? left1 : right1) += 1.0;
    }
    const double total = static_cast<double>(samples.size());
    const double child_impurity =
        ((left0 + left1) / total) * gini_impurity(left0, left1) +
        ((right0 + right1) / total) * gini_impurity(right0, right1);
    consider(best, parent_impurity - child_impurity, feature, threshold);
  }

  int grow(DecisionTree& tree, std::vector<int> samples, int depth) {
    double count0 = 0.0;
    double count1 = 0.0;
    for (int i : samples) (y_[static_cast<std::size_t>(i)] == 0 ? count0 : count1) += 1.0;
    const bool pure = count0 == 0.0 || count1 == 0.0;
    if (pure || static_cast<int>(samples.size()) < config_.min_samples_split ||
        depth >= config_.max_depth) {
      return make_leaf(tree, samples);
    }

    // Candidate features come from a fresh random order each node; constant
    // features are skipped without consuming the max_features budget.
    const int d = static_cast<int>(x_.cols());
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    for (int i = d - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[rng_.next_index(static_cast<std::size_t>(i) + 1)]);
    const int budget = config_.max_features > 0 ? config_.max_features : d;
    const double parent_impurity = gini_impurity(count0, count1);

    BestSplit best;
    int evaluated = 0;
    for (int feature : order) {
      if (evaluated >= budget) break;
      double min_value = x_(samples[0], feature);
      double max_value = min_value;
      for (int i : samples) {
        const double v = x_(i, feature);
        min_value = std::min(min_value, v);
        max_value = std::max(max_value, v);
      }
      if (min_value == max_value) continue;
      ++evaluated;
      if (config_.kind == ForestKind::RandomForest) {
        best_gini_split(best, samples, feature, parent_impurity);
      } else {
        random_split(best, samples, feature, parent_impurity, min_value, max_value);
      }
    }
    if (!best.found) return make_leaf(tree, samples);

    std::vector<int> left_samples;
    std::vector<int> right_samples;
    for (int i : samples) {
      (x_(i, best.feature) <= best.threshold ? left_samples : right_samples).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    const int node_index = static_cast<int>(tree.nodes.size());
    TreeNode node;
    node.feature = best.feature;
    node.threshold = best.threshold;
    tree.nodes.push_back(node);
    const int left = grow(tree, std::move(left_samples), depth + 1);
    const int right = grow(tree, std::move(right_samples), depth + 1);
    tree.nodes[static_cast<std::size_t>(node_index)].left = left;
    tree.nodes[static_cast<std::size_t>(node_index)].right = right;
    return node_index;
  }

  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  TreeConfig config_;
  Rng rng_;
};

void validate_labels(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw std::invalid_argument("row count does not match label count");
  bool saw0 = false;
  bool saw1 = false;
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
    (label == 0 ? saw0 : saw1) = true;
  }
  if (!saw0 || !saw1) throw std::runtime_error("degenerate labels: both classes required");
}

}  // namespace

DecisionTree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const std::vector<int>& sample_indices, const TreeConfig& config) {
  if (sample_indices.empty()) throw std::invalid_argument("empty sample set");
  TreeBuilder builder(x, y, config);
  return builder.build(sample_indices);
}

DecisionTree train_tree(const Eigen::MatrixXd& x, const std::vector<int>& y,
                        const TreeConfig& config) {
  std::vector<int> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), 0);
  return train_tree(x, y, all, config);
}

ForestModel train_forest(const Eigen::MatrixXd& x, const std::vector<int>& y, ForestKind kind,
                         int n_trees, unsigned long long seed, int max_features) {
  if (x.rows() < 2) throw std::invalid_argument("need at least two training rows");
  if (n_trees < 1) throw std::invalid_argument("n_trees must be positive");
  validate_labels(x, y);

  const int d = static_cast<int>(x.cols());
  if (max_features < 0)
    max_features = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d))));

  ForestModel model;
  model.kind = kind;
  model.num_features = d;
  model.seed = seed;
  model.trees.reserve(static_cast<std::size_t>(n_trees));
  const int n = static_cast<int>(x.rows());
  for (int t = 0; t < n_trees; ++t) {
    const unsigned long long tree_seed = Rng::mix(seed, static_cast<unsigned long long>(t));
    std::vector<int> samples;
    if (kind == ForestKind::RandomForest) {
      Rng bootstrap_rng(Rng::mix(tree_seed, 0xB005ULL));
      samples.resize(static_cast<std::size_t>(n));
      for (int& s : samples)
        s = static_cast<int>(bootstrap_rng.next_below(static_cast<std::uint64_t>(n)));
    } else {
      samples.resize(static_cast<std::size_t>(n));
      std::iota(samples.begin(), samples.end(), 0);
    }
    TreeConfig config;
    config.kind = kind;
    config.max_features = max_features;
    config.seed = Rng::mix(tree_seed, 0x7133ULL);
    model.trees.push_back(train_tree(x, y, samples, config));
  }
  return model;
}

Eigen::MatrixXd predict_proba_forest(const ForestModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<int>(x.cols()) != model.num_features)
    throw std::invalid_argument("feature count does not match training");
  Eigen::MatrixXd proba = Eigen::MatrixXd::Zero(x.rows(), 2);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double p0 = 0.0;
    double p1 = 0.0;
    for (const DecisionTree& tree : model.trees) {
      const auto dist = tree.predict_proba(x.row(r));
      p0 += dist[0];
      p1 += dist[1];
    }
    const double n_trees = static_cast<double>(model.trees.size());
    proba(r, 0) = p0 / n_trees;
    proba(r, 1) = p1 / n_trees;
  }
  return proba;
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                     const Eigen::VectorXd& w, double intercept, double l2_penalty) {
  const Eigen::VectorXd z = (x * w).array() + intercept;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += softplus(z(i)) - static_cast<double>(y[static_cast<std::size_t>(i)]) * z(i);
  }
  return total / static_cast<double>(z.size()) + l2_penalty * w.squaredNorm() / 2.0;
}

std::pair<Eigen::VectorXd, double> logistic_gradient(const Eigen::MatrixXd& x,
                                                     const std::vector<int>& y,
                                                     const Eigen::VectorXd& w, double intercept,
                                                     double l2_penalty) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd residual(n);
  const Eigen::VectorXd z = (x * w).array() + intercept;
  for (Eigen::Index i = 0; i < n; ++i)
    residual(i) = sigmoid(z(i)) - static_cast<double>(y[static_cast<std::size_t>(i)]);
  Eigen::VectorXd grad_w = x.transpose() * residual / static_cast<double>(n) + l2_penalty * w;
  const double grad_b = residual.sum() / static_cast<double>(n);
  return {std::move(grad_w), grad_b};
}

LogisticModel train_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             double l2_penalty, int epochs, double learning_rate) {
  if (!x.allFinite()) throw std::invalid_argument("non-finite feature value");
  if (epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be >= 0");
  validate_labels(x, y);

  LogisticModel model;
  model.coefficients = Eigen::VectorXd::Zero(x.cols());
  model.intercept = 0.0;
  model.l2_penalty = l2_penalty;
  for (int t = 1; t <= epochs; ++t) {
    const auto [grad_w, grad_b] =
        logistic_gradient(x, y, model.coefficients, model.intercept, l2_penalty);
    const double rate = learning_rate / std::sqrt(static_cast<double>(t));
    model.coefficients -= rate * grad_w;
    model.intercept -= rate * grad_b;
  }
  return model;
}

Eigen::MatrixXd predict_proba_logistic(const LogisticModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.coefficients.size())
    throw std::invalid_argument("feature count does not match training");
  Eigen::MatrixXd proba(x.rows(), 2);
  const Eigen::VectorXd z = (x * model.coefficients).array() + model.intercept;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double p1 = sigmoid(z(i));
    proba(i, 1) = p1;
    proba(i, 0) = 1.0 - p1;
  }
  return proba;
}

}  // namespace clonedet

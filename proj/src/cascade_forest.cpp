#include "clonedet/cascade_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "clonedet/rng.hpp"

namespace clonedet {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::RandomForest: return "random_forest";
    case LearnerKind::ExtraTrees: return "extra_trees";
    case LearnerKind::Logistic: return "logistic";
  }
  throw std::logic_error("unreachable learner kind");
}

LearnerKind parse_learner_kind(const std::string& text) {
  if (text == "random_forest") return LearnerKind::RandomForest;
  if (text == "extra_trees") return LearnerKind::ExtraTrees;
  if (text == "logistic") return LearnerKind::Logistic;
  throw std::invalid_argument("unknown learner kind: " + text);
}

std::vector<LearnerSpec> default_learner_set() {
  LearnerSpec rf;
  rf.kind = LearnerKind::RandomForest;
  LearnerSpec ert;
  ert.kind = LearnerKind::ExtraTrees;
  LearnerSpec lr;
  lr.kind = LearnerKind::Logistic;
  return {rf, rf, ert, lr};
}

std::vector<LearnerSpec> uniform_learner_set(LearnerKind kind) {
  LearnerSpec spec;
  spec.kind = kind;
  return {spec, spec, spec, spec};
}

void CascadeConfig::validate() const {
  if (learners.empty()) throw std::invalid_argument("cascade needs at least one learner");
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (max_levels < 1) throw std::invalid_argument("max_levels must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("validation_fraction must be in (0,1)");
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

std::vector<int> take_labels(const std::vector<int>& y, const std::vector<int>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
  return out;
}

void shuffle_indices(std::vector<int>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i)
    std::swap(indices[i - 1], indices[rng.next_index(i)]);
}

// Per-class shuffle, then a validation_fraction share of each class is held
// out; membership is random but both lists come back sorted.
void stratified_validation_split(const std::vector<int>& y, double fraction,
                                 unsigned long long seed, std::vector<int>& train_rows,
                                 std::vector<int>& validation_rows) {
  std::vector<int> by_class[2];
  for (std::size_t i = 0; i < y.size(); ++i)
    by_class[y[i] == 0 ? 0 : 1].push_back(static_cast<int>(i));
  for (int c = 0; c < 2; ++c) {
    Rng rng(Rng::mix(seed, 0x5713ULL + static_cast<unsigned long long>(c)));
    shuffle_indices(by_class[c], rng);
    int take = static_cast<int>(fraction * static_cast<double>(by_class[c].size()));
    take = std::min(take, static_cast<int>(by_class[c].size()) - 1);
    take = std::max(take, 0);
    for (std::size_t i = 0; i < by_class[c].size(); ++i)
      (static_cast<int>(i) < take ? validation_rows : train_rows).push_back(by_class[c][i]);
  }
  if (validation_rows.empty()) {
    // Tiny datasets can round every class share to zero; hold out one row
    // of the larger class so the stopping rule has something to measure.
    const int c = by_class[0].size() >= by_class[1].size() ? 0 : 1;
    const int moved = by_class[c][0];
    validation_rows.push_back(moved);
    train_rows.erase(std::find(train_rows.begin(), train_rows.end(), moved));
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(validation_rows.begin(), validation_rows.end());
}

// Stratified k folds: shuffled class members are dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& y, int folds, unsigned long long seed) {
  std::vector<int> assignment(y.size(), 0);
  for (int c = 0; c < 2; ++c) {
    std::vector<int> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if ((y[i] == 0 ? 0 : 1) == c) members.push_back(static_cast<int>(i));
    Rng rng(Rng::mix(seed, 0xF01DULL + static_cast<unsigned long long>(c)));
    shuffle_indices(members, rng);
    for (std::size_t i = 0; i < members.size(); ++i)
      assignment[static_cast<std::size_t>(members[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }
  return assignment;
}

LearnerFoldModels train_one_fold_set(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                     const std::vector<int>& fold_assignment,
                                     const LearnerSpec& spec, int folds,
                                     unsigned long long learner_seed, Eigen::MatrixXd& oof,
                                     std::vector<std::vector<int>>* fold_training_rows) {
  LearnerFoldModels result;
  result.spec = spec;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> fit_rows;
    std::vector<int> holdout_rows;
    for (std::size_t i = 0; i < fold_assignment.size(); ++i)
      (fold_assignment[i] == f ? holdout_rows : fit_rows).push_back(static_cast<int>(i));
    if (fold_training_rows != nullptr) fold_training_rows->push_back(fit_rows);

    const Eigen::MatrixXd fit_x = take_rows(x, fit_rows);
    const std::vector<int> fit_y = take_labels(y, fit_rows);
    const Eigen::MatrixXd holdout_x = take_rows(x, holdout_rows);
    const unsigned long long fold_seed = Rng::mix(learner_seed, static_cast<unsigned long long>(f));

    Eigen::MatrixXd holdout_pred;
    if (spec.kind == LearnerKind::Logistic) {
      result.logistic_folds.push_back(
          train_logistic(fit_x, fit_y, spec.l2_penalty, spec.epochs, spec.learning_rate));
      holdout_pred = predict_proba_logistic(result.logistic_folds.back(), holdout_x);
    } else {
      const ForestKind kind = spec.kind == LearnerKind::RandomForest ? ForestKind::RandomForest
                                                                     : ForestKind::ExtraTrees;
      result.forest_folds.push_back(
          train_forest(fit_x, fit_y, kind, spec.n_trees, fold_seed, spec.max_features));
      holdout_pred = predict_proba_forest(result.forest_folds.back(), holdout_x);
    }
    for (std::size_t i = 0; i < holdout_rows.size(); ++i)
      oof.row(holdout_rows[i]) = holdout_pred.row(static_cast<Eigen::Index>(i));
  }
  return result;
}

// Mean over the learner's fold models.
Eigen::MatrixXd predict_fold_average(const LearnerFoldModels& learner, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(x.rows(), 2);
  int count = 0;
  for (const ForestModel& m : learner.forest_folds) {
    sum += predict_proba_forest(m, x);
    ++count;
  }
  for (const LogisticModel& m : learner.logistic_folds) {
    sum += predict_proba_logistic(m, x);
    ++count;
  }
  return sum / static_cast<double>(count);
}

int label_of_row(double p0, double p1) { return p1 > p0 ? 1 : 0; }

double accuracy(const Eigen::MatrixXd& proba, const std::vector<int>& y) {
  int correct = 0;
  for (Eigen::Index i = 0; i < proba.rows(); ++i)
    if (label_of_row(proba(i, 0), proba(i, 1)) == y[static_cast<std::size_t>(i)]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(proba.rows());
}

}  // namespace

CascadeModel train_cascade(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const CascadeConfig& config, CascadeDiagnostics* diagnostics) {
  config.validate();
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw std::invalid_argument("row count does not match label count");
  if (x.rows() < config.folds)
    throw std::invalid_argument("need at least as many rows as folds");
  bool saw0 = false;
  bool saw1 = false;
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("labels must be 0 or 1");
    (label == 0 ? saw0 : saw1) = true;
  }
  if (!saw0 || !saw1) throw std::runtime_error("degenerate labels: both classes required");

  std::vector<int> train_rows;
  std::vector<int> validation_rows;
  stratified_validation_split(y, config.validation_fraction, config.seed, train_rows,
                              validation_rows);
  const Eigen::MatrixXd original_train = take_rows(x, train_rows);
  const Eigen::MatrixXd original_val = take_rows(x, validation_rows);
  const std::vector<int> y_train = take_labels(y, train_rows);
  const std::vector<int> y_val = take_labels(y, validation_rows);

  int class_counts[2] = {0, 0};
  for (int label : y_train) ++class_counts[label == 0 ? 0 : 1];
  if (class_counts[0] < config.folds || class_counts[1] < config.folds)
    throw std::invalid_argument("each class needs at least as many training rows as folds");

  if (diagnostics != nullptr) {
    diagnostics->train_rows = train_rows;
    diagnostics->validation_rows = validation_rows;
    diagnostics->levels.clear();
  }

  CascadeModel model;
  model.input_dim = static_cast<int>(x.cols());
  model.folds = config.folds;

  const int n_learners = static_cast<int>(config.learners.size());
  const Eigen::Index n_train = original_train.rows();
  const Eigen::Index n_val = original_val.rows();
  Eigen::MatrixXd level_train = original_train;
  Eigen::MatrixXd level_val = original_val;

  double best_accuracy = -std::numeric_limits<double>::infinity();
  int best_level = 0;

  for (int level = 1; level <= config.max_levels; ++level) {
    const unsigned long long level_seed =
        Rng::mix(config.seed, static_cast<unsigned long long>(level));
    const std::vector<int> fold_assignment = stratified_folds(y_train, config.folds, level_seed);

    CascadeLevel trained_level;
    CascadeLevelDiagnostics level_diag;
    Eigen::MatrixXd augmented_train(n_train, 2 * n_learners);
    Eigen::MatrixXd augmented_val(n_val, 2 * n_learners);
    Eigen::MatrixXd val_ensemble = Eigen::MatrixXd::Zero(n_val, 2);

    for (int j = 0; j < n_learners; ++j) {
      const unsigned long long learner_seed =
          Rng::mix(level_seed, static_cast<unsigned long long>(j));
      Eigen::MatrixXd oof = Eigen::MatrixXd::Zero(n_train, 2);
      std::vector<std::vector<int>> fold_training_rows;
      trained_level.learners.push_back(train_one_fold_set(
          level_train, y_train, fold_assignment, config.learners[static_cast<std::size_t>(j)],
          config.folds, learner_seed, oof,
          diagnostics != nullptr ? &fold_training_rows : nullptr));
      augmented_train.middleCols(2 * j, 2) = oof;
      const Eigen::MatrixXd val_pred = predict_fold_average(trained_level.learners.back(), level_val);
      augmented_val.middleCols(2 * j, 2) = val_pred;
      val_ensemble += val_pred;
      if (diagnostics != nullptr)
        level_diag.fold_training_rows.push_back(std::move(fold_training_rows));
    }
    val_ensemble /= static_cast<double>(n_learners);

    const double val_accuracy = accuracy(val_ensemble, y_val);
    model.levels.push_back(std::move(trained_level));
    model.validation_history.push_back(val_accuracy);
    if (diagnostics != nullptr) {
      level_diag.fold_assignment = fold_assignment;
      level_diag.level_input = level_train;
      level_diag.augmented = augmented_train;
      diagnostics->levels.push_back(std::move(level_diag));
    }

    if (val_accuracy > best_accuracy + config.improvement_tolerance) {
      best_accuracy = val_accuracy;
      best_level = level;
    } else {
      break;
    }

    level_train.resize(n_train, original_train.cols() + 2 * n_learners);
    level_train << original_train, augmented_train;
    level_val.resize(n_val, original_val.cols() + 2 * n_learners);
    level_val << original_val, augmented_val;
  }

  model.levels.resize(static_cast<std::size_t>(best_level));
  model.validation_history.resize(static_cast<std::size_t>(best_level));
  if (diagnostics != nullptr) diagnostics->levels.resize(static_cast<std::size_t>(best_level));
  return model;
}

std::pair<Eigen::MatrixXd, std::vector<int>> predict_cascade(const CascadeModel& model,
                                                             const Eigen::MatrixXd& x) {
  if (static_cast<int>(x.cols()) != model.input_dim)
    throw std::invalid_argument("feature count does not match training");
  if (model.levels.empty()) throw std::invalid_argument("cascade model has no levels");

  Eigen::MatrixXd level_input = x;
  Eigen::MatrixXd ensemble;
  for (std::size_t level = 0; level < model.levels.size(); ++level) {
    const CascadeLevel& lv = model.levels[level];
    const int n_learners = static_cast<int>(lv.learners.size());
    Eigen::MatrixXd augmented(x.rows(), 2 * n_learners);
    ensemble = Eigen::MatrixXd::Zero(x.rows(), 2);
    for (int j = 0; j < n_learners; ++j) {
      const Eigen::MatrixXd pred =
          predict_fold_average(lv.learners[static_cast<std::size_t>(j)], level_input);
      augmented.middleCols(2 * j, 2) = pred;
      ensemble += pred;
    }
    ensemble /= static_cast<double>(n_learners);
    if (level + 1 < model.levels.size()) {
      Eigen::MatrixXd next(x.rows(), x.cols() + 2 * n_learners);
      next << x, augmented;
      level_input = std::move(next);
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(x.rows()), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    labels[static_cast<std::size_t>(i)] = label_of_row(ensemble(i, 0), ensemble(i, 1));
  return {std::move(ensemble), std::move(labels)};
}

}  // namespace clonedet

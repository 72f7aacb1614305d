#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/base_learners.hpp"

namespace clonedet {

enum class LearnerKind { RandomForest, ExtraTrees, Logistic };

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& text);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::RandomForest;
  int n_trees = 50;       // forests
  int max_features = -1;  // forests; -1 = sqrt(d)
  double l2_penalty = 1e-3;  // logistic
  int epochs = 500;          // logistic
  double learning_rate = 0.1;
};

// The standard level: two differently seeded random forests, one
// extremely randomized trees, one logistic regression.
std::vector<LearnerSpec> default_learner_set();
// Four learners of one kind, for the single-family cascade variants.
std::vector<LearnerSpec> uniform_learner_set(LearnerKind kind);

struct CascadeConfig {
  std::vector<LearnerSpec> learners = default_learner_set();
  int folds = 5;
  int max_levels = 20;
  double improvement_tolerance = 1e-3;
  double validation_fraction = 0.2;
  unsigned long long seed = 0;

  void validate() const;
};

// One learner's cross-validation models for one level; exactly one of the
// two model vectors is populated, matching spec.kind.
struct LearnerFoldModels {
  LearnerSpec spec;
  std::vector<ForestModel> forest_folds;
  std::vector<LogisticModel> logistic_folds;
};

struct CascadeLevel {
  std::vector<LearnerFoldModels> learners;
};

struct CascadeModel {
  int input_dim = 0;
  int folds = 0;
  std::vector<CascadeLevel> levels;
  std::vector<double> validation_history;  // one entry per retained level

  int stop_level() const { return static_cast<int>(levels.size()); }
};

// Bookkeeping captured during training so tests can audit the
// cross-validation discipline; aligned with the retained levels.
struct CascadeLevelDiagnostics {
  std::vector<int> fold_assignment;  // per cascade-training row
  // [learner][fold] -> cascade-training rows that fold model was fit on
  std::vector<std::vector<std::vector<int>>> fold_training_rows;
  Eigen::MatrixXd level_input;  // inputs the level's learners consumed
  Eigen::MatrixXd augmented;    // out-of-fold class vectors, 2 per learner
};

struct CascadeDiagnostics {
  std::vector<int> train_rows;       // indices into the training matrix
  std::vector<int> validation_rows;
  std::vector<CascadeLevelDiagnostics> levels;
};

// Trains the cascade: a stratified validation split is held out, then levels
// are added while held-out accuracy keeps improving by more than
// improvement_tolerance (or until max_levels); the model keeps the levels up
// to the best one. Within a level each learner is trained k-fold; a training
// row's augmented class vector comes from the one fold model that did not
// see it, and all k fold models are retained and averaged for unseen rows.
// Each level's input is the original features plus the previous level's
// augmented block.
CascadeModel train_cascade(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const CascadeConfig& config,
                           CascadeDiagnostics* diagnostics = nullptr);

// Replays the levels and returns (probabilities, labels); the final
// probability is the mean of the last level's learner outputs, and the label
// is 1 only when class 1's probability strictly exceeds class 0's.
std::pair<Eigen::MatrixXd, std::vector<int>> predict_cascade(const CascadeModel& model,
                                                             const Eigen::MatrixXd& x);

}  // namespace clonedet

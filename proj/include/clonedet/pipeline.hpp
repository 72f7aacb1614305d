#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/account_views.hpp"
#include "clonedet/candidate_graph.hpp"
#include "clonedet/cascade_forest.hpp"
#include "clonedet/dataset.hpp"
#include "clonedet/text_similarity.hpp"
#include "clonedet/wgcca.hpp"

namespace clonedet {

// Which slice of the pair representation feeds the classifier.
enum class Ablation { GcOnly, AccountOnly, WgccaOnly, Full };
std::string to_string(Ablation ablation);
Ablation parse_ablation(const std::string& text);

// Learner family per cascade level: the mixed default or four of one kind.
enum class CascadePreset { Default, Rf, Ert, Lr };
std::string to_string(CascadePreset preset);
CascadePreset parse_cascade_preset(const std::string& text);
std::vector<LearnerSpec> cascade_preset_learners(CascadePreset preset);

struct PipelineConfig {
  GraphConfig graph;  // delta 0.8, standard Jaro-Winkler

  int post_embedding_dim = 256;
  unsigned long long post_embedding_seed = 0;
  std::string external_embeddings_path;  // per-account post vectors; "" = hashed embedder

  Node2VecConfig node2vec;  // applied to both interaction graphs

  std::vector<double> wgcca_weights = {0.25, 0.5, 0.5, 0.25};  // post, follower, friend, profile
  int latent_dim = 64;
  double wgcca_ridge = -1.0;  // < 0 selects the per-view automatic ridge

  Ablation ablation = Ablation::Full;
  CascadePreset cascade = CascadePreset::Default;
  int folds = 5;
  int max_levels = 20;
  double improvement_tolerance = 1e-3;
  double validation_fraction = 0.2;

  double train_fraction = 0.8;  // pair-level stratified split
  unsigned long long seed = 0;
};

// Min-max column scaling to [0,1], fit on training rows; transform clamps.
// Columns outside the mask pass through untouched (the bounded similarity
// features are already in [0,1]).
struct FeatureScaler {
  std::vector<bool> scaled;
  Eigen::VectorXd lo;
  Eigen::VectorXd range;  // 0 marks a constant column, which maps to 0

  static FeatureScaler fit(const Eigen::MatrixXd& x, std::vector<bool> scale_columns = {});
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

struct PairRecord {
  std::string a;  // canonical: a < b
  std::string b;
  int label = 0;
  bool held_out = false;
};

struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  GraphConfig graph;
  TfidfModel tfidf;

  int post_embedding_dim = 256;
  unsigned long long post_embedding_seed = 0;
  bool external_embeddings = false;

  Node2VecConfig follower_node2vec;
  Node2VecConfig friend_node2vec;

  FeatureScaler profile_scaler;  // the 12 profile attributes, dataset-wide

  WgccaModel wgcca;
  std::vector<std::string> account_order;  // ids aligned with wgcca rows

  Ablation ablation = Ablation::Full;
  FeatureScaler feature_scaler;
  CascadeModel cascade;

  std::vector<PairRecord> pairs;  // training-time candidate pairs and split
  unsigned long long seed = 0;

  // Row of a training-fit account in wgcca.shared_embedding, or -1.
  int trained_row(const std::string& account_id) const;
};

struct PairPrediction {
  std::string a;  // canonical: a < b
  std::string b;
  double clone_probability = 0.0;
  int label = 0;  // 1 when clone_probability > 0.5
};

struct EvaluationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;
};

// Everything train_pipeline fits before the classifier, plus the assembled
// scaled feature matrix, so classifier variants can be compared on
// identical inputs. bundle.cascade is left empty.
struct TrainingFeaturization {
  ModelBundle bundle;
  Eigen::MatrixXd features;       // rows follow bundle.pairs
  std::vector<int> labels;
  std::vector<int> train_rows;    // indices into bundle.pairs
  std::vector<int> test_rows;
};

// Graph construction, pair features, account views, wGCCA fusion, ablation
// assembly, scaling and the stratified pair split. Requires labels and at
// least one positive and one negative candidate pair.
TrainingFeaturization featurize_for_training(const Dataset& dataset, const PipelineConfig& config);

// featurize_for_training followed by cascade training on the train rows.
ModelBundle train_pipeline(const Dataset& dataset, const PipelineConfig& config);

// Rebuilds candidate pairs with the bundle's delta and featurizes them with
// the persisted models; accounts outside the training fit are embedded
// inductively (zero network views, since they are absent from the trained
// graphs). Returns one prediction per candidate pair in canonical order.
std::vector<PairPrediction> predict_pipeline(const ModelBundle& bundle, const Dataset& dataset,
                                             const std::string& external_embeddings_path = "");

// tp counts predicted positives that appear in truth; every truth pair not
// predicted positive counts as a miss, including pairs the candidate graph
// never produced.
EvaluationReport evaluate(const std::vector<PairPrediction>& predictions,
                          const std::set<std::pair<std::string, std::string>>& truth);

// Evaluation restricted to the bundle's recorded held-out pairs.
EvaluationReport evaluate_bundle_holdout(const ModelBundle& bundle, const Dataset& dataset,
                                         const std::string& external_embeddings_path = "");

}  // namespace clonedet

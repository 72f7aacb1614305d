#include "clonedet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "clonedet/pair_features.hpp"
#include "clonedet/rng.hpp"

namespace clonedet {

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(Ablation ablation) {
  switch (ablation) {
    case Ablation::GcOnly: return "gc";
    case Ablation::AccountOnly: return "account";
    case Ablation::WgccaOnly: return "wgcca";
    case Ablation::Full: return "full";
  }
  throw std::invalid_argument("unknown ablation");
}

Ablation parse_ablation(const std::string& text) {
  if (text == "gc") return Ablation::GcOnly;
  if (text == "account") return Ablation::AccountOnly;
  if (text == "wgcca") return Ablation::WgccaOnly;
  if (text == "full") return Ablation::Full;
  throw std::invalid_argument("unknown ablation: " + text);
}

std::string to_string(CascadePreset preset) {
  switch (preset) {
    case CascadePreset::Default: return "default";
    case CascadePreset::Rf: return "rf";
    case CascadePreset::Ert: return "ert";
    case CascadePreset::Lr: return "lr";
  }
  throw std::invalid_argument("unknown cascade preset");
}

CascadePreset parse_cascade_preset(const std::string& text) {
  if (text == "default") return CascadePreset::Default;
  if (text == "rf") return CascadePreset::Rf;
  if (text == "ert") return CascadePreset::Ert;
  if (text == "lr") return CascadePreset::Lr;
  throw std::invalid_argument("unknown cascade preset: " + text);
}

std::vector<LearnerSpec> cascade_preset_learners(CascadePreset preset) {
  switch (preset) {
    case CascadePreset::Default: return default_learner_set();
    case CascadePreset::Rf: return uniform_learner_set(LearnerKind::RandomForest);
    case CascadePreset::Ert: return uniform_learner_set(LearnerKind::ExtraTrees);
    case CascadePreset::Lr: return uniform_learner_set(LearnerKind::Logistic);
  }
  throw std::invalid_argument("unknown cascade preset");
}

// ---------------------------------------------------------------------------
// Feature scaler
// ---------------------------------------------------------------------------

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& x, std::vector<bool> scale_columns) {
  if (x.rows() < 1 || x.cols() < 1) throw std::invalid_argument("cannot fit a scaler without data");
  const auto cols = static_cast<std::size_t>(x.cols());
  if (scale_columns.empty()) scale_columns.assign(cols, true);
  if (scale_columns.size() != cols)
    throw std::invalid_argument("scale mask does not match the column count");

  FeatureScaler scaler;
  scaler.scaled = std::move(scale_columns);
  scaler.lo = Eigen::VectorXd::Zero(x.cols());
  scaler.range = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (!scaler.scaled[static_cast<std::size_t>(c)]) continue;
    const double lo = x.col(c).minCoeff();
    scaler.lo(c) = lo;
    scaler.range(c) = x.col(c).maxCoeff() - lo;
  }
  return scaler;
}

Eigen::MatrixXd FeatureScaler::transform(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != scaled.size())
    throw std::invalid_argument("column count does not match the fitted scaler");
  Eigen::MatrixXd out = x;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (!scaled[static_cast<std::size_t>(c)]) continue;
    if (range(c) <= 0.0) {
      out.col(c).setZero();
      continue;
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      out(r, c) = std::clamp((x(r, c) - lo(c)) / range(c), 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bundle lookups
// ---------------------------------------------------------------------------

int ModelBundle::trained_row(const std::string& account_id) const {
  // account_order is sorted, so the row index doubles as a search key.
  const auto it = std::lower_bound(account_order.begin(), account_order.end(), account_id);
  if (it == account_order.end() || *it != account_id) return -1;
  return static_cast<int>(it - account_order.begin());
}

// ---------------------------------------------------------------------------
// View assembly
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int ablation_width(Ablation ablation, int latent_dim) {
  switch (ablation) {
    case Ablation::GcOnly: return 2;
    case Ablation::AccountOnly: return PairFeatureVector::kCount;
    case Ablation::WgccaOnly: return 2 * latent_dim;
    case Ablation::Full: return PairFeatureVector::kCount + 2 * latent_dim;
  }
  throw std::invalid_argument("unknown ablation");
}

// Columns that need min-max scaling: the count differences among the pair
// features and the whole fused-embedding block. Similarity features are
// already bounded to [0, 1].
std::vector<bool> ablation_scale_mask(Ablation ablation, int width) {
  std::vector<bool> mask(static_cast<std::size_t>(width), false);
  switch (ablation) {
    case Ablation::GcOnly:
      break;
    case Ablation::AccountOnly:
    case Ablation::Full:
      for (int c = PairFeatureVector::kSimilarityCount; c < PairFeatureVector::kCount; ++c)
        mask[static_cast<std::size_t>(c)] = true;
      for (int c = PairFeatureVector::kCount; c < width; ++c)
        mask[static_cast<std::size_t>(c)] = true;
      break;
    case Ablation::WgccaOnly:
      mask.assign(mask.size(), true);
      break;
  }
  return mask;
}

// Post vectors for the given accounts, hashed locally or read from a file of
// precomputed per-account vectors, which must cover every account.
Eigen::MatrixXd post_matrix(const std::vector<const AccountProfile*>& accounts, int hashed_dim,
                            unsigned long long hashed_seed, const std::string& external_path,
                            int* dim_out) {
  const auto n = static_cast<Eigen::Index>(accounts.size());
  if (!external_path.empty()) {
    const PrecomputedAccountVectors pre = load_account_vectors(external_path);
    Eigen::MatrixXd x(n, pre.dimension);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto it = pre.vectors.find(accounts[static_cast<std::size_t>(i)]->id);
      if (it == pre.vectors.end())
        throw std::runtime_error("no external embedding for account " +
                                 accounts[static_cast<std::size_t>(i)]->id);
      x.row(i) = to_eigen(it->second).transpose();
    }
    *dim_out = pre.dimension;
    return x;
  }
  const HashedTextEmbedder embedder(hashed_dim, hashed_seed);
  Eigen::MatrixXd x(n, hashed_dim);
  for (Eigen::Index i = 0; i < n; ++i)
    x.row(i) = to_eigen(post_view(embedder, accounts[static_cast<std::size_t>(i)]->posts)).transpose();
  *dim_out = hashed_dim;
  return x;
}

// Node vectors for one interaction kind, rows reordered to the given
// (sorted) account id order.
Eigen::MatrixXd network_matrix(const std::vector<std::string>& ids,
                               const std::vector<InteractionEdge>& edges, EdgeKind kind,
                               const Node2VecConfig& config) {
  const InteractionGraph graph = build_interaction_graph(ids, edges, kind);
  const auto walks = node2vec_walks(graph, config);
  const Eigen::MatrixXd emb = skipgram_train(walks, graph.num_nodes(), config);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), config.dimension);
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = emb.row(graph.index_of(ids[i]));
  return out;
}

Eigen::MatrixXd profile_matrix(const std::vector<const AccountProfile*>& accounts,
                               const Date& reference_date) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(accounts.size()), ProfileAttributeVector::kCount);
  for (std::size_t i = 0; i < accounts.size(); ++i) {
    const auto row = profile_attribute_vector(*accounts[i], reference_date).as_array();
    for (int j = 0; j < ProfileAttributeVector::kCount; ++j)
      x(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
  }
  return x;
}

bool uses_fusion(Ablation ablation) {
  return ablation == Ablation::WgccaOnly || ablation == Ablation::Full;
}

bool uses_pair_features(Ablation ablation) {
  return ablation == Ablation::AccountOnly || ablation == Ablation::Full;
}

}  // namespace

// ---------------------------------------------------------------------------
// Training featurization
// ---------------------------------------------------------------------------

TrainingFeaturization featurize_for_training(const Dataset& dataset, const PipelineConfig& config) {
  dataset.validate();
  config.graph.validate();
  config.node2vec.validate();
  if (config.post_embedding_dim < 1)
    throw std::invalid_argument("post embedding dimension must be positive");
  if (config.latent_dim < 1) throw std::invalid_argument("latent dimension must be positive");
  if (config.wgcca_weights.size() != 4)
    throw std::invalid_argument("fusion weights must list 4 views: post, follower, friend, profile");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (dataset.labels.empty()) throw std::invalid_argument("dataset has no labels");

  TrainingFeaturization out;
  ModelBundle& bundle = out.bundle;
  bundle.graph = config.graph;
  bundle.seed = config.seed;
  bundle.ablation = config.ablation;
  bundle.post_embedding_dim = config.post_embedding_dim;
  bundle.post_embedding_seed = config.post_embedding_seed;
  bundle.external_embeddings = !config.external_embeddings_path.empty();
  bundle.follower_node2vec = config.node2vec;
  bundle.follower_node2vec.seed = Rng::mix(config.seed, 8);
  bundle.friend_node2vec = config.node2vec;
  bundle.friend_node2vec.seed = Rng::mix(config.seed, 9);

  // Description TF-IDF is fit on every account in the dataset.
  std::vector<std::string> corpus;
  corpus.reserve(dataset.accounts.size());
  for (const auto& account : dataset.accounts) corpus.push_back(normalize_text(account.description));
  bundle.tfidf = TfidfModel::fit(corpus);

  // Candidate pairs and their labels.
  const CandidateGraph graph = build_candidate_graph(dataset.accounts, config.graph);
  const auto pairs = candidate_pairs(graph);
  if (pairs.empty()) throw std::runtime_error("candidate graph has no edges; lower the threshold");
  const auto truth = dataset.label_pairs();

  bundle.pairs.reserve(pairs.size());
  out.labels.reserve(pairs.size());
  long long positives = 0;
  for (const auto& [a, b] : pairs) {
    PairRecord record;
    record.a = a;
    record.b = b;
    record.label = truth.count({a, b}) ? 1 : 0;
    positives += record.label;
    out.labels.push_back(record.label);
    bundle.pairs.push_back(std::move(record));
  }
  if (positives == 0)
    throw std::runtime_error("candidate graph recovered none of the labeled pairs; lower the threshold");
  if (positives == static_cast<long long>(bundle.pairs.size()))
    throw std::runtime_error("candidate graph produced no negative pairs; raise the threshold");

  // Stratified pair split: both classes keep train_fraction of their members
  // (at least one each side whenever a class has two or more).
  const std::uint64_t split_seed = Rng::mix(config.seed, 6);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<int> members;
    for (std::size_t i = 0; i < bundle.pairs.size(); ++i)
      if (bundle.pairs[i].label == cls) members.push_back(static_cast<int>(i));
    Rng rng(Rng::mix(split_seed, static_cast<std::uint64_t>(cls)));
    for (std::size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.next_index(i)]);
    std::size_t take =
        static_cast<std::size_t>(config.train_fraction * static_cast<double>(members.size()));
    take = members.size() < 2 ? members.size() : std::clamp<std::size_t>(take, 1, members.size() - 1);
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < take) {
        out.train_rows.push_back(members[i]);
      } else {
        bundle.pairs[static_cast<std::size_t>(members[i])].held_out = true;
        out.test_rows.push_back(members[i]);
      }
    }
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());

  std::map<std::string, const AccountProfile*> by_id;
  for (const auto& account : dataset.accounts) by_id.emplace(account.id, &account);

  // Account views and their fusion, skipped by the ablations that drop them.
  std::map<std::string, int> row_of;
  if (uses_fusion(config.ablation)) {
    std::vector<const AccountProfile*> accounts;
    accounts.reserve(by_id.size());
    bundle.account_order.reserve(by_id.size());
    for (const auto& [id, account] : by_id) {
      row_of.emplace(id, static_cast<int>(bundle.account_order.size()));
      bundle.account_order.push_back(id);
      accounts.push_back(account);
    }

    std::vector<Eigen::MatrixXd> views(4);
    views[0] = post_matrix(accounts, config.post_embedding_dim, config.post_embedding_seed,
                           config.external_embeddings_path, &bundle.post_embedding_dim);
    views[1] = network_matrix(bundle.account_order, dataset.edges, EdgeKind::Follower,
                              bundle.follower_node2vec);
    views[2] = network_matrix(bundle.account_order, dataset.edges, EdgeKind::Friend,
                              bundle.friend_node2vec);
    const Eigen::MatrixXd profile_raw = profile_matrix(accounts, dataset.reference_date);
    bundle.profile_scaler = FeatureScaler::fit(profile_raw);
    views[3] = bundle.profile_scaler.transform(profile_raw);

    bundle.wgcca = config.wgcca_ridge < 0.0
                       ? wgcca_fit_auto(views, config.wgcca_weights, config.latent_dim)
                       : wgcca_fit(views, config.wgcca_weights, config.latent_dim, config.wgcca_ridge);
  }

  // Per-pair rows: [pair features | embedding(a) | embedding(b)], trimmed to
  // the ablation.
  const int k = uses_fusion(config.ablation) ? bundle.wgcca.latent_dim : 0;
  const int width = ablation_width(config.ablation, k);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(bundle.pairs.size()), width);
  for (std::size_t i = 0; i < bundle.pairs.size(); ++i) {
    const PairRecord& record = bundle.pairs[i];
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index at = 0;
    if (config.ablation == Ablation::GcOnly) {
      const EdgeScores& scores = graph.edges.at({record.a, record.b});
      raw(r, at++) = scores.username_sim;
      raw(r, at++) = scores.screen_name_sim;
    }
    if (uses_pair_features(config.ablation)) {
      const auto features = extract_pair_features(*by_id.at(record.a), *by_id.at(record.b),
                                                  bundle.tfidf, config.graph.jw_params)
                                .as_array();
      for (const double value : features) raw(r, at++) = value;
    }
    if (uses_fusion(config.ablation)) {
      raw.row(r).segment(at, k) = bundle.wgcca.shared_embedding.row(row_of.at(record.a));
      at += k;
      raw.row(r).segment(at, k) = bundle.wgcca.shared_embedding.row(row_of.at(record.b));
      at += k;
    }
  }

  // The classifier scaler sees training rows only.
  Eigen::MatrixXd train_x(static_cast<Eigen::Index>(out.train_rows.size()), width);
  for (std::size_t i = 0; i < out.train_rows.size(); ++i)
    train_x.row(static_cast<Eigen::Index>(i)) = raw.row(out.train_rows[i]);
  bundle.feature_scaler = FeatureScaler::fit(train_x, ablation_scale_mask(config.ablation, width));
  out.features = bundle.feature_scaler.transform(raw);
  return out;
}

// ---------------------------------------------------------------------------
// Training and prediction
// ---------------------------------------------------------------------------

ModelBundle train_pipeline(const Dataset& dataset, const PipelineConfig& config) {
  TrainingFeaturization featurized = featurize_for_training(dataset, config);

  CascadeConfig cascade_config;
  cascade_config.learners = cascade_preset_learners(config.cascade);
  cascade_config.folds = config.folds;
  cascade_config.max_levels = config.max_levels;
  cascade_config.improvement_tolerance = config.improvement_tolerance;
  cascade_config.validation_fraction = config.validation_fraction;
  cascade_config.seed = Rng::mix(config.seed, 7);

  Eigen::MatrixXd x(static_cast<Eigen::Index>(featurized.train_rows.size()),
                    featurized.features.cols());
  std::vector<int> y;
  y.reserve(featurized.train_rows.size());
  for (std::size_t i = 0; i < featurized.train_rows.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = featurized.features.row(featurized.train_rows[i]);
    y.push_back(featurized.labels[static_cast<std::size_t>(featurized.train_rows[i])]);
  }
  featurized.bundle.cascade = train_cascade(x, y, cascade_config);
  return std::move(featurized.bundle);
}

std::vector<PairPrediction> predict_pipeline(const ModelBundle& bundle, const Dataset& dataset,
                                             const std::string& external_embeddings_path) {
  dataset.validate();
  if (bundle.cascade.levels.empty()) throw std::invalid_argument("bundle holds no trained cascade");

  const CandidateGraph graph = build_candidate_graph(dataset.accounts, bundle.graph);
  const auto pairs = candidate_pairs(graph);
  std::vector<PairPrediction> predictions;
  if (pairs.empty()) return predictions;

  std::map<std::string, const AccountProfile*> by_id;
  for (const auto& account : dataset.accounts) by_id.emplace(account.id, &account);

  std::optional<PrecomputedAccountVectors> external;
  std::optional<HashedTextEmbedder> embedder;
  if (uses_fusion(bundle.ablation)) {
    if (bundle.external_embeddings) {
      if (external_embeddings_path.empty())
        throw std::runtime_error(
            "model was trained with external post embeddings; an embeddings file is required");
      external = load_account_vectors(external_embeddings_path);
      if (external->dimension != bundle.post_embedding_dim)
        throw std::runtime_error("external embedding dimension " +
                                 std::to_string(external->dimension) +
                                 " does not match the trained dimension " +
                                 std::to_string(bundle.post_embedding_dim));
    } else {
      embedder.emplace(bundle.post_embedding_dim, bundle.post_embedding_seed);
    }
  }

  // Accounts seen at training time keep their fitted embedding rows; anyone
  // else is projected inductively with zero network views, since they are
  // absent from the trained interaction graphs.
  const int k = bundle.wgcca.latent_dim;
  std::map<std::string, Eigen::VectorXd> latent;
  const auto latent_of = [&](const std::string& id) -> const Eigen::VectorXd& {
    const auto cached = latent.find(id);
    if (cached != latent.end()) return cached->second;
    Eigen::VectorXd g;
    const int row = bundle.trained_row(id);
    if (row >= 0) {
      g = bundle.wgcca.shared_embedding.row(row).transpose();
    } else {
      const AccountProfile& account = *by_id.at(id);
      std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(bundle.wgcca.num_views()));
      if (external) {
        const auto it = external->vectors.find(id);
        if (it == external->vectors.end())
          throw std::runtime_error("no external embedding for account " + id);
        xs[0] = to_eigen(it->second);
      } else {
        xs[0] = to_eigen(post_view(*embedder, account.posts));
      }
      xs[1] = Eigen::VectorXd::Zero(bundle.wgcca.view_projections[1].rows());
      xs[2] = Eigen::VectorXd::Zero(bundle.wgcca.view_projections[2].rows());
      const auto attrs = profile_attribute_vector(account, dataset.reference_date).as_array();
      Eigen::MatrixXd profile_row(1, ProfileAttributeVector::kCount);
      for (int j = 0; j < ProfileAttributeVector::kCount; ++j)
        profile_row(0, j) = attrs[static_cast<std::size_t>(j)];
      xs[3] = bundle.profile_scaler.transform(profile_row).row(0).transpose();
      g = wgcca_project(bundle.wgcca, xs);
    }
    return latent.emplace(id, std::move(g)).first->second;
  };

  const int width = ablation_width(bundle.ablation, k);
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(pairs.size()), width);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index at = 0;
    if (bundle.ablation == Ablation::GcOnly) {
      const EdgeScores& scores = graph.edges.at({a, b});
      raw(r, at++) = scores.username_sim;
      raw(r, at++) = scores.screen_name_sim;
    }
    if (uses_pair_features(bundle.ablation)) {
      const auto features =
          extract_pair_features(*by_id.at(a), *by_id.at(b), bundle.tfidf, bundle.graph.jw_params)
              .as_array();
      for (const double value : features) raw(r, at++) = value;
    }
    if (uses_fusion(bundle.ablation)) {
      raw.row(r).segment(at, k) = latent_of(a).transpose();
      at += k;
      raw.row(r).segment(at, k) = latent_of(b).transpose();
      at += k;
    }
  }

  const Eigen::MatrixXd features = bundle.feature_scaler.transform(raw);
  const auto [probabilities, labels] = predict_cascade(bundle.cascade, features);
  (void)labels;

  predictions.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PairPrediction prediction;
    prediction.a = pairs[i].first;
    prediction.b = pairs[i].second;
    prediction.clone_probability = probabilities(static_cast<Eigen::Index>(i), 1);
    prediction.label = prediction.clone_probability > 0.5 ? 1 : 0;
    predictions.push_back(std::move(prediction));
  }
  return predictions;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvaluationReport evaluate(const std::vector<PairPrediction>& predictions,
                          const std::set<std::pair<std::string, std::string>>& truth) {
  EvaluationReport report;
  for (const auto& prediction : predictions) {
    const bool in_truth = truth.count({prediction.a, prediction.b}) > 0;
    if (prediction.label == 1) {
      if (in_truth) {
        ++report.tp;
      } else {
        ++report.fp;
      }
    } else if (!in_truth) {
      ++report.tn;
    }
  }
  // Truth pairs never predicted positive are misses, whether they were
  // predicted negative or never surfaced as candidates at all.
  report.fn = static_cast<long long>(truth.size()) - report.tp;

  const auto tp = static_cast<double>(report.tp);
  report.precision =
      report.tp + report.fp > 0 ? tp / static_cast<double>(report.tp + report.fp) : 0.0;
  report.recall = report.tp + report.fn > 0 ? tp / static_cast<double>(report.tp + report.fn) : 0.0;
  report.f1 = report.precision + report.recall > 0.0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  return report;
}

EvaluationReport evaluate_bundle_holdout(const ModelBundle& bundle, const Dataset& dataset,
                                         const std::string& external_embeddings_path) {
  std::set<std::pair<std::string, std::string>> held;
  std::set<std::pair<std::string, std::string>> truth;
  for (const auto& record : bundle.pairs) {
    if (!record.held_out) continue;
    held.emplace(record.a, record.b);
    if (record.label == 1) truth.emplace(record.a, record.b);
  }
  if (held.empty()) throw std::invalid_argument("bundle records no held-out pairs");

  const auto predictions = predict_pipeline(bundle, dataset, external_embeddings_path);
  std::vector<PairPrediction> filtered;
  filtered.reserve(held.size());
  for (const auto& prediction : predictions)
    if (held.count({prediction.a, prediction.b})) filtered.push_back(prediction);
  return evaluate(filtered, truth);
}

}  // namespace clonedet

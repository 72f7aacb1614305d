#include "clonedet/bundle_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace clonedet {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kFormatName = "clonedet-bundle";

// ---------------------------------------------------------------------------
// Small serializers
// ---------------------------------------------------------------------------

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index at = 0;
  for (const auto& entry : j) v(at++) = entry.get<double>();
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw std::runtime_error("matrix payload does not match its declared shape");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index at = 0;
  for (const auto& entry : data) {
    m(at / std::max<Eigen::Index>(cols, 1), at % std::max<Eigen::Index>(cols, 1)) =
        entry.get<double>();
    ++at;
  }
  return m;
}

Json scaler_to_json(const FeatureScaler& scaler) {
  return Json{{"scaled", scaler.scaled},
              {"lo", vector_to_json(scaler.lo)},
              {"range", vector_to_json(scaler.range)}};
}

FeatureScaler scaler_from_json(const Json& j) {
  FeatureScaler scaler;
  scaler.scaled = j.at("scaled").get<std::vector<bool>>();
  scaler.lo = vector_from_json(j.at("lo"));
  scaler.range = vector_from_json(j.at("range"));
  if (static_cast<std::size_t>(scaler.lo.size()) != scaler.scaled.size() ||
      static_cast<std::size_t>(scaler.range.size()) != scaler.scaled.size())
    throw std::runtime_error("scaler fields disagree on the column count");
  return scaler;
}

Json graph_config_to_json(const GraphConfig& config) {
  return Json{{"delta", config.delta},
              {"prefix_scale", config.jw_params.prefix_scale},
              {"max_prefix_len", config.jw_params.max_prefix_len},
              {"prefix_bucketing", config.prefix_bucketing}};
}

GraphConfig graph_config_from_json(const Json& j) {
  GraphConfig config;
  config.delta = j.at("delta").get<double>();
  config.jw_params.prefix_scale = j.at("prefix_scale").get<double>();
  config.jw_params.max_prefix_len = j.at("max_prefix_len").get<int>();
  config.prefix_bucketing = j.at("prefix_bucketing").get<bool>();
  return config;
}

Json node2vec_to_json(const Node2VecConfig& config) {
  return Json{{"return_p", config.return_p},
              {"in_out_q", config.in_out_q},
              {"walks_per_node", config.walks_per_node},
              {"walk_length", config.walk_length},
              {"dimension", config.dimension},
              {"window", config.window},
              {"negative_samples", config.negative_samples},
              {"epochs", config.epochs},
              {"learning_rate", config.learning_rate},
              {"seed", config.seed}};
}

Node2VecConfig node2vec_from_json(const Json& j) {
  Node2VecConfig config;
  config.return_p = j.at("return_p").get<double>();
  config.in_out_q = j.at("in_out_q").get<double>();
  config.walks_per_node = j.at("walks_per_node").get<int>();
  config.walk_length = j.at("walk_length").get<int>();
  config.dimension = j.at("dimension").get<int>();
  config.window = j.at("window").get<int>();
  config.negative_samples = j.at("negative_samples").get<int>();
  config.epochs = j.at("epochs").get<int>();
  config.learning_rate = j.at("learning_rate").get<double>();
  config.seed = j.at("seed").get<unsigned long long>();
  return config;
}

Json tfidf_to_json(const TfidfModel& model) {
  // The vocabulary maps terms bijectively onto 0..V-1, so an index-ordered
  // term list carries it fully.
  std::vector<std::string> terms(model.vocabulary().size());
  for (const auto& [term, index] : model.vocabulary()) terms[static_cast<std::size_t>(index)] = term;
  Json idf = Json::array();
  for (const double value : model.idf()) idf.push_back(value);
  return Json{{"terms", terms}, {"idf", std::move(idf)}, {"documents", model.document_count()}};
}

TfidfModel tfidf_from_json(const Json& j) {
  const auto terms = j.at("terms").get<std::vector<std::string>>();
  const auto idf = j.at("idf").get<std::vector<double>>();
  if (terms.size() != idf.size())
    throw std::runtime_error("vocabulary and idf tables disagree on size");
  std::map<std::string, int> vocabulary;
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!vocabulary.emplace(terms[i], static_cast<int>(i)).second)
      throw std::runtime_error("duplicate vocabulary term: " + terms[i]);
  return TfidfModel::from_parts(std::move(vocabulary), idf, j.at("documents").get<long long>());
}

Json wgcca_to_json(const WgccaModel& model) {
  Json means = Json::array();
  for (const auto& mean : model.view_means) means.push_back(vector_to_json(mean.transpose()));
  Json projections = Json::array();
  for (const auto& projection : model.view_projections) projections.push_back(matrix_to_json(projection));
  return Json{{"latent_dim", model.latent_dim},
              {"weights", model.weights},
              {"ridges", model.ridges},
              {"view_means", std::move(means)},
              {"view_projections", std::move(projections)},
              {"shared_embedding", matrix_to_json(model.shared_embedding)},
              {"eigenvalues", model.eigenvalues}};
}

WgccaModel wgcca_from_json(const Json& j) {
  WgccaModel model;
  model.latent_dim = j.at("latent_dim").get<int>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.ridges = j.at("ridges").get<std::vector<double>>();
  for (const auto& mean : j.at("view_means"))
    model.view_means.push_back(vector_from_json(mean).transpose());
  for (const auto& projection : j.at("view_projections"))
    model.view_projections.push_back(matrix_from_json(projection));
  model.shared_embedding = matrix_from_json(j.at("shared_embedding"));
  model.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  if (model.view_means.size() != model.view_projections.size() ||
      model.weights.size() != model.view_projections.size() ||
      model.ridges.size() != model.view_projections.size())
    throw std::runtime_error("fusion model views are inconsistent");
  return model;
}

// Trees travel as flat arrays: [feature, threshold, left, right, p0, p1]
// per node, root first.
Json tree_to_json(const DecisionTree& tree) {
  Json nodes = Json::array();
  for (const TreeNode& node : tree.nodes)
    nodes.push_back(Json::array({node.feature, node.threshold, node.left, node.right,
                                 node.class_distribution[0], node.class_distribution[1]}));
  return nodes;
}

DecisionTree tree_from_json(const Json& j) {
  DecisionTree tree;
  tree.nodes.reserve(j.size());
  const auto count = static_cast<int>(j.size());
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 6)
      throw std::runtime_error("malformed tree node record");
    TreeNode node;
    node.feature = entry[0].get<int>();
    node.threshold = entry[1].get<double>();
    node.left = entry[2].get<int>();
    node.right = entry[3].get<int>();
    node.class_distribution[0] = entry[4].get<double>();
    node.class_distribution[1] = entry[5].get<double>();
    if (!node.is_leaf() && (node.left < 0 || node.left >= count || node.right < 0 ||
                            node.right >= count))
      throw std::runtime_error("tree node child out of range");
    tree.nodes.push_back(node);
  }
  if (tree.nodes.empty()) throw std::runtime_error("empty tree");
  return tree;
}

Json forest_to_json(const ForestModel& model) {
  Json trees = Json::array();
  for (const DecisionTree& tree : model.trees) trees.push_back(tree_to_json(tree));
  return Json{{"kind", to_string(model.kind)},
              {"num_features", model.num_features},
              {"seed", model.seed},
              {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const Json& j) {
  ForestModel model;
  model.kind = parse_forest_kind(j.at("kind").get<std::string>());
  model.num_features = j.at("num_features").get<int>();
  model.seed = j.at("seed").get<unsigned long long>();
  for (const auto& tree : j.at("trees")) model.trees.push_back(tree_from_json(tree));
  return model;
}

Json logistic_to_json(const LogisticModel& model) {
  return Json{{"coefficients", vector_to_json(model.coefficients)},
              {"intercept", model.intercept},
              {"l2_penalty", model.l2_penalty}};
}

LogisticModel logistic_from_json(const Json& j) {
  LogisticModel model;
  model.coefficients = vector_from_json(j.at("coefficients"));
  model.intercept = j.at("intercept").get<double>();
  model.l2_penalty = j.at("l2_penalty").get<double>();
  return model;
}

Json spec_to_json(const LearnerSpec& spec) {
  return Json{{"kind", to_string(spec.kind)},
              {"n_trees", spec.n_trees},
              {"max_features", spec.max_features},
              {"l2_penalty", spec.l2_penalty},
              {"epochs", spec.epochs},
              {"learning_rate", spec.learning_rate}};
}

LearnerSpec spec_from_json(const Json& j) {
  LearnerSpec spec;
  spec.kind = parse_learner_kind(j.at("kind").get<std::string>());
  spec.n_trees = j.at("n_trees").get<int>();
  spec.max_features = j.at("max_features").get<int>();
  spec.l2_penalty = j.at("l2_penalty").get<double>();
  spec.epochs = j.at("epochs").get<int>();
  spec.learning_rate = j.at("learning_rate").get<double>();
  return spec;
}

Json cascade_to_json(const CascadeModel& model) {
  Json levels = Json::array();
  for (const CascadeLevel& level : model.levels) {
    Json learners = Json::array();
    for (const LearnerFoldModels& learner : level.learners) {
      Json forests = Json::array();
      for (const ForestModel& fold : learner.forest_folds) forests.push_back(forest_to_json(fold));
      Json logistics = Json::array();
      for (const LogisticModel& fold : learner.logistic_folds)
        logistics.push_back(logistic_to_json(fold));
      learners.push_back(Json{{"spec", spec_to_json(learner.spec)},
                              {"forest_folds", std::move(forests)},
                              {"logistic_folds", std::move(logistics)}});
    }
    levels.push_back(Json{{"learners", std::move(learners)}});
  }
  return Json{{"input_dim", model.input_dim},
              {"folds", model.folds},
              {"levels", std::move(levels)},
              {"validation_history", model.validation_history}};
}

CascadeModel cascade_from_json(const Json& j) {
  CascadeModel model;
  model.input_dim = j.at("input_dim").get<int>();
  model.folds = j.at("folds").get<int>();
  model.validation_history = j.at("validation_history").get<std::vector<double>>();
  for (const auto& level_json : j.at("levels")) {
    CascadeLevel level;
    for (const auto& learner_json : level_json.at("learners")) {
      LearnerFoldModels learner;
      learner.spec = spec_from_json(learner_json.at("spec"));
      for (const auto& fold : learner_json.at("forest_folds"))
        learner.forest_folds.push_back(forest_from_json(fold));
      for (const auto& fold : learner_json.at("logistic_folds"))
        learner.logistic_folds.push_back(logistic_from_json(fold));
      if (learner.forest_folds.empty() == learner.logistic_folds.empty())
        throw std::runtime_error("cascade learner must hold exactly one model family");
      level.learners.push_back(std::move(learner));
    }
    model.levels.push_back(std::move(level));
  }
  return model;
}

Json pairs_to_json(const std::vector<PairRecord>& pairs) {
  Json out = Json::array();
  for (const PairRecord& record : pairs)
    out.push_back(Json::array({record.a, record.b, record.label, record.held_out}));
  return out;
}

std::vector<PairRecord> pairs_from_json(const Json& j) {
  std::vector<PairRecord> pairs;
  pairs.reserve(j.size());
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 4)
      throw std::runtime_error("malformed pair record");
    PairRecord record;
    record.a = entry[0].get<std::string>();
    record.b = entry[1].get<std::string>();
    record.label = entry[2].get<int>();
    record.held_out = entry[3].get<bool>();
    pairs.push_back(std::move(record));
  }
  return pairs;
}

}  // namespace

// ---------------------------------------------------------------------------
// Bundle (de)serialization
// ---------------------------------------------------------------------------

std::string bundle_to_json(const ModelBundle& bundle) {
  Json j{{"format", kFormatName},
         {"version", ModelBundle::kFormatVersion},
         {"seed", bundle.seed},
         {"ablation", to_string(bundle.ablation)},
         {"graph", graph_config_to_json(bundle.graph)},
         {"tfidf", tfidf_to_json(bundle.tfidf)},
         {"post_embedding",
          Json{{"dimension", bundle.post_embedding_dim},
               {"seed", bundle.post_embedding_seed},
               {"external", bundle.external_embeddings}}},
         {"follower_node2vec", node2vec_to_json(bundle.follower_node2vec)},
         {"friend_node2vec", node2vec_to_json(bundle.friend_node2vec)},
         {"profile_scaler", scaler_to_json(bundle.profile_scaler)},
         {"wgcca", wgcca_to_json(bundle.wgcca)},
         {"account_order", bundle.account_order},
         {"feature_scaler", scaler_to_json(bundle.feature_scaler)},
         {"cascade", cascade_to_json(bundle.cascade)},
         {"pairs", pairs_to_json(bundle.pairs)}};
  return j.dump();
}

ModelBundle bundle_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed model bundle: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string()) != kFormatName)
      throw std::runtime_error("not a model bundle");
    const int version = j.at("version").get<int>();
    if (version != ModelBundle::kFormatVersion)
      throw std::runtime_error("unsupported model bundle version: " + std::to_string(version));

    ModelBundle bundle;
    bundle.seed = j.at("seed").get<unsigned long long>();
    bundle.ablation = parse_ablation(j.at("ablation").get<std::string>());
    bundle.graph = graph_config_from_json(j.at("graph"));
    bundle.tfidf = tfidf_from_json(j.at("tfidf"));
    const Json& post = j.at("post_embedding");
    bundle.post_embedding_dim = post.at("dimension").get<int>();
    bundle.post_embedding_seed = post.at("seed").get<unsigned long long>();
    bundle.external_embeddings = post.at("external").get<bool>();
    bundle.follower_node2vec = node2vec_from_json(j.at("follower_node2vec"));
    bundle.friend_node2vec = node2vec_from_json(j.at("friend_node2vec"));
    bundle.profile_scaler = scaler_from_json(j.at("profile_scaler"));
    bundle.wgcca = wgcca_from_json(j.at("wgcca"));
    bundle.account_order = j.at("account_order").get<std::vector<std::string>>();
    if (!std::is_sorted(bundle.account_order.begin(), bundle.account_order.end()))
      throw std::runtime_error("account order must be sorted");
    bundle.feature_scaler = scaler_from_json(j.at("feature_scaler"));
    bundle.cascade = cascade_from_json(j.at("cascade"));
    bundle.pairs = pairs_from_json(j.at("pairs"));
    if (static_cast<Eigen::Index>(bundle.account_order.size()) !=
        bundle.wgcca.shared_embedding.rows())
      throw std::runtime_error("account order does not match the embedding rows");
    return bundle;
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed model bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << bundle_to_json(bundle) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return bundle_from_json(buffer.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace clonedet

#include "clonedet/account_views.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "clonedet/rng.hpp"

namespace clonedet {

// ---------------------------------------------------------------------------
// Post view
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

std::vector<double> hashed_text_embed(const std::string& text, int dimension,
                                      unsigned long long seed) {
  if (dimension < 1) throw std::invalid_argument("embedding dimension must be positive");
  std::vector<double> vec(static_cast<std::size_t>(dimension), 0.0);
  const std::vector<std::string> tokens = tokenize_lower(text);
  const auto add_term = [&](const std::string& term) {
    const std::uint64_t slot_hash = fnv1a64(term, seed);
    const std::uint64_t sign_hash = fnv1a64(term, seed ^ 0x5851f42d4c957f2dULL);
    const std::size_t slot = static_cast<std::size_t>(slot_hash % static_cast<std::uint64_t>(dimension));
    vec[slot] += (sign_hash & 1ULL) ? 1.0 : -1.0;
  };
  for (const std::string& token : tokens) add_term(token);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) add_term(tokens[i] + '\x1f' + tokens[i + 1]);
  double norm_sq = 0.0;
  for (double v : vec) norm_sq += v * v;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : vec) v *= inv;
  }
  return vec;
}

HashedTextEmbedder::HashedTextEmbedder(int dimension, unsigned long long seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension < 1) throw std::invalid_argument("embedding dimension must be positive");
}

std::vector<double> HashedTextEmbedder::embed(const std::string& text) const {
  return hashed_text_embed(text, dimension_, seed_);
}

std::vector<double> post_view(const TextEmbedder& embedder, const std::vector<std::string>& posts) {
  std::vector<double> mean(static_cast<std::size_t>(embedder.dimension()), 0.0);
  if (posts.empty()) return mean;
  for (const std::string& post : posts) {
    const std::vector<double> e = embedder.embed(post);
    if (e.size() != mean.size()) throw std::logic_error("embedder returned wrong dimension");
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += e[i];
  }
  const double inv = 1.0 / static_cast<double>(posts.size());
  for (double& v : mean) v *= inv;
  return mean;
}

PrecomputedAccountVectors load_account_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open account vector file: " + path);
  PrecomputedAccountVectors result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string id;
    fields >> id;
    std::vector<double> vec;
    double value = 0.0;
    while (fields >> value) vec.push_back(value);
    if (!fields.eof()) {
      throw std::runtime_error("account vector file line " + std::to_string(line_no) +
                               ": non-numeric vector entry");
    }
    if (vec.empty()) {
      throw std::runtime_error("account vector file line " + std::to_string(line_no) +
                               ": no vector entries");
    }
    if (result.dimension == 0) {
      result.dimension = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != result.dimension) {
      throw std::runtime_error("account vector file line " + std::to_string(line_no) +
                               ": dimension " + std::to_string(vec.size()) +
                               " does not match " + std::to_string(result.dimension));
    }
    if (!result.vectors.emplace(id, std::move(vec)).second) {
      throw std::runtime_error("account vector file line " + std::to_string(line_no) +
                               ": duplicate account id " + id);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Network views
// ---------------------------------------------------------------------------

std::string to_string(EdgeKind kind) {
  return kind == EdgeKind::Follower ? "follower" : "friend";
}

EdgeKind parse_edge_kind(const std::string& text) {
  if (text == "follower") return EdgeKind::Follower;
  if (text == "friend") return EdgeKind::Friend;
  throw std::invalid_argument("unknown edge kind: " + text);
}

InteractionGraph::InteractionGraph(EdgeKind kind, std::vector<std::string> node_ids,
                                   std::vector<std::vector<int>> adjacency)
    : kind_(kind), node_ids_(std::move(node_ids)), adjacency_(std::move(adjacency)) {
  for (int i = 0; i < num_nodes(); ++i) index_.emplace(node_ids_[i], i);
}

std::size_t InteractionGraph::num_edges() const {
  std::size_t degree_sum = 0;
  for (const auto& adj : adjacency_) degree_sum += adj.size();
  return degree_sum / 2;
}

int InteractionGraph::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

bool InteractionGraph::has_edge(int a, int b) const {
  const std::vector<int>& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

InteractionGraph build_interaction_graph(const std::vector<std::string>& account_ids,
                                         const std::vector<InteractionEdge>& edges,
                                         EdgeKind kind) {
  std::vector<std::string> nodes = account_ids;
  std::sort(nodes.begin(), nodes.end());
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index.emplace(nodes[i], i);

  std::vector<std::vector<int>> adjacency(nodes.size());
  for (const InteractionEdge& edge : edges) {
    const auto ia = index.find(edge.a);
    if (ia == index.end()) throw std::runtime_error("unknown account id in edge: " + edge.a);
    const auto ib = index.find(edge.b);
    if (ib == index.end()) throw std::runtime_error("unknown account id in edge: " + edge.b);
    if (edge.kind != kind) continue;
    if (ia->second == ib->second) continue;
    adjacency[ia->second].push_back(ib->second);
    adjacency[ib->second].push_back(ia->second);
  }
  for (std::vector<int>& adj : adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return InteractionGraph(kind, std::move(nodes), std::move(adjacency));
}

void Node2VecConfig::validate() const {
  if (!(return_p > 0.0)) throw std::invalid_argument("return_p must be > 0");
  if (!(in_out_q > 0.0)) throw std::invalid_argument("in_out_q must be > 0");
  if (walks_per_node < 1) throw std::invalid_argument("walks_per_node must be positive");
  if (walk_length < 1) throw std::invalid_argument("walk_length must be positive");
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (window < 1) throw std::invalid_argument("window must be positive");
  if (negative_samples < 1) throw std::invalid_argument("negative_samples must be positive");
  if (epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
}

std::vector<std::pair<int, double>> transition_weights(const InteractionGraph& graph, int prev,
                                                       int cur, const Node2VecConfig& config) {
  std::vector<std::pair<int, double>> weights;
  const std::vector<int>& adj = graph.neighbors(cur);
  weights.reserve(adj.size());
  for (int next : adj) {
    double w = 1.0;
    if (prev >= 0) {
      if (next == prev) {
        w = 1.0 / config.return_p;
      } else if (graph.has_edge(prev, next)) {
        w = 1.0;
      } else {
        w = 1.0 / config.in_out_q;
      }
    }
    weights.emplace_back(next, w);
  }
  return weights;
}

namespace {

int sample_weighted(const std::vector<std::pair<int, double>>& weights, Rng& rng) {
  double total = 0.0;
  for (const auto& [node, w] : weights) total += w;
  const double r = rng.next_double() * total;
  double cumulative = 0.0;
  for (const auto& [node, w] : weights) {
    cumulative += w;
    if (r < cumulative) return node;
  }
  return weights.back().first;
}

}  // namespace

std::vector<std::vector<int>> node2vec_walks(const InteractionGraph& graph,
                                             const Node2VecConfig& config) {
  config.validate();
  if (graph.num_nodes() == 0) throw std::invalid_argument("graph has no nodes");
  std::vector<std::vector<int>> walks;
  walks.reserve(static_cast<std::size_t>(graph.num_nodes()) * config.walks_per_node);
  for (int start = 0; start < graph.num_nodes(); ++start) {
    Rng rng(Rng::mix(config.seed, fnv1a64(graph.node_id(start))));
    for (int w = 0; w < config.walks_per_node; ++w) {
      std::vector<int> walk;
      walk.reserve(config.walk_length);
      walk.push_back(start);
      int prev = -1;
      while (static_cast<int>(walk.size()) < config.walk_length) {
        const int cur = walk.back();
        if (graph.neighbors(cur).empty()) break;
        const auto weights = transition_weights(graph, prev, cur, config);
        const int next = sample_weighted(weights, rng);
        prev = cur;
        walk.push_back(next);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Eigen::MatrixXd skipgram_train(const std::vector<std::vector<int>>& walks, int num_nodes,
                               const Node2VecConfig& config,
                               std::vector<double>* epoch_mean_loss) {
  config.validate();
  if (walks.empty()) throw std::invalid_argument("walks must be nonempty");
  if (num_nodes < 1) throw std::invalid_argument("num_nodes must be positive");
  const int dim = config.dimension;

  // Negative-sampling table: cumulative frequency^(3/4) over walk occurrences.
  std::vector<double> freq(static_cast<std::size_t>(num_nodes), 0.0);
  for (const auto& walk : walks) {
    for (int node : walk) {
      if (node < 0 || node >= num_nodes) throw std::invalid_argument("walk node out of range");
      freq[static_cast<std::size_t>(node)] += 1.0;
    }
  }
  std::vector<double> cumulative(static_cast<std::size_t>(num_nodes), 0.0);
  double running = 0.0;
  for (int i = 0; i < num_nodes; ++i) {
    if (freq[static_cast<std::size_t>(i)] > 0.0)
      running += std::pow(freq[static_cast<std::size_t>(i)], 0.75);
    cumulative[static_cast<std::size_t>(i)] = running;
  }
  const double table_total = running;

  Rng init_rng(Rng::mix(config.seed, 0x496e6974ULL));
  Eigen::MatrixXd emb(num_nodes, dim);
  for (int i = 0; i < num_nodes; ++i)
    for (int d = 0; d < dim; ++d)
      emb(i, d) = (init_rng.next_double() - 0.5) / static_cast<double>(dim);
  Eigen::MatrixXd ctx = Eigen::MatrixXd::Zero(num_nodes, dim);

  std::size_t pairs_per_epoch = 0;
  for (const auto& walk : walks) {
    const int len = static_cast<int>(walk.size());
    for (int c = 0; c < len; ++c) {
      const int lo = std::max(0, c - config.window);
      const int hi = std::min(len - 1, c + config.window);
      pairs_per_epoch += static_cast<std::size_t>(hi - lo);
    }
  }
  const double total_pairs =
      static_cast<double>(pairs_per_epoch) * static_cast<double>(config.epochs);
  const double kMinLearningRate = 0.0001;

  Rng train_rng(Rng::mix(config.seed, 0x547261696eULL));
  std::vector<bool> center_trained(static_cast<std::size_t>(num_nodes), false);
  Eigen::VectorXd grad_center(dim);
  std::size_t processed = 0;

  const auto draw_negative = [&]() -> int {
    const double r = train_rng.next_double() * table_total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const int idx = static_cast<int>(it - cumulative.begin());
    return std::min(idx, num_nodes - 1);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (const auto& walk : walks) {
      const int len = static_cast<int>(walk.size());
      for (int c = 0; c < len; ++c) {
        const int center = walk[c];
        const int lo = std::max(0, c - config.window);
        const int hi = std::min(len - 1, c + config.window);
        for (int pos = lo; pos <= hi; ++pos) {
          if (pos == c) continue;
          const int context = walk[pos];
          const double alpha = std::max(
              kMinLearningRate,
              config.learning_rate * (1.0 - static_cast<double>(processed) / total_pairs));
          ++processed;

          grad_center.setZero();
          double pair_loss = 0.0;
          for (int s = 0; s <= config.negative_samples; ++s) {
            int target;
            double label;
            if (s == 0) {
              target = context;
              label = 1.0;
            } else {
              target = draw_negative();
              if (target == context) continue;
              label = 0.0;
            }
            const double score = emb.row(center).dot(ctx.row(target));
            const double pred = sigmoid(score);
            pair_loss += (label > 0.5) ? -std::log(std::max(pred, 1e-12))
                                       : -std::log(std::max(1.0 - pred, 1e-12));
            const double g = (label - pred) * alpha;
            grad_center += g * ctx.row(target).transpose();
            ctx.row(target) += g * emb.row(center);
          }
          emb.row(center) += grad_center.transpose();
          center_trained[static_cast<std::size_t>(center)] = true;
          loss_sum += pair_loss;
          ++loss_count;
        }
      }
    }
    if (epoch_mean_loss != nullptr)
      epoch_mean_loss->push_back(loss_count == 0 ? 0.0
                                                 : loss_sum / static_cast<double>(loss_count));
  }

  for (int i = 0; i < num_nodes; ++i)
    if (!center_trained[static_cast<std::size_t>(i)]) emb.row(i).setZero();
  return emb;
}

// ---------------------------------------------------------------------------
// Profile attribute view
// ---------------------------------------------------------------------------

const std::array<std::string, ProfileAttributeVector::kCount>& ProfileAttributeVector::names() {
  static const std::array<std::string, kCount> kNames = {
      "friend_count",       "follower_count",
      "favorite_count",     "tweet_count",
      "list_count",         "account_age_months",
      "has_profile_background", "uses_default_profile_image",
      "has_description",    "has_url",
      "screen_name_length", "description_length"};
  return kNames;
}

ProfileAttributeVector profile_attribute_vector(const AccountProfile& account,
                                                const Date& reference_date) {
  if (reference_date < account.registered_on) {
    throw std::invalid_argument("account " + account.id + " registered after reference date");
  }
  ProfileAttributeVector v;
  v.friend_count = static_cast<double>(account.friends_count);
  v.follower_count = static_cast<double>(account.followers_count);
  v.favorite_count = static_cast<double>(account.favorites_count);
  v.tweet_count = static_cast<double>(account.tweet_count);
  v.list_count = static_cast<double>(account.list_count);
  v.account_age_months = whole_months_between(account.registered_on, reference_date);
  v.has_profile_background = account.has_profile_background ? 1.0 : 0.0;
  v.uses_default_profile_image = account.uses_default_profile_image ? 1.0 : 0.0;
  v.has_description = account.description.empty() ? 0.0 : 1.0;
  v.has_url = account.has_url ? 1.0 : 0.0;
  v.screen_name_length = static_cast<double>(account.screen_name.size());
  v.description_length = static_cast<double>(account.description.size());
  return v;
}

}  // namespace clonedet

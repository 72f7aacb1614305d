#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/account.hpp"

namespace clonedet {

// ---------------------------------------------------------------------------
// Post view
// ---------------------------------------------------------------------------

class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual int dimension() const = 0;
  // Must return exactly dimension() entries and be deterministic.
  virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Deterministic feature-hashed unigram+bigram term-frequency embedding with
// signed hashing, L2-normalized. Stands in for a pre-trained sentence
// encoder; swap in external vectors via load_account_vectors for real ones.
class HashedTextEmbedder final : public TextEmbedder {
 public:
  explicit HashedTextEmbedder(int dimension = 256, unsigned long long seed = 0);
  int dimension() const override { return dimension_; }
  std::vector<double> embed(const std::string& text) const override;

 private:
  int dimension_;
  unsigned long long seed_;
};

std::vector<double> hashed_text_embed(const std::string& text, int dimension,
                                      unsigned long long seed);

// Mean of the per-post embeddings; an account with no posts gets the zero
// vector of the embedder's dimension.
std::vector<double> post_view(const TextEmbedder& embedder, const std::vector<std::string>& posts);

// Externally precomputed per-account vectors: one line per account, the
// account id followed by the vector entries, whitespace-delimited.
struct PrecomputedAccountVectors {
  int dimension = 0;
  std::map<std::string, std::vector<double>> vectors;
};
PrecomputedAccountVectors load_account_vectors(const std::string& path);

// ---------------------------------------------------------------------------
// Network views
// ---------------------------------------------------------------------------

enum class EdgeKind { Follower, Friend };

std::string to_string(EdgeKind kind);
EdgeKind parse_edge_kind(const std::string& text);

struct InteractionEdge {
  std::string a;
  std::string b;
  EdgeKind kind = EdgeKind::Follower;
};

// Undirected interaction graph over the full account set; the follower or
// friend relation is carried by the graph's kind, not by edge orientation.
class InteractionGraph {
 public:
  InteractionGraph() = default;
  InteractionGraph(EdgeKind kind, std::vector<std::string> node_ids,
                   std::vector<std::vector<int>> adjacency);

  EdgeKind kind() const { return kind_; }
  int num_nodes() const { return static_cast<int>(node_ids_.size()); }
  std::size_t num_edges() const;
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::string& node_id(int index) const { return node_ids_[index]; }
  // -1 when the id is unknown.
  int index_of(const std::string& id) const;
  const std::vector<int>& neighbors(int index) const { return adjacency_[index]; }
  bool has_edge(int a, int b) const;

 private:
  EdgeKind kind_ = EdgeKind::Follower;
  std::vector<std::string> node_ids_;           // sorted
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> adjacency_;     // sorted neighbor lists
};

// Keeps every account as a node, restricts edges to the requested kind,
// collapses duplicates and drops self-loops. Unknown endpoint ids are errors.
InteractionGraph build_interaction_graph(const std::vector<std::string>& account_ids,
                                         const std::vector<InteractionEdge>& edges,
                                         EdgeKind kind);

struct Node2VecConfig {
  double return_p = 0.5;
  double in_out_q = 2.0;
  int walks_per_node = 10;
  int walk_length = 15;
  int dimension = 128;
  int window = 5;
  int negative_samples = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  unsigned long long seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Unnormalized second-order transition weights out of walk state (prev, cur):
// 1/p back to prev, 1 to a common neighbor of prev and cur, 1/q outward.
// prev = -1 (walk start) weights every neighbor 1.
std::vector<std::pair<int, double>> transition_weights(const InteractionGraph& graph, int prev,
                                                       int cur, const Node2VecConfig& config);

// Biased random walks, walks_per_node per start node, each at most
// walk_length nodes, ending early at dead ends. Walks are grouped by start
// node in node-index order and each start node draws from its own generator
// seeded from (config.seed, node id), so output is schedule-independent.
std::vector<std::vector<int>> node2vec_walks(const InteractionGraph& graph,
                                             const Node2VecConfig& config);

// Skip-gram with negative sampling over walk windows. Rows of the result are
// node vectors; a node that never occurs as a walk center with a context
// (isolated nodes, nodes absent from all walks) keeps the zero vector.
// epoch_mean_loss, when given, receives the running mean of the per-pair
// negative-sampling objective for each epoch.
Eigen::MatrixXd skipgram_train(const std::vector<std::vector<int>>& walks, int num_nodes,
                               const Node2VecConfig& config,
                               std::vector<double>* epoch_mean_loss = nullptr);

// ---------------------------------------------------------------------------
// Profile attribute view
// ---------------------------------------------------------------------------

struct ProfileAttributeVector {
  double friend_count = 0.0;
  double follower_count = 0.0;
  double favorite_count = 0.0;
  double tweet_count = 0.0;
  double list_count = 0.0;
  double account_age_months = 0.0;
  double has_profile_background = 0.0;
  double uses_default_profile_image = 0.0;
  double has_description = 0.0;
  double has_url = 0.0;
  double screen_name_length = 0.0;
  double description_length = 0.0;

  static constexpr int kCount = 12;
  std::array<double, kCount> as_array() const {
    return {friend_count,       follower_count,
            favorite_count,     tweet_count,
            list_count,         account_age_months,
            has_profile_background, uses_default_profile_image,
            has_description,    has_url,
            screen_name_length, description_length};
  }
  static const std::array<std::string, kCount>& names();
};

// Age is counted in whole months up to reference_date; registration after
// reference_date is an error.
ProfileAttributeVector profile_attribute_vector(const AccountProfile& account,
                                                const Date& reference_date);

}  // namespace clonedet

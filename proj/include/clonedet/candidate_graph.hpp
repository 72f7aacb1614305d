#pragma once

#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/account.hpp"
#include "clonedet/text_similarity.hpp"

namespace clonedet {

struct GraphConfig {
  double delta = 0.8;  // edge threshold on the better of the two name similarities
  JaroWinklerParams jw_params;
  // Approximate accelerator: only compares accounts sharing a first character
  // on username or screen name. Not superset-safe; keep off for exact results.
  bool prefix_bucketing = false;

  void validate() const;
};

struct EdgeScores {
  double username_sim = 0.0;
  double screen_name_sim = 0.0;
};

// Undirected graph over account ids; an edge marks a suspected clone/victim
// pair. Edges are stored once under the canonical (min id, max id) key.
struct CandidateGraph {
  std::vector<std::string> nodes;  // sorted ids
  std::map<std::pair<std::string, std::string>, EdgeScores> edges;
  double delta = 0.0;

  bool has_edge(const std::string& a, const std::string& b) const;
};

// Connects every pair whose username OR screen-name Jaro-Winkler similarity
// reaches config.delta. Names are compared case-insensitively after trimming;
// an empty name contributes similarity 0. Throws on duplicate account ids.
CandidateGraph build_candidate_graph(const std::vector<AccountProfile>& accounts,
                                     const GraphConfig& config);

// Edges as ordered pairs, sorted lexicographically by (min id, max id).
std::vector<std::pair<std::string, std::string>> candidate_pairs(const CandidateGraph& graph);

// Edge-list export: "id_a<TAB>id_b<TAB>username_sim<TAB>screen_name_sim".
void write_edge_list(const CandidateGraph& graph, std::ostream& out);

// Trimmed, ASCII-lowercased copy used for all name comparisons.
std::string fold_name(std::string_view name);

}  // namespace clonedet

#include "clonedet/candidate_graph.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace clonedet {

void GraphConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("delta must be in (0, 1]");
  jw_params.validate();
}

std::string fold_name(std::string_view name) {
  std::size_t begin = 0;
  std::size_t end = name.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(name[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(name[end - 1]))) --end;
  std::string folded;
  folded.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i)
    folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(name[i]))));
  return folded;
}

bool CandidateGraph::has_edge(const std::string& a, const std::string& b) const {
  return edges.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
}

namespace {

double name_similarity(const std::string& a, const std::string& b,
                       const JaroWinklerParams& params) {
  if (a.empty() || b.empty()) return 0.0;  // absent attribute cannot match
  return jaro_winkler(a, b, params);
}

}  // namespace

CandidateGraph build_candidate_graph(const std::vector<AccountProfile>& accounts,
                                     const GraphConfig& config) {
  config.validate();

  std::set<std::string> seen;
  std::vector<std::string> duplicates;
  for (const auto& account : accounts)
    if (!seen.insert(account.id).second) duplicates.push_back(account.id);
  if (!duplicates.empty()) {
    std::ostringstream msg;
    msg << "duplicate account identifiers:";
    for (const auto& id : duplicates) msg << ' ' << id;
    throw std::invalid_argument(msg.str());
  }

  const std::size_t n = accounts.size();
  std::vector<std::string> usernames(n), screen_names(n);
  for (std::size_t i = 0; i < n; ++i) {
    usernames[i] = fold_name(accounts[i].username);
    screen_names[i] = fold_name(accounts[i].screen_name);
  }

  CandidateGraph graph;
  graph.delta = config.delta;
  graph.nodes.reserve(n);
  for (const auto& account : accounts) graph.nodes.push_back(account.id);
  std::sort(graph.nodes.begin(), graph.nodes.end());

  auto try_edge = [&](std::size_t i, std::size_t j) {
    const EdgeScores scores{
        name_similarity(usernames[i], usernames[j], config.jw_params),
        name_similarity(screen_names[i], screen_names[j], config.jw_params)};
    if (std::max(scores.username_sim, scores.screen_name_sim) < config.delta) return;
    auto key = accounts[i].id < accounts[j].id
                   ? std::make_pair(accounts[i].id, accounts[j].id)
                   : std::make_pair(accounts[j].id, accounts[i].id);
    graph.edges.emplace(std::move(key), scores);
  };

  if (!config.prefix_bucketing) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) try_edge(i, j);
    return graph;
  }

  // Bucketed approximation: pairs are considered when they share the first
  // character of the folded username or screen name.
  std::map<char, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < n; ++i) {
    if (!usernames[i].empty()) buckets[usernames[i][0]].push_back(i);
    if (!screen_names[i].empty() &&
        (usernames[i].empty() || screen_names[i][0] != usernames[i][0]))
      buckets[screen_names[i][0]].push_back(i);
  }
  std::set<std::pair<std::size_t, std::size_t>> considered;
  for (const auto& [ch, members] : buckets)
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const auto key = std::minmax(members[a], members[b]);
        if (considered.insert(key).second) try_edge(key.first, key.second);
      }
  return graph;
}

std::vector<std::pair<std::string, std::string>> candidate_pairs(const CandidateGraph& graph) {
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(graph.edges.size());
  for (const auto& [key, scores] : graph.edges) pairs.push_back(key);
  return pairs;  // map iteration is already the canonical order
}

void write_edge_list(const CandidateGraph& graph, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  for (const auto& [key, scores] : graph.edges)
    out << key.first << '\t' << key.second << '\t' << scores.username_sim << '\t'
        << scores.screen_name_sim << '\n';
}

}  // namespace clonedet

#include "clonedet/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include "clonedet/resources.hpp"
#include "clonedet/rng.hpp"

namespace clonedet {

namespace {

constexpr int kWordsPerTopic = 20;

const char* const kLocations[] = {
    "New York, NY",   "London",        "Berlin",        "Sydney",     "Toronto",
    "San Francisco",  "Austin, TX",    "Tokyo",         "Singapore",  "Amsterdam",
    "Chicago, IL",    "Dublin",        "Melbourne",     "Barcelona",  "Seattle, WA",
    "Portland, OR",   "Denver, CO",    "Lisbon",        "Stockholm",  "Cape Town"};

struct Corpus {
  std::vector<std::string> given_names;
  std::vector<std::string> family_names;
  std::vector<std::vector<std::string>> topics;
};

Corpus load_corpus() {
  Corpus c;
  c.given_names = resources::lines(resources::kGivenNames);
  c.family_names = resources::lines(resources::kFamilyNames);
  const std::vector<std::string> words = resources::lines(resources::kTopicWords);
  for (std::size_t start = 0; start + kWordsPerTopic <= words.size(); start += kWordsPerTopic) {
    c.topics.emplace_back(words.begin() + static_cast<long>(start),
                          words.begin() + static_cast<long>(start + kWordsPerTopic));
  }
  return c;
}

// Zipf-weighted draw from a topic's word list.
const std::string& topic_word(const std::vector<std::string>& topic, Rng& rng) {
  double total = 0.0;
  for (std::size_t r = 0; r < topic.size(); ++r) total += 1.0 / static_cast<double>(r + 1);
  double pick = rng.next_double() * total;
  for (std::size_t r = 0; r < topic.size(); ++r) {
    pick -= 1.0 / static_cast<double>(r + 1);
    if (pick < 0.0) return topic[r];
  }
  return topic.back();
}

std::string topic_text(const std::vector<std::string>& topic, int min_words, int max_words,
                       Rng& rng) {
  const int count = min_words + static_cast<int>(rng.next_below(
                                    static_cast<std::uint64_t>(max_words - min_words + 1)));
  std::string text;
  for (int i = 0; i < count; ++i) {
    if (!text.empty()) text.push_back(' ');
    text += topic_word(topic, rng);
  }
  return text;
}

long long lognormal_count(Rng& rng, double mu, double sigma, long long cap) {
  const double value = std::exp(mu + sigma * rng.next_gaussian());
  if (!(value > 0.0)) return 0;
  if (value >= static_cast<double>(cap)) return cap;
  return static_cast<long long>(value);
}

Date random_date(Rng& rng, int year_lo, int year_hi) {
  Date d;
  d.year = year_lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(year_hi - year_lo + 1)));
  d.month = 1 + static_cast<int>(rng.next_below(12));
  d.day = 1 + static_cast<int>(rng.next_below(28));
  return d;
}

std::string padded_id(char prefix, int index, int width) {
  std::string digits = std::to_string(index + 1);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

std::string title_case(std::string word) {
  if (!word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  return word;
}

// One of: insert a digit, swap adjacent characters, delete a character.
std::string apply_name_edit(std::string name, Rng& rng) {
  if (name.size() < 2) return name + static_cast<char>('0' + rng.next_below(10));
  switch (rng.next_below(3)) {
    case 0: {
      const std::size_t pos = rng.next_index(name.size() + 1);
      name.insert(name.begin() + static_cast<long>(pos),
                  static_cast<char>('0' + rng.next_below(10)));
      return name;
    }
    case 1: {
      const std::size_t pos = rng.next_index(name.size() - 1);
      std::swap(name[pos], name[pos + 1]);
      return name;
    }
    default: {
      const std::size_t pos = rng.next_index(name.size());
      name.erase(name.begin() + static_cast<long>(pos));
      return name;
    }
  }
}

// Short names take one edit, longer ones one or two, which keeps the
// Jaro-Winkler similarity of clone names comfortably above 0.8.
std::string clone_name(const std::string& name, Rng& rng) {
  const int edits = name.size() < 8 ? 1 : 1 + static_cast<int>(rng.next_below(2));
  std::string out = name;
  for (int i = 0; i < edits; ++i) out = apply_name_edit(std::move(out), rng);
  return out;
}

std::string dropout_words(const std::string& text, double drop_probability, Rng& rng) {
  std::istringstream in(text);
  std::string word;
  std::vector<std::string> kept;
  std::string first;
  while (in >> word) {
    if (first.empty()) first = word;
    if (!rng.next_bool(drop_probability)) kept.push_back(word);
  }
  if (kept.empty() && !first.empty()) kept.push_back(first);
  std::string out;
  for (const std::string& w : kept) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

// Grow an undirected graph where newcomers attach to m earlier nodes drawn
// mostly degree-proportionally (every node enters the pool once on arrival).
std::vector<InteractionEdge> preferential_attachment(const std::vector<std::string>& ids, int m,
                                                     EdgeKind kind, Rng& rng) {
  std::vector<InteractionEdge> edges;
  std::vector<int> pool;
  pool.reserve(ids.size() * static_cast<std::size_t>(2 * m + 1));
  const int n = static_cast<int>(ids.size());
  for (int i = 0; i < n; ++i) {
    pool.push_back(i);
    const int want = std::min(m, i);
    std::set<int> targets;
    int attempts = 0;
    while (static_cast<int>(targets.size()) < want && attempts < 20 * want) {
      ++attempts;
      const int t = rng.next_bool(0.25)
                        ? static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)))
                        : pool[rng.next_index(pool.size())];
      if (t != i) targets.insert(t);
    }
    for (int t : targets) {
      edges.push_back({ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(t)], kind});
      pool.push_back(i);
      pool.push_back(t);
    }
  }
  return edges;
}

}  // namespace

Dataset generate_synthetic(int n_legit, int n_clone_pairs, int n_noise,
                           unsigned long long seed) {
  if (n_legit < 0 || n_clone_pairs < 0 || n_noise < 0)
    throw std::invalid_argument("invalid sizes: counts must be non-negative");
  if (n_clone_pairs > n_legit)
    throw std::invalid_argument("invalid sizes: n_clone_pairs exceeds n_legit");
  if (n_legit + n_noise < 1)
    throw std::invalid_argument("invalid sizes: need at least one account");

  const Corpus corpus = load_corpus();
  const int n_organic = n_legit + n_noise;
  const int id_width = std::max(4, static_cast<int>(std::to_string(n_organic).size()));

  Dataset dataset;
  dataset.reference_date = {2021, 6, 1};
  dataset.manifest.source = "synthetic";
  dataset.manifest.seed = seed;
  dataset.manifest.reference_date = dataset.reference_date;
  dataset.manifest.reference_date_set = true;

  // Organic accounts: legitimate first, noise after; both share one
  // generative process.
  Rng profile_rng(Rng::mix(seed, 1));
  std::vector<AccountProfile> organic;
  std::vector<int> organic_topic;
  organic.reserve(static_cast<std::size_t>(n_organic));
  for (int i = 0; i < n_organic; ++i) {
    AccountProfile a;
    const bool is_noise = i >= n_legit;
    a.id = is_noise ? padded_id('N', i - n_legit, id_width) : padded_id('L', i, id_width);
    const std::string& given = corpus.given_names[profile_rng.next_index(corpus.given_names.size())];
    const std::string& family =
        corpus.family_names[profile_rng.next_index(corpus.family_names.size())];
    a.username = title_case(given) + " " + title_case(family);
    a.screen_name = given + (profile_rng.next_bool(0.2) ? "_" : "") + family;
    if (profile_rng.next_bool(0.3)) {
      const int digits = 1 + static_cast<int>(profile_rng.next_below(3));
      for (int k = 0; k < digits; ++k)
        a.screen_name.push_back(static_cast<char>('0' + profile_rng.next_below(10)));
    }
    const int topic = static_cast<int>(profile_rng.next_index(corpus.topics.size()));
    organic_topic.push_back(topic);
    if (!profile_rng.next_bool(0.07))
      a.description = topic_text(corpus.topics[static_cast<std::size_t>(topic)], 8, 18, profile_rng);
    if (profile_rng.next_bool(0.6))
      a.location = kLocations[profile_rng.next_index(std::size(kLocations))];
    a.followers_count = lognormal_count(profile_rng, 5.0, 1.8, 3000000);
    a.friends_count = lognormal_count(profile_rng, 4.5, 1.2, 200000);
    a.tweet_count = lognormal_count(profile_rng, 5.5, 1.6, 500000);
    a.favorites_count = lognormal_count(profile_rng, 4.0, 2.0, 400000);
    a.list_count = lognormal_count(profile_rng, 1.0, 1.2, 5000) - 1;
    if (a.list_count < 0) a.list_count = 0;
    a.registered_on = random_date(profile_rng, 2009, 2020);
    a.has_profile_background = profile_rng.next_bool(0.7);
    a.uses_default_profile_image = profile_rng.next_bool(0.08);
    a.has_url = profile_rng.next_bool(0.45);
    const int post_count = 3 + static_cast<int>(profile_rng.next_below(6));
    for (int p = 0; p < post_count; ++p)
      a.posts.push_back(topic_text(corpus.topics[static_cast<std::size_t>(topic)], 6, 14, profile_rng));
    organic.push_back(std::move(a));
  }

  // Interaction graphs over the organic accounts.
  std::vector<std::string> organic_ids;
  organic_ids.reserve(organic.size());
  for (const AccountProfile& a : organic) organic_ids.push_back(a.id);
  Rng follower_rng(Rng::mix(seed, 2));
  Rng friend_rng(Rng::mix(seed, 3));
  std::vector<InteractionEdge> edges =
      preferential_attachment(organic_ids, 3, EdgeKind::Follower, follower_rng);
  {
    std::vector<InteractionEdge> friend_edges =
        preferential_attachment(organic_ids, 2, EdgeKind::Friend, friend_rng);
    edges.insert(edges.end(), friend_edges.begin(), friend_edges.end());
  }

  // Per-kind neighbor lists, used to cap how much network a clone shares.
  std::map<std::string, std::vector<std::string>> follower_neighbors;
  std::map<std::string, std::vector<std::string>> friend_neighbors;
  for (const InteractionEdge& e : edges) {
    auto& nbrs = e.kind == EdgeKind::Follower ? follower_neighbors : friend_neighbors;
    nbrs[e.a].push_back(e.b);
    nbrs[e.b].push_back(e.a);
  }

  // Victims are a random sample of the legitimate accounts.
  Rng victim_rng(Rng::mix(seed, 4));
  std::vector<int> legit_indices(static_cast<std::size_t>(n_legit));
  for (int i = 0; i < n_legit; ++i) legit_indices[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = legit_indices.size(); i > 1; --i)
    std::swap(legit_indices[i - 1], legit_indices[victim_rng.next_index(i)]);
  legit_indices.resize(static_cast<std::size_t>(n_clone_pairs));

  Rng clone_rng(Rng::mix(seed, 5));
  std::vector<AccountProfile> clones;
  clones.reserve(static_cast<std::size_t>(n_clone_pairs));
  for (int c = 0; c < n_clone_pairs; ++c) {
    const AccountProfile& victim = organic[static_cast<std::size_t>(legit_indices[static_cast<std::size_t>(c)])];
    const int topic = organic_topic[static_cast<std::size_t>(legit_indices[static_cast<std::size_t>(c)])];
    AccountProfile a;
    a.id = padded_id('C', c, id_width);
    a.username = clone_name(victim.username, clone_rng);
    a.screen_name = clone_name(victim.screen_name, clone_rng);
    a.description = dropout_words(victim.description, 0.2, clone_rng);
    a.location = clone_rng.next_bool(0.5) ? victim.location : std::string();
    a.followers_count = static_cast<long long>(clone_rng.next_below(13));
    a.friends_count = static_cast<long long>(clone_rng.next_below(31));
    a.tweet_count = static_cast<long long>(clone_rng.next_below(9));
    a.favorites_count = static_cast<long long>(clone_rng.next_below(6));
    a.list_count = 0;
    a.registered_on = random_date(clone_rng, 2020, 2021);
    if (a.registered_on.year == 2021 && a.registered_on.month > 5) a.registered_on.month = 5;
    a.has_profile_background = clone_rng.next_bool(0.3);
    a.uses_default_profile_image = clone_rng.next_bool(0.55);
    a.has_url = clone_rng.next_bool(0.05);
    const int post_count = static_cast<int>(clone_rng.next_below(3));
    for (int p = 0; p < post_count; ++p)
      a.posts.push_back(topic_text(corpus.topics[static_cast<std::size_t>(topic)], 6, 14, clone_rng));

    // A few edges to random organic accounts; at most one victim neighbor,
    // and only when the victim's neighborhood is large enough to keep the
    // shared share under 10%.
    for (const auto& [kind, neighbors] :
         {std::pair{EdgeKind::Follower, &follower_neighbors},
          std::pair{EdgeKind::Friend, &friend_neighbors}}) {
      const std::vector<std::string>* victim_nbrs = nullptr;
      if (const auto it = neighbors->find(victim.id); it != neighbors->end())
        victim_nbrs = &it->second;
      std::set<std::string> targets;
      if (victim_nbrs != nullptr && victim_nbrs->size() > 10 && clone_rng.next_bool(0.5))
        targets.insert((*victim_nbrs)[clone_rng.next_index(victim_nbrs->size())]);
      const int extra = 1 + static_cast<int>(clone_rng.next_below(kind == EdgeKind::Follower ? 3 : 2));
      for (int k = 0; k < extra; ++k)
        targets.insert(organic_ids[clone_rng.next_index(organic_ids.size())]);
      for (const std::string& t : targets)
        if (t != a.id) edges.push_back({a.id, t, kind});
    }

    dataset.labels.emplace_back(victim.id, a.id);
    clones.push_back(std::move(a));
  }

  dataset.accounts.reserve(organic.size() + clones.size());
  for (int i = 0; i < n_legit; ++i) dataset.accounts.push_back(std::move(organic[static_cast<std::size_t>(i)]));
  for (AccountProfile& a : clones) dataset.accounts.push_back(std::move(a));
  for (int i = n_legit; i < n_organic; ++i) dataset.accounts.push_back(std::move(organic[static_cast<std::size_t>(i)]));
  dataset.edges = std::move(edges);
  dataset.validate();
  return dataset;
}

}  // namespace clonedet

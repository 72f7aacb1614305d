#include "clonedet/text_similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "clonedet/resources.hpp"

namespace clonedet {

void JaroWinklerParams::validate() const {
  if (prefix_scale < 0.0 || prefix_scale > 0.25)
    throw std::invalid_argument("prefix_scale must be in [0, 0.25]");
  if (max_prefix_len < 1)
    throw std::invalid_argument("max_prefix_len must be positive");
  if (prefix_scale * max_prefix_len > 1.0)
    throw std::invalid_argument("prefix_scale * max_prefix_len must not exceed 1");
}

const std::vector<std::string>& english_stopwords() {
  static const std::vector<std::string> words = [] {
    auto w = resources::lines(resources::kStopwordsEn);
    std::sort(w.begin(), w.end());
    return w;
  }();
  return words;
}

bool is_stopword(std::string_view word) {
  const auto& words = english_stopwords();
  return std::binary_search(words.begin(), words.end(), word);
}

std::string normalize_text(std::string_view text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (const char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::ispunct(uc)) continue;
    cleaned.push_back(static_cast<char>(std::tolower(uc)));
  }

  std::string out;
  std::istringstream in(cleaned);
  std::string token;
  while (in >> token) {
    if (is_stopword(token)) continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

double jaro(std::string_view s1, std::string_view s2) {
  const std::size_t len1 = s1.size();
  const std::size_t len2 = s2.size();
  if (len1 == 0 && len2 == 0) return 1.0;
  if (len1 == 0 || len2 == 0) return 0.0;
  if (s1 == s2) return 1.0;

  const std::size_t max_len = std::max(len1, len2);
  const std::size_t window = max_len / 2 > 0 ? max_len / 2 - 1 : 0;

  std::vector<bool> matched1(len1, false);
  std::vector<bool> matched2(len2, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < len1; ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(len2, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (matched2[j] || s1[i] != s2[j]) continue;
      matched1[i] = true;
      matched2[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  // Transpositions: matched characters taken in order from each string.
  std::size_t transposed = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < len1; ++i) {
    if (!matched1[i]) continue;
    while (!matched2[j]) ++j;
    if (s1[i] != s2[j]) ++transposed;
    ++j;
  }

  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(transposed) / 2.0;
  return (m / static_cast<double>(len1) + m / static_cast<double>(len2) + (m - t) / m) / 3.0;
}

double jaro_winkler(std::string_view s1, std::string_view s2,
                    const JaroWinklerParams& params) {
  params.validate();
  const double js = jaro(s1, s2);
  std::size_t prefix = 0;
  const std::size_t cap =
      std::min({s1.size(), s2.size(), static_cast<std::size_t>(params.max_prefix_len)});
  while (prefix < cap && s1[prefix] == s2[prefix]) ++prefix;
  return js + static_cast<double>(prefix) * params.prefix_scale * (1.0 - js);
}

namespace {

std::vector<std::string> split_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::istringstream in{std::string(text)};
  std::string term;
  while (in >> term) terms.push_back(term);
  return terms;
}

}  // namespace

TfidfModel TfidfModel::fit(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");

  std::map<std::string, long long> doc_freq;
  for (const auto& doc : corpus) {
    std::set<std::string> seen;
    for (auto& term : split_terms(doc)) seen.insert(std::move(term));
    for (const auto& term : seen) ++doc_freq[term];
  }

  TfidfModel model;
  model.document_count_ = static_cast<long long>(corpus.size());
  model.idf_.reserve(doc_freq.size());
  int index = 0;
  const double n = static_cast<double>(model.document_count_);
  for (const auto& [term, df] : doc_freq) {
    model.vocabulary_.emplace(term, index++);
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  return model;
}

TfidfModel TfidfModel::from_parts(std::map<std::string, int> vocabulary,
                                  std::vector<double> idf, long long document_count) {
  if (vocabulary.size() != idf.size())
    throw std::invalid_argument("tfidf vocabulary/idf size mismatch");
  TfidfModel model;
  model.vocabulary_ = std::move(vocabulary);
  model.idf_ = std::move(idf);
  model.document_count_ = document_count;
  return model;
}

SparseVector TfidfModel::vector(std::string_view normalized_text) const {
  std::map<int, double> tf;
  for (const auto& term : split_terms(normalized_text)) {
    const auto it = vocabulary_.find(term);
    if (it != vocabulary_.end()) tf[it->second] += 1.0;
  }
  SparseVector v;
  v.dimension = static_cast<int>(vocabulary_.size());
  v.entries.reserve(tf.size());
  for (const auto& [index, count] : tf)
    v.entries.emplace_back(index, count * idf_[static_cast<std::size_t>(index)]);
  return v;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  if (a.dimension != b.dimension) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [i, v] : a.entries) na += v * v;
  for (const auto& [i, v] : b.entries) nb += v * v;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first == ib->first) {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    } else if (ia->first < ib->first) {
      ++ia;
    } else {
      ++ib;
    }
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

}  // namespace clonedet

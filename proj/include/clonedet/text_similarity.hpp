#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace clonedet {

// Winkler prefix bonus parameters (scale p, prefix cap l).
struct JaroWinklerParams {
  double prefix_scale = 0.1;
  int max_prefix_len = 4;

  // prefix_scale in [0, 0.25], max_prefix_len >= 1, and their product <= 1
  // so the boosted score stays in [0, 1].
  void validate() const;
};

// Lowercases, strips punctuation and drops bundled English stop words.
// Idempotent; empty input allowed.
std::string normalize_text(std::string_view text);

// Jaro similarity in [0, 1]. Matching window is
// max(floor(max(|s1|,|s2|)/2) - 1, 0); both strings empty scores 1,
// exactly one empty scores 0.
double jaro(std::string_view s1, std::string_view s2);

// jaro + l*p*(1 - jaro), l = common prefix length capped at max_prefix_len.
double jaro_winkler(std::string_view s1, std::string_view s2,
                    const JaroWinklerParams& params = {});

// Sparse vector over a fixed dimension; entries sorted by index.
struct SparseVector {
  int dimension = 0;
  std::vector<std::pair<int, double>> entries;
};

// TF-IDF weighting fitted over a corpus of normalized strings.
// idf(term) = ln((1 + N) / (1 + df(term))) + 1.
class TfidfModel {
 public:
  TfidfModel() = default;

  // Throws std::invalid_argument("empty corpus") when corpus is empty.
  static TfidfModel fit(const std::vector<std::string>& corpus);

  // tf * idf entries for in-vocabulary terms of a normalized text;
  // all-zero vectors are allowed.
  SparseVector vector(std::string_view normalized_text) const;

  const std::map<std::string, int>& vocabulary() const { return vocabulary_; }
  const std::vector<double>& idf() const { return idf_; }
  long long document_count() const { return document_count_; }

  static TfidfModel from_parts(std::map<std::string, int> vocabulary,
                               std::vector<double> idf, long long document_count);

 private:
  std::map<std::string, int> vocabulary_;  // term -> index, bijective onto 0..V-1
  std::vector<double> idf_;
  long long document_count_ = 0;
};

// Cosine similarity clamped to [0, 1]; zero-norm inputs score 0.
// Throws on dimension mismatch.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(const SparseVector& a, const SparseVector& b);

// The bundled stop-word list (lowercase, sorted).
const std::vector<std::string>& english_stopwords();
bool is_stopword(std::string_view word);

}  // namespace clonedet

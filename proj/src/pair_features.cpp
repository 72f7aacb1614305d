#include "clonedet/pair_features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "clonedet/candidate_graph.hpp"

namespace clonedet {

const std::array<std::string, PairFeatureVector::kCount>& PairFeatureVector::names() {
  static const std::array<std::string, kCount> kNames = {
      "username_sim",    "screen_name_sim", "location_sim",   "description_sim",
      "followers_ratio", "followers_diff",  "friends_diff",   "tweets_diff",
      "favorites_diff",  "account_age_diff_months"};
  return kNames;
}

double followers_ratio(long long f1, long long f2) {
  if (f1 == 0 && f2 == 0) return 1.0;
  const long long lo = std::min(f1, f2);
  const long long hi = std::max(f1, f2);
  return static_cast<double>(lo) / static_cast<double>(hi);
}

namespace {

// Jaro-Winkler on folded strings; an empty attribute on either side scores 0.
double name_sim(const std::string& a, const std::string& b, const JaroWinklerParams& params) {
  const std::string fa = fold_name(a);
  const std::string fb = fold_name(b);
  if (fa.empty() || fb.empty()) return 0.0;
  return jaro_winkler(fa, fb, params);
}

double abs_diff(long long a, long long b) {
  return std::abs(static_cast<double>(a) - static_cast<double>(b));
}

}  // namespace

PairFeatureVector extract_pair_features(const AccountProfile& a, const AccountProfile& b,
                                        const TfidfModel& tfidf,
                                        const JaroWinklerParams& jw_params) {
  PairFeatureVector f;
  f.username_sim = name_sim(a.username, b.username, jw_params);
  f.screen_name_sim = name_sim(a.screen_name, b.screen_name, jw_params);
  f.location_sim = name_sim(a.location, b.location, jw_params);

  // Zero-norm vectors (empty or all-stopword descriptions) score 0 by the
  // cosine convention, which covers the missing-attribute rule.
  const SparseVector va = tfidf.vector(normalize_text(a.description));
  const SparseVector vb = tfidf.vector(normalize_text(b.description));
  f.description_sim = cosine(va, vb);

  f.followers_ratio = followers_ratio(a.followers_count, b.followers_count);
  f.followers_diff = abs_diff(a.followers_count, b.followers_count);
  f.friends_diff = abs_diff(a.friends_count, b.friends_count);
  f.tweets_diff = abs_diff(a.tweet_count, b.tweet_count);
  f.favorites_diff = abs_diff(a.favorites_count, b.favorites_count);

  const Date& da = a.registered_on;
  const Date& db = b.registered_on;
  f.account_age_diff_months = (da <= db) ? whole_months_between(da, db)
                                         : whole_months_between(db, da);
  return f;
}

}  // namespace clonedet

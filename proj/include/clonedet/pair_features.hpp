#pragma once

#include <array>
#include <string>

#include "clonedet/account.hpp"
#include "clonedet/text_similarity.hpp"

namespace clonedet {

// The 10-feature account-pair representation: five bounded similarity
// features followed by five absolute-difference features.
struct PairFeatureVector {
  double username_sim = 0.0;
  double screen_name_sim = 0.0;
  double location_sim = 0.0;
  double description_sim = 0.0;
  double followers_ratio = 0.0;
  double followers_diff = 0.0;
  double friends_diff = 0.0;
  double tweets_diff = 0.0;
  double favorites_diff = 0.0;
  double account_age_diff_months = 0.0;

  static constexpr int kCount = 10;
  static constexpr int kSimilarityCount = 5;  // leading entries bounded to [0,1]

  std::array<double, kCount> as_array() const {
    return {username_sim,  screen_name_sim, location_sim, description_sim,
            followers_ratio, followers_diff, friends_diff, tweets_diff,
            favorites_diff, account_age_diff_months};
  }
  static const std::array<std::string, kCount>& names();
};

// min(f1,f2)/max(f1,f2); defined as 1 when both counts are 0.
double followers_ratio(long long f1, long long f2);

// Symmetric pair featurization. Name/location similarities use Jaro-Winkler
// on folded strings (empty attribute scores 0); description similarity is
// the TF-IDF cosine of the normalized descriptions.
PairFeatureVector extract_pair_features(const AccountProfile& a, const AccountProfile& b,
                                        const TfidfModel& tfidf,
                                        const JaroWinklerParams& jw_params = {});

}  // namespace clonedet

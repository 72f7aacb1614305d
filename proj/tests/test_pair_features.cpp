#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "clonedet/pair_features.hpp"
#include "doctest.h"

using namespace clonedet;

namespace {

AccountProfile sample_account() {
  AccountProfile a;
  a.id = "u1";
  a.username = "Jordan Blake";
  a.screen_name = "jordanblake";
  a.location = "Berlin";
  a.description = "street photography and long walks";
  a.followers_count = 500;
  a.friends_count = 150;
  a.tweet_count = 2200;
  a.favorites_count = 90;
  a.list_count = 3;
  a.registered_on = {2015, 3, 20};
  return a;
}

TfidfModel tiny_tfidf() {
  return TfidfModel::fit({"street photography long walks", "portrait photography studio",
                          "cooking recipes pasta"});
}

}  // namespace

TEST_CASE("followers_ratio is min over max with 0/0 defined as 1") {
  CHECK(followers_ratio(0, 0) == 1.0);
  CHECK(followers_ratio(10, 0) == 0.0);
  CHECK(followers_ratio(0, 10) == 0.0);
  CHECK(followers_ratio(50, 100) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(followers_ratio(100, 50) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(followers_ratio(7, 7) == 1.0);
}

TEST_CASE("pair features are exactly symmetric") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  b.username = "Jordan Blake";
  b.screen_name = "jordan_blake1";
  b.location = "berlin";
  b.description = "portrait photography studio";
  b.followers_count = 40;
  b.friends_count = 400;
  b.tweet_count = 12;
  b.favorites_count = 700;
  b.list_count = 0;
  b.registered_on = {2019, 11, 2};

  const auto ab = extract_pair_features(a, b, tfidf).as_array();
  const auto ba = extract_pair_features(b, a, tfidf).as_array();
  for (int i = 0; i < PairFeatureVector::kCount; ++i) CHECK(ab[i] == ba[i]);
}

TEST_CASE("identical accounts maximize similarities and zero the differences") {
  const TfidfModel tfidf = tiny_tfidf();
  const AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  const PairFeatureVector f = extract_pair_features(a, b, tfidf);
  CHECK(f.username_sim == 1.0);
  CHECK(f.screen_name_sim == 1.0);
  CHECK(f.location_sim == 1.0);
  CHECK(f.description_sim == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.followers_ratio == 1.0);
  CHECK(f.followers_diff == 0.0);
  CHECK(f.friends_diff == 0.0);
  CHECK(f.tweets_diff == 0.0);
  CHECK(f.favorites_diff == 0.0);
  CHECK(f.account_age_diff_months == 0.0);
}

TEST_CASE("missing attributes score zero similarity") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  a.location = "";
  b.description = "";
  const PairFeatureVector f = extract_pair_features(a, b, tfidf);
  CHECK(f.location_sim == 0.0);
  CHECK(f.description_sim == 0.0);
}

TEST_CASE("name similarities compare case-folded strings") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  b.username = "JORDAN BLAKE";
  b.screen_name = "  jordanblake  ";
  const PairFeatureVector f = extract_pair_features(a, b, tfidf);
  CHECK(f.username_sim == 1.0);
  CHECK(f.screen_name_sim == 1.0);
}

TEST_CASE("count differences are absolute values") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  a.followers_count = 100;
  b.followers_count = 350;
  a.friends_count = 90;
  b.friends_count = 10;
  a.tweet_count = 5;
  b.tweet_count = 5;
  a.favorites_count = 0;
  b.favorites_count = 42;
  const PairFeatureVector f = extract_pair_features(a, b, tfidf);
  CHECK(f.followers_diff == 250.0);
  CHECK(f.friends_diff == 80.0);
  CHECK(f.tweets_diff == 0.0);
  CHECK(f.favorites_diff == 42.0);
  CHECK(f.followers_ratio == doctest::Approx(100.0 / 350.0).epsilon(1e-12));
}

TEST_CASE("account age difference counts whole months either direction") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  a.registered_on = {2015, 3, 20};
  b.registered_on = {2016, 3, 19};  // one day short of 12 months
  CHECK(extract_pair_features(a, b, tfidf).account_age_diff_months == 11.0);
  CHECK(extract_pair_features(b, a, tfidf).account_age_diff_months == 11.0);
  b.registered_on = {2016, 3, 20};
  CHECK(extract_pair_features(a, b, tfidf).account_age_diff_months == 12.0);
}

TEST_CASE("description similarity follows the tfidf cosine") {
  const TfidfModel tfidf = tiny_tfidf();
  AccountProfile a = sample_account();
  AccountProfile b = sample_account();
  b.id = "u2";
  a.description = "street photography";
  b.description = "cooking recipes";  // disjoint vocabulary
  CHECK(extract_pair_features(a, b, tfidf).description_sim == 0.0);
  b.description = "Street PHOTOGRAPHY!";  // same content after normalization
  CHECK(extract_pair_features(a, b, tfidf).description_sim == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("feature order and names line up") {
  const auto& names = PairFeatureVector::names();
  REQUIRE(static_cast<int>(names.size()) == PairFeatureVector::kCount);
  CHECK(names[0] == "username_sim");
  CHECK(names[4] == "followers_ratio");
  CHECK(names[9] == "account_age_diff_months");
  PairFeatureVector f;
  f.username_sim = 0.25;
  f.account_age_diff_months = 7.0;
  const auto arr = f.as_array();
  CHECK(arr[0] == 0.25);
  CHECK(arr[9] == 7.0);
}

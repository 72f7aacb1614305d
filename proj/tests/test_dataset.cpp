#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clonedet/dataset.hpp"
#include "doctest.h"

using namespace clonedet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("clonedet_dataset_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

AccountProfile make_account(const std::string& id, const std::string& username, int year) {
  AccountProfile a;
  a.id = id;
  a.username = username;
  a.screen_name = username + " person";
  a.location = "Sydney";
  a.description = "writes about " + username;
  a.followers_count = 120;
  a.friends_count = 45;
  a.tweet_count = 300;
  a.favorites_count = 12;
  a.list_count = 2;
  a.registered_on = Date{year, 6, 15};
  a.has_profile_background = true;
  a.has_url = (id.size() % 2) == 0;
  a.posts = {"hello from " + username, "more thoughts by " + username};
  return a;
}

Dataset make_dataset() {
  Dataset d;
  d.accounts = {make_account("a1", "kim", 2018), make_account("a2", "kim_", 2020),
                make_account("a3", "lee", 2019)};
  d.edges = {{"a1", "a3", EdgeKind::Follower}, {"a3", "a1", EdgeKind::Friend}};
  d.labels = {{"a1", "a2"}};
  d.reference_date = Date{2021, 5, 9};
  d.manifest.source = "synthetic";
  d.manifest.seed = 7;
  d.manifest.reference_date = d.reference_date;
  d.manifest.reference_date_set = true;
  return d;
}

}  // namespace

TEST_CASE("dates parse, validate and print") {
  const Date d = Date::parse("2021-05-09");
  CHECK(d.year == 2021);
  CHECK(d.month == 5);
  CHECK(d.day == 9);
  CHECK(d.to_string() == "2021-05-09");
  CHECK(Date::parse("2020-02-29").valid());  // leap year

  for (const char* bad : {"2021-02-29", "2021-5-9", "20210509", "2021-13-01", "2021-00-10",
                          "2021-12-32", "abcd-ef-gh", "", "2021-05-09x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(Date::parse(bad), std::invalid_argument);
  }

  CHECK(Date{2021, 4, 31}.valid() == false);
  CHECK(Date{2021, 4, 30}.valid());
  CHECK(Date{1900, 2, 29}.valid() == false);  // century, not a leap year
  CHECK(Date{2000, 2, 29}.valid());
}

TEST_CASE("whole months count completed calendar months") {
  CHECK(whole_months_between(Date{2021, 1, 15}, Date{2021, 1, 15}) == 0);
  CHECK(whole_months_between(Date{2021, 1, 15}, Date{2021, 2, 14}) == 0);
  CHECK(whole_months_between(Date{2021, 1, 15}, Date{2021, 2, 15}) == 1);
  CHECK(whole_months_between(Date{2020, 3, 10}, Date{2021, 3, 9}) == 11);
  CHECK(whole_months_between(Date{2020, 3, 10}, Date{2021, 3, 10}) == 12);
  CHECK(whole_months_between(Date{2021, 1, 31}, Date{2021, 2, 28}) == 0);
  CHECK(whole_months_between(Date{2018, 12, 31}, Date{2021, 1, 1}) == 24);
  CHECK_THROWS_AS(whole_months_between(Date{2021, 2, 1}, Date{2021, 1, 1}),
                  std::invalid_argument);
}

TEST_CASE("dataset helpers index accounts and canonicalize labels") {
  const Dataset d = make_dataset();
  const auto index = d.account_index();
  CHECK(index.at("a1") == 0);
  CHECK(index.at("a3") == 2);
  CHECK(d.account_ids() == std::vector<std::string>{"a1", "a2", "a3"});

  Dataset flipped = d;
  flipped.labels = {{"a2", "a1"}};  // reversed order, same pair
  CHECK(flipped.label_pairs() == d.label_pairs());
  CHECK(d.label_pairs().count({"a1", "a2"}) == 1);

  Dataset dup = d;
  dup.accounts.push_back(make_account("a1", "other", 2019));
  CHECK_THROWS_WITH_AS(dup.account_index(), "duplicate account id: a1", std::runtime_error);
}

TEST_CASE("validation rejects inconsistent datasets") {
  CHECK_NOTHROW(make_dataset().validate());

  Dataset d;
  d.reference_date = Date{2021, 1, 1};
  CHECK_THROWS_WITH_AS(d.validate(), "empty dataset", std::runtime_error);

  d = make_dataset();
  d.accounts[1].id = "";
  CHECK_THROWS_AS(d.validate(), std::runtime_error);

  d = make_dataset();
  d.accounts[0].friends_count = -3;
  CHECK_THROWS_WITH_AS(d.validate(), "negative count on account a1", std::runtime_error);

  d = make_dataset();
  d.accounts[2].registered_on = Date{2021, 2, 30};
  CHECK_THROWS_WITH_AS(d.validate(), "invalid registration date on account a3",
                       std::runtime_error);

  d = make_dataset();
  d.accounts[2].registered_on = Date{2022, 1, 1};  // after the reference date
  CHECK_THROWS_AS(d.validate(), std::runtime_error);

  d = make_dataset();
  d.edges.push_back({"a1", "ghost", EdgeKind::Friend});
  CHECK_THROWS_WITH_AS(d.validate(), "edge references unknown account id: ghost",
                       std::runtime_error);

  d = make_dataset();
  d.labels.push_back({"ghost", "a1"});
  CHECK_THROWS_WITH_AS(d.validate(), "label references unknown account id: ghost",
                       std::runtime_error);

  d = make_dataset();
  d.labels.push_back({"a3", "a3"});
  CHECK_THROWS_WITH_AS(d.validate(), "label pair must name two distinct accounts: a3",
                       std::runtime_error);
}

TEST_CASE("datasets survive a save/load round trip byte for byte") {
  const Dataset original = make_dataset();
  TempDir first("roundtrip_a");
  TempDir second("roundtrip_b");
  save_dataset(original, first.str());
  const Dataset loaded = load_dataset(first.str());

  REQUIRE(loaded.accounts.size() == original.accounts.size());
  for (std::size_t i = 0; i < original.accounts.size(); ++i) {
    const AccountProfile& a = original.accounts[i];
    const AccountProfile& b = loaded.accounts[i];
    CHECK(a.id == b.id);
    CHECK(a.username == b.username);
    CHECK(a.screen_name == b.screen_name);
    CHECK(a.location == b.location);
    CHECK(a.description == b.description);
    CHECK(a.followers_count == b.followers_count);
    CHECK(a.friends_count == b.friends_count);
    CHECK(a.tweet_count == b.tweet_count);
    CHECK(a.favorites_count == b.favorites_count);
    CHECK(a.list_count == b.list_count);
    CHECK(a.registered_on == b.registered_on);
    CHECK(a.has_profile_background == b.has_profile_background);
    CHECK(a.uses_default_profile_image == b.uses_default_profile_image);
    CHECK(a.has_url == b.has_url);
    CHECK(a.posts == b.posts);
  }
  REQUIRE(loaded.edges.size() == 2);
  CHECK(loaded.edges[0].a == "a1");
  CHECK(loaded.edges[0].kind == EdgeKind::Follower);
  CHECK(loaded.edges[1].kind == EdgeKind::Friend);
  CHECK(loaded.labels == original.labels);
  CHECK(loaded.reference_date == original.reference_date);
  CHECK(loaded.manifest.reference_date_set);
  CHECK(loaded.manifest.source == "synthetic");
  CHECK(loaded.manifest.seed == 7);

  // Saving what was loaded reproduces identical files.
  save_dataset(loaded, second.str());
  for (const char* name : {"accounts.jsonl", "edges.tsv", "labels.tsv", "manifest.json"}) {
    CAPTURE(name);
    CHECK(read_file(first.path / name) == read_file(second.path / name));
  }
}

TEST_CASE("ingest reports the offending line") {
  TempDir dir("ingest_errors");
  write_file(dir.path / "edges.tsv", "");
  write_file(dir.path / "accounts.jsonl",
             R"({"id":"a1","username":"u","screen_name":"s","location":"","description":"",)"
             R"("followers_count":0,"friends_count":0,"tweet_count":0,"favorites_count":0,)"
             R"("list_count":0,"registered_on":"2020-01-01","has_profile_background":false,)"
             R"("uses_default_profile_image":false,"has_url":false,"posts":[]})"
             "\nnot json\n");
  try {
    ingest((dir.path / "accounts.jsonl").string(), (dir.path / "edges.tsv").string());
    FAIL("expected a parse failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("malformed edge and label lines are rejected with positions") {
  const Dataset base = make_dataset();
  TempDir dir("bad_edges");
  save_dataset(base, dir.str());

  write_file(dir.path / "edges.tsv", "a1\ta3\n");  // missing the kind column
  try {
    load_dataset(dir.str());
    FAIL("expected an edge failure");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("line 1") != std::string::npos);
    CHECK(what.find("id_a<TAB>id_b<TAB>kind") != std::string::npos);
  }

  write_file(dir.path / "edges.tsv", "a1\ta3\tmentor\n");  // unknown kind
  CHECK_THROWS_AS(load_dataset(dir.str()), std::runtime_error);

  write_file(dir.path / "edges.tsv", "a1\ta3\tfollower\n");
  write_file(dir.path / "labels.tsv", "a1\ta2\textra\n");
  try {
    load_dataset(dir.str());
    FAIL("expected a label failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("victim_id<TAB>clone_id") != std::string::npos);
  }
}

TEST_CASE("blank lines and trailing carriage returns are tolerated") {
  const Dataset base = make_dataset();
  TempDir dir("crlf");
  save_dataset(base, dir.str());
  write_file(dir.path / "edges.tsv", "\n  \na1\ta3\tfollower\r\n\n");
  write_file(dir.path / "labels.tsv", "a1\ta2\r\n");
  const Dataset loaded = load_dataset(dir.str());
  REQUIRE(loaded.edges.size() == 1);
  CHECK(loaded.edges[0].kind == EdgeKind::Follower);
  REQUIRE(loaded.labels.size() == 1);
  CHECK(loaded.labels[0].second == "a2");
}

TEST_CASE("unsupported manifest versions are refused") {
  const Dataset base = make_dataset();
  TempDir dir("manifest_version");
  save_dataset(base, dir.str());
  write_file(dir.path / "manifest.json", R"({"format_version": 2, "source": "synthetic"})");
  CHECK_THROWS_WITH_AS(load_dataset(dir.str()), "unsupported dataset manifest version: 2",
                       std::runtime_error);
}

TEST_CASE("without a manifest the reference date falls back to the newest registration") {
  Dataset base = make_dataset();
  TempDir dir("no_manifest");
  save_dataset(base, dir.str());
  fs::remove(dir.path / "manifest.json");
  const Dataset loaded = load_dataset(dir.str());
  CHECK(loaded.reference_date == Date{2020, 6, 15});  // newest registered_on
  CHECK(loaded.manifest.reference_date_set == false);

  // A manifest date overrides the fallback.
  write_file(dir.path / "manifest.json",
             R"({"format_version": 1, "source": "ingest", "reference_date": "2021-03-01"})");
  const Dataset pinned = load_dataset(dir.str());
  CHECK(pinned.reference_date == Date{2021, 3, 1});
  CHECK(pinned.manifest.reference_date_set);
  CHECK(pinned.manifest.source == "ingest");
}

TEST_CASE("labels are optional at ingest") {
  const Dataset base = make_dataset();
  TempDir dir("no_labels");
  save_dataset(base, dir.str());
  fs::remove(dir.path / "labels.tsv");
  const Dataset loaded = load_dataset(dir.str());
  CHECK(loaded.labels.empty());
  CHECK(loaded.accounts.size() == 3);
}

#include "clonedet/dataset.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace clonedet {

// ---------------------------------------------------------------------------
// Dates
// ---------------------------------------------------------------------------

namespace {

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[static_cast<std::size_t>(month - 1)];
}

}  // namespace

bool Date::valid() const {
  if (year < 1 || month < 1 || month > 12) return false;
  return day >= 1 && day <= days_in_month(year, month);
}

std::string Date::to_string() const {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", year, month, day);
  return buffer;
}

Date Date::parse(std::string_view text) {
  Date d;
  const auto parse_int = [&](std::string_view part, int& out) {
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    return ec == std::errc() && ptr == part.data() + part.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
      !parse_int(text.substr(8, 2), d.day) || !d.valid()) {
    throw std::invalid_argument("malformed date: " + std::string(text));
  }
  return d;
}

int whole_months_between(const Date& from, const Date& to) {
  if (to < from) throw std::invalid_argument("month count requires from <= to");
  int months = (to.year - from.year) * 12 + (to.month - from.month);
  if (to.day < from.day) --months;
  return months;
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

std::map<std::string, int> Dataset::account_index() const {
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(accounts.size()); ++i) {
    if (!index.emplace(accounts[static_cast<std::size_t>(i)].id, i).second)
      throw std::runtime_error("duplicate account id: " + accounts[static_cast<std::size_t>(i)].id);
  }
  return index;
}

std::vector<std::string> Dataset::account_ids() const {
  std::vector<std::string> ids;
  ids.reserve(accounts.size());
  for (const AccountProfile& a : accounts) ids.push_back(a.id);
  return ids;
}

std::set<std::pair<std::string, std::string>> Dataset::label_pairs() const {
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [victim, clone] : labels)
    pairs.emplace(std::min(victim, clone), std::max(victim, clone));
  return pairs;
}

void Dataset::validate() const {
  if (accounts.empty()) throw std::runtime_error("empty dataset");
  const std::map<std::string, int> index = account_index();
  for (const AccountProfile& a : accounts) {
    if (a.id.empty()) throw std::runtime_error("account with empty id");
    if (a.followers_count < 0 || a.friends_count < 0 || a.tweet_count < 0 ||
        a.favorites_count < 0 || a.list_count < 0)
      throw std::runtime_error("negative count on account " + a.id);
    if (!a.registered_on.valid())
      throw std::runtime_error("invalid registration date on account " + a.id);
    if (reference_date < a.registered_on)
      throw std::runtime_error("account " + a.id + " registered after the reference date");
  }
  for (const InteractionEdge& e : edges) {
    if (!index.contains(e.a)) throw std::runtime_error("edge references unknown account id: " + e.a);
    if (!index.contains(e.b)) throw std::runtime_error("edge references unknown account id: " + e.b);
  }
  for (const auto& [victim, clone] : labels) {
    if (!index.contains(victim))
      throw std::runtime_error("label references unknown account id: " + victim);
    if (!index.contains(clone))
      throw std::runtime_error("label references unknown account id: " + clone);
    if (victim == clone)
      throw std::runtime_error("label pair must name two distinct accounts: " + victim);
  }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

namespace {

using Json = nlohmann::ordered_json;

Json account_to_json(const AccountProfile& a) {
  Json j;
  j["id"] = a.id;
  j["username"] = a.username;
  j["screen_name"] = a.screen_name;
  j["location"] = a.location;
  j["description"] = a.description;
  j["followers_count"] = a.followers_count;
  j["friends_count"] = a.friends_count;
  j["tweet_count"] = a.tweet_count;
  j["favorites_count"] = a.favorites_count;
  j["list_count"] = a.list_count;
  j["registered_on"] = a.registered_on.to_string();
  j["has_profile_background"] = a.has_profile_background;
  j["uses_default_profile_image"] = a.uses_default_profile_image;
  j["has_url"] = a.has_url;
  j["posts"] = a.posts;
  return j;
}

AccountProfile account_from_json(const Json& j) {
  AccountProfile a;
  a.id = j.at("id").get<std::string>();
  a.username = j.at("username").get<std::string>();
  a.screen_name = j.at("screen_name").get<std::string>();
  a.location = j.at("location").get<std::string>();
  a.description = j.at("description").get<std::string>();
  a.followers_count = j.at("followers_count").get<long long>();
  a.friends_count = j.at("friends_count").get<long long>();
  a.tweet_count = j.at("tweet_count").get<long long>();
  a.favorites_count = j.at("favorites_count").get<long long>();
  a.list_count = j.at("list_count").get<long long>();
  a.registered_on = Date::parse(j.at("registered_on").get<std::string>());
  a.has_profile_background = j.at("has_profile_background").get<bool>();
  a.uses_default_profile_image = j.at("uses_default_profile_image").get<bool>();
  a.has_url = j.at("has_url").get<bool>();
  a.posts = j.at("posts").get<std::vector<std::string>>();
  return a;
}

[[noreturn]] void fail_line(const std::string& path, int line_no, const std::string& what) {
  throw std::runtime_error(path + " line " + std::to_string(line_no) + ": " + what);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
    fields.back().pop_back();
  return fields;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

}  // namespace

Dataset ingest(const std::string& accounts_path, const std::string& edges_path,
               const std::string& labels_path, const std::string& manifest_path) {
  Dataset dataset;

  {
    std::ifstream in = open_or_throw(accounts_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        dataset.accounts.push_back(account_from_json(Json::parse(line)));
      } catch (const std::exception& e) {
        fail_line(accounts_path, line_no, e.what());
      }
    }
  }
  if (dataset.accounts.empty()) throw std::runtime_error("empty dataset");

  {
    std::ifstream in = open_or_throw(edges_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::vector<std::string> fields = split_tabs(line);
      if (fields.size() != 3) fail_line(edges_path, line_no, "expected id_a<TAB>id_b<TAB>kind");
      try {
        dataset.edges.push_back({fields[0], fields[1], parse_edge_kind(fields[2])});
      } catch (const std::exception& e) {
        fail_line(edges_path, line_no, e.what());
      }
    }
  }

  if (!labels_path.empty() && std::filesystem::exists(labels_path)) {
    std::ifstream in = open_or_throw(labels_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::vector<std::string> fields = split_tabs(line);
      if (fields.size() != 2) fail_line(labels_path, line_no, "expected victim_id<TAB>clone_id");
      dataset.labels.emplace_back(fields[0], fields[1]);
    }
  }

  if (!manifest_path.empty() && std::filesystem::exists(manifest_path)) {
    std::ifstream in = open_or_throw(manifest_path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw std::runtime_error(manifest_path + ": " + e.what());
    }
    dataset.manifest.format_version = j.value("format_version", 1);
    if (dataset.manifest.format_version != 1)
      throw std::runtime_error("unsupported dataset manifest version: " +
                               std::to_string(dataset.manifest.format_version));
    dataset.manifest.source = j.value("source", std::string());
    dataset.manifest.seed = j.value("seed", 0ULL);
    if (j.contains("reference_date")) {
      dataset.manifest.reference_date = Date::parse(j.at("reference_date").get<std::string>());
      dataset.manifest.reference_date_set = true;
    }
  }

  if (dataset.manifest.reference_date_set) {
    dataset.reference_date = dataset.manifest.reference_date;
  } else {
    Date newest = dataset.accounts.front().registered_on;
    for (const AccountProfile& a : dataset.accounts) newest = std::max(newest, a.registered_on);
    dataset.reference_date = newest;
  }

  dataset.validate();
  return dataset;
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  return ingest((base / "accounts.jsonl").string(), (base / "edges.tsv").string(),
                (base / "labels.tsv").string(), (base / "manifest.json").string());
}

void save_dataset(const Dataset& dataset, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  fs::create_directories(base);

  {
    std::ofstream out(base / "accounts.jsonl");
    if (!out) throw std::runtime_error("cannot write " + (base / "accounts.jsonl").string());
    for (const AccountProfile& a : dataset.accounts) out << account_to_json(a).dump() << '\n';
  }
  {
    std::ofstream out(base / "edges.tsv");
    if (!out) throw std::runtime_error("cannot write " + (base / "edges.tsv").string());
    for (const InteractionEdge& e : dataset.edges)
      out << e.a << '\t' << e.b << '\t' << to_string(e.kind) << '\n';
  }
  {
    std::ofstream out(base / "labels.tsv");
    if (!out) throw std::runtime_error("cannot write " + (base / "labels.tsv").string());
    for (const auto& [victim, clone] : dataset.labels) out << victim << '\t' << clone << '\n';
  }
  {
    Json j;
    j["format_version"] = dataset.manifest.format_version;
    j["source"] = dataset.manifest.source;
    j["seed"] = dataset.manifest.seed;
    j["reference_date"] = dataset.reference_date.to_string();
    std::ofstream out(base / "manifest.json");
    if (!out) throw std::runtime_error("cannot write " + (base / "manifest.json").string());
    out << j.dump(2) << '\n';
  }
}

}  // namespace clonedet

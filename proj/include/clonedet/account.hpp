#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace clonedet {

// Calendar date, "YYYY-MM-DD" on the wire.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  bool valid() const;
  std::string to_string() const;
  static Date parse(std::string_view text);  // throws on malformed input
};

// Whole calendar months from `from` to `to`; throws if from > to.
int whole_months_between(const Date& from, const Date& to);

// One account's non-privacy-sensitive attributes, counters and posts.
struct AccountProfile {
  std::string id;
  std::string username;
  std::string screen_name;
  std::string location;     // may be empty
  std::string description;  // may be empty
  long long followers_count = 0;
  long long friends_count = 0;
  long long tweet_count = 0;
  long long favorites_count = 0;
  long long list_count = 0;
  Date registered_on;
  bool has_profile_background = false;
  bool uses_default_profile_image = false;
  bool has_url = false;
  std::vector<std::string> posts;
};

}  // namespace clonedet

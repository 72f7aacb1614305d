#pragma once

#include <string>
#include <vector>

namespace clonedet::resources {

// Text resources embedded at build time from resources/.
extern const char kStopwordsEn[];
extern const char kGivenNames[];
extern const char kFamilyNames[];
extern const char kTopicWords[];

// Splits an embedded one-entry-per-line resource; blank lines dropped.
std::vector<std::string> lines(const char* resource);

}  // namespace clonedet::resources

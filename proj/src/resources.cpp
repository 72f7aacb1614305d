#include "clonedet/resources.hpp"

#include <sstream>

namespace clonedet::resources {

std::vector<std::string> lines(const char* resource) {
  std::vector<std::string> out;
  std::istringstream in(resource);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace clonedet::resources

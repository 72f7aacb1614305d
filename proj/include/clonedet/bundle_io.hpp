#pragma once

#include <string>

#include "clonedet/pipeline.hpp"

namespace clonedet {

// Versioned JSON serialization of a trained model bundle. Floating-point
// values round-trip exactly.
std::string bundle_to_json(const ModelBundle& bundle);

// Rejects unknown versions and malformed input; never returns a partially
// populated bundle.
ModelBundle bundle_from_json(const std::string& text);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace clonedet

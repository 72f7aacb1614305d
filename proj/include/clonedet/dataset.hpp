#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clonedet/account.hpp"
#include "clonedet/account_views.hpp"

namespace clonedet {

struct DatasetManifest {
  int format_version = 1;
  std::string source;  // "synthetic" or "ingest"
  unsigned long long seed = 0;
  Date reference_date;
  bool reference_date_set = false;
};

// A dataset directory holds accounts.jsonl, edges.tsv, labels.tsv and
// manifest.json; labels are the known (victim, clone) pairs and exist only
// for training data.
struct Dataset {
  std::vector<AccountProfile> accounts;
  std::vector<InteractionEdge> edges;
  std::vector<std::pair<std::string, std::string>> labels;  // (victim, clone)
  Date reference_date;
  DatasetManifest manifest;

  std::map<std::string, int> account_index() const;
  std::vector<std::string> account_ids() const;
  // Labels as canonical (min id, max id) pairs for set comparisons.
  std::set<std::pair<std::string, std::string>> label_pairs() const;
  // Referential integrity, id uniqueness, field ranges. Throws on violation.
  void validate() const;
};

// Reads the three data files (labels optional: pass "" to skip). The
// manifest, when present, pins reference_date and seed; without one the
// reference date falls back to the newest registration date, keeping the
// result a pure function of the data files.
Dataset ingest(const std::string& accounts_path, const std::string& edges_path,
               const std::string& labels_path = "", const std::string& manifest_path = "");

// Directory-level convenience wrappers over ingest/save of the four files.
Dataset load_dataset(const std::string& dir);
void save_dataset(const Dataset& dataset, const std::string& dir);

}  // namespace clonedet

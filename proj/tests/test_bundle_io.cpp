#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "clonedet/bundle_io.hpp"
#include "clonedet/pipeline.hpp"
#include "clonedet/synthetic.hpp"
#include "doctest.h"

using namespace clonedet;
namespace fs = std::filesystem;

namespace {

// One trained fusion bundle exercises every serialized section: graph,
// tfidf, node2vec tables, scalers, fusion model, cascade, pairs.
const Dataset& corpus() {
  static const Dataset d = generate_synthetic(60, 12, 90, 3);
  return d;
}

const ModelBundle& trained_bundle() {
  static const ModelBundle bundle = [] {
    PipelineConfig config;
    config.post_embedding_dim = 32;
    config.node2vec.walks_per_node = 3;
    config.node2vec.walk_length = 6;
    config.node2vec.dimension = 16;
    config.node2vec.epochs = 2;
    config.latent_dim = 8;
    config.folds = 3;
    config.max_levels = 2;
    config.cascade = CascadePreset::Lr;
    config.seed = 17;
    return train_pipeline(corpus(), config);
  }();
  return bundle;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("clonedet_bundle_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& text, const std::string& prefix) {
  return text.rfind(prefix, 0) == 0;
}

}  // namespace

TEST_CASE("serialization is a fixpoint and reloading preserves predictions") {
  const ModelBundle& original = trained_bundle();
  const std::string json = bundle_to_json(original);
  const ModelBundle restored = bundle_from_json(json);
  CHECK(bundle_to_json(restored) == json);  // everything round-trips exactly

  CHECK(restored.seed == original.seed);
  CHECK(restored.ablation == original.ablation);
  CHECK(restored.account_order == original.account_order);
  REQUIRE(restored.pairs.size() == original.pairs.size());
  for (std::size_t i = 0; i < restored.pairs.size(); ++i) {
    CHECK(restored.pairs[i].a == original.pairs[i].a);
    CHECK(restored.pairs[i].b == original.pairs[i].b);
    CHECK(restored.pairs[i].label == original.pairs[i].label);
    CHECK(restored.pairs[i].held_out == original.pairs[i].held_out);
  }
  CHECK(restored.wgcca.shared_embedding == original.wgcca.shared_embedding);

  const auto before = predict_pipeline(original, corpus());
  const auto after = predict_pipeline(restored, corpus());
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].a == after[i].a);
    CHECK(before[i].b == after[i].b);
    CHECK(before[i].clone_probability == after[i].clone_probability);  // bitwise
    CHECK(before[i].label == after[i].label);
  }
}

TEST_CASE("file round trip is byte-stable") {
  TempDir dir("roundtrip");
  const fs::path path = dir.path / "model.json";
  save_bundle(trained_bundle(), path.string());
  const ModelBundle loaded = load_bundle(path.string());
  const fs::path again = dir.path / "model2.json";
  save_bundle(loaded, again.string());

  std::ifstream a(path, std::ios::binary);
  std::ifstream b(again, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
  const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
  CHECK(bytes_a == bytes_b);
  CHECK(!bytes_a.empty());
}

TEST_CASE("malformed and foreign payloads are rejected") {
  const std::string malformed = message_of([] { (void)bundle_from_json("{[nope"); });
  CHECK(starts_with(malformed, "malformed model bundle: "));

  CHECK_THROWS_WITH_AS(bundle_from_json("{\"x\": 1}"), "not a model bundle", std::runtime_error);
  CHECK_THROWS_WITH_AS(bundle_from_json("[1, 2]"), "not a model bundle", std::runtime_error);

  // A future version number is refused outright.
  std::string json = bundle_to_json(trained_bundle());
  const std::string needle = "\"version\":1";
  const std::size_t at = json.find(needle);
  REQUIRE(at != std::string::npos);
  json.replace(at, needle.size(), "\"version\":2");
  CHECK_THROWS_WITH_AS(bundle_from_json(json), "unsupported model bundle version: 2",
                       std::runtime_error);

  // Dropping a section makes the payload malformed, not partially loaded.
  std::string missing = bundle_to_json(trained_bundle());
  const std::size_t cascade_at = missing.find("\"cascade\"");
  REQUIRE(cascade_at != std::string::npos);
  missing.replace(cascade_at, 9, "\"cascage\"");
  const std::string dropped = message_of([&] { (void)bundle_from_json(missing); });
  CHECK(starts_with(dropped, "malformed model bundle: "));
}

TEST_CASE("tampered account order is rejected") {
  ModelBundle shuffled = trained_bundle();
  REQUIRE(shuffled.account_order.size() >= 2);
  std::swap(shuffled.account_order.front(), shuffled.account_order.back());
  const std::string json = bundle_to_json(shuffled);
  CHECK_THROWS_WITH_AS(bundle_from_json(json), "account order must be sorted",
                       std::runtime_error);

  ModelBundle trimmed = trained_bundle();
  trimmed.account_order.pop_back();
  CHECK_THROWS_WITH_AS(bundle_from_json(bundle_to_json(trimmed)),
                       "account order does not match the embedding rows", std::runtime_error);
}

TEST_CASE("file errors carry the offending path") {
  TempDir dir("errors");
  const std::string missing = (dir.path / "no_such.json").string();
  const std::string open_error = message_of([&] { (void)load_bundle(missing); });
  CHECK(open_error == "cannot open: " + missing);

  const std::string unwritable = (dir.path / "nodir" / "model.json").string();
  const std::string write_error =
      message_of([&] { save_bundle(trained_bundle(), unwritable); });
  CHECK(write_error == "cannot open for writing: " + unwritable);

  // Truncation surfaces as a malformed bundle, prefixed with the path.
  const fs::path path = dir.path / "model.json";
  save_bundle(trained_bundle(), path.string());
  const auto size = fs::file_size(path);
  fs::resize_file(path, size / 2);
  const std::string truncated = message_of([&] { (void)load_bundle(path.string()); });
  CHECK(starts_with(truncated, path.string() + ": malformed model bundle: "));
}

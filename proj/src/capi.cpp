#include "clonedet.h"

#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonedet/bundle_io.hpp"
#include "clonedet/candidate_graph.hpp"
#include "clonedet/pipeline.hpp"
#include "clonedet/synthetic.hpp"
#include "json.hpp"

struct cdt_dataset {
  clonedet::Dataset value;
};

struct cdt_bundle {
  clonedet::ModelBundle value;
};

namespace {

thread_local std::string g_last_error;

cdt_status fail(cdt_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
cdt_status guarded(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    return fail(CDT_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CDT_ERROR_NO_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return fail(CDT_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(CDT_ERROR_RUNTIME, "unknown error");
  }
  g_last_error.clear();
  return CDT_OK;
}

bool require(const void* pointer, const char* name, cdt_status* status) {
  if (pointer != nullptr) return false;
  *status = fail(CDT_ERROR_INVALID_ARGUMENT, std::string("null argument: ") + name);
  return true;
}

// Strict parse: every present key must be known and well-typed, so CLI
// typos surface as errors instead of silently training with defaults.
clonedet::PipelineConfig config_from_json(const char* config_json) {
  clonedet::PipelineConfig config;
  if (config_json == nullptr || *config_json == '\0') return config;

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "delta") {
        config.graph.delta = value.get<double>();
      } else if (key == "post_embedding_dim") {
        config.post_embedding_dim = value.get<int>();
      } else if (key == "post_embedding_seed") {
        config.post_embedding_seed = value.get<unsigned long long>();
      } else if (key == "external_embeddings_path") {
        config.external_embeddings_path = value.get<std::string>();
      } else if (key == "node2vec") {
        if (!value.is_object()) throw std::invalid_argument("node2vec must be a JSON object");
        for (const auto& [nkey, nvalue] : value.items()) {
          if (nkey == "return_p") {
            config.node2vec.return_p = nvalue.get<double>();
          } else if (nkey == "in_out_q") {
            config.node2vec.in_out_q = nvalue.get<double>();
          } else if (nkey == "walks_per_node") {
            config.node2vec.walks_per_node = nvalue.get<int>();
          } else if (nkey == "walk_length") {
            config.node2vec.walk_length = nvalue.get<int>();
          } else if (nkey == "dimension") {
            config.node2vec.dimension = nvalue.get<int>();
          } else if (nkey == "window") {
            config.node2vec.window = nvalue.get<int>();
          } else if (nkey == "negative_samples") {
            config.node2vec.negative_samples = nvalue.get<int>();
          } else if (nkey == "epochs") {
            config.node2vec.epochs = nvalue.get<int>();
          } else if (nkey == "learning_rate") {
            config.node2vec.learning_rate = nvalue.get<double>();
          } else {
            throw std::invalid_argument("unknown node2vec config key: " + nkey);
          }
        }
      } else if (key == "wgcca_weights") {
        config.wgcca_weights = value.get<std::vector<double>>();
      } else if (key == "latent_dim") {
        config.latent_dim = value.get<int>();
      } else if (key == "wgcca_ridge") {
        config.wgcca_ridge = value.get<double>();
      } else if (key == "ablation") {
        config.ablation = clonedet::parse_ablation(value.get<std::string>());
      } else if (key == "cascade") {
        config.cascade = clonedet::parse_cascade_preset(value.get<std::string>());
      } else if (key == "folds") {
        config.folds = value.get<int>();
      } else if (key == "max_levels") {
        config.max_levels = value.get<int>();
      } else if (key == "improvement_tolerance") {
        config.improvement_tolerance = value.get<double>();
      } else if (key == "validation_fraction") {
        config.validation_fraction = value.get<double>();
      } else if (key == "train_fraction") {
        config.train_fraction = value.get<double>();
      } else if (key == "seed") {
        config.seed = value.get<unsigned long long>();
      } else {
        throw std::invalid_argument("unknown config key: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return config;
}

void write_predictions(const std::vector<clonedet::PairPrediction>& predictions,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buffer[32];
  for (const auto& prediction : predictions) {
    std::snprintf(buffer, sizeof buffer, "%.4f", prediction.clone_probability);
    out << prediction.a << '\t' << prediction.b << '\t' << buffer << '\t' << prediction.label
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

cdt_metrics to_metrics(const clonedet::EvaluationReport& report) {
  cdt_metrics metrics;
  metrics.precision = report.precision;
  metrics.recall = report.recall;
  metrics.f1 = report.f1;
  metrics.tp = report.tp;
  metrics.fp = report.fp;
  metrics.fn = report.fn;
  metrics.tn = report.tn;
  return metrics;
}

}  // namespace

extern "C" {

const char* cdt_version(void) { return CDT_VERSION_STRING; }

const char* cdt_last_error(void) { return g_last_error.c_str(); }

cdt_status cdt_dataset_generate(long long legitimate, long long clone_pairs, long long noise,
                                unsigned long long seed, cdt_dataset** out) {
  cdt_status status;
  if (require(out, "out", &status)) return status;
  *out = nullptr;
  return guarded([&] {
    constexpr long long kMax = 10'000'000;
    if (legitimate < 0 || clone_pairs < 0 || noise < 0 || legitimate > kMax || clone_pairs > kMax ||
        noise > kMax)
      throw std::invalid_argument("account counts must lie in [0, 10000000]");
    auto dataset = std::make_unique<cdt_dataset>();
    dataset->value = clonedet::generate_synthetic(static_cast<int>(legitimate),
                                                  static_cast<int>(clone_pairs),
                                                  static_cast<int>(noise), seed);
    *out = dataset.release();
  });
}

cdt_status cdt_dataset_load(const char* dir, cdt_dataset** out) {
  cdt_status status;
  if (require(dir, "dir", &status) || require(out, "out", &status)) return status;
  *out = nullptr;
  return guarded([&] {
    auto dataset = std::make_unique<cdt_dataset>();
    dataset->value = clonedet::load_dataset(dir);
    *out = dataset.release();
  });
}

cdt_status cdt_dataset_save(const cdt_dataset* dataset, const char* dir) {
  cdt_status status;
  if (require(dataset, "dataset", &status) || require(dir, "dir", &status)) return status;
  return guarded([&] { clonedet::save_dataset(dataset->value, dir); });
}

long long cdt_dataset_account_count(const cdt_dataset* dataset) {
  return dataset == nullptr ? -1 : static_cast<long long>(dataset->value.accounts.size());
}

long long cdt_dataset_edge_count(const cdt_dataset* dataset) {
  return dataset == nullptr ? -1 : static_cast<long long>(dataset->value.edges.size());
}

long long cdt_dataset_label_count(const cdt_dataset* dataset) {
  return dataset == nullptr ? -1 : static_cast<long long>(dataset->value.labels.size());
}

void cdt_dataset_free(cdt_dataset* dataset) { delete dataset; }

cdt_status cdt_build_graph(const cdt_dataset* dataset, double delta, const char* out_path,
                           long long* edge_count) {
  cdt_status status;
  if (require(dataset, "dataset", &status)) return status;
  return guarded([&] {
    clonedet::GraphConfig config;
    config.delta = delta;
    config.validate();
    const clonedet::CandidateGraph graph =
        clonedet::build_candidate_graph(dataset->value.accounts, config);
    if (out_path != nullptr) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error(std::string("cannot open for writing: ") + out_path);
      clonedet::write_edge_list(graph, out);
      if (!out) throw std::runtime_error(std::string("write failed: ") + out_path);
    }
    if (edge_count != nullptr) *edge_count = static_cast<long long>(graph.edges.size());
  });
}

cdt_status cdt_train(const cdt_dataset* dataset, const char* config_json, cdt_bundle** out) {
  cdt_status status;
  if (require(dataset, "dataset", &status) || require(out, "out", &status)) return status;
  *out = nullptr;
  return guarded([&] {
    const clonedet::PipelineConfig config = config_from_json(config_json);
    auto bundle = std::make_unique<cdt_bundle>();
    bundle->value = clonedet::train_pipeline(dataset->value, config);
    *out = bundle.release();
  });
}

cdt_status cdt_bundle_save(const cdt_bundle* bundle, const char* path) {
  cdt_status status;
  if (require(bundle, "bundle", &status) || require(path, "path", &status)) return status;
  return guarded([&] { clonedet::save_bundle(bundle->value, path); });
}

cdt_status cdt_bundle_load(const char* path, cdt_bundle** out) {
  cdt_status status;
  if (require(path, "path", &status) || require(out, "out", &status)) return status;
  *out = nullptr;
  return guarded([&] {
    auto bundle = std::make_unique<cdt_bundle>();
    bundle->value = clonedet::load_bundle(path);
    *out = bundle.release();
  });
}

void cdt_bundle_free(cdt_bundle* bundle) { delete bundle; }

cdt_status cdt_predict(const cdt_bundle* bundle, const cdt_dataset* dataset,
                       const char* embeddings_path, const char* out_path, long long* pair_count) {
  cdt_status status;
  if (require(bundle, "bundle", &status) || require(dataset, "dataset", &status)) return status;
  return guarded([&] {
    const auto predictions = clonedet::predict_pipeline(
        bundle->value, dataset->value, embeddings_path == nullptr ? "" : embeddings_path);
    if (out_path != nullptr) write_predictions(predictions, out_path);
    if (pair_count != nullptr) *pair_count = static_cast<long long>(predictions.size());
  });
}

cdt_status cdt_evaluate(const cdt_bundle* bundle, const cdt_dataset* dataset,
                        const char* embeddings_path, int holdout, cdt_metrics* out) {
  cdt_status status;
  if (require(bundle, "bundle", &status) || require(dataset, "dataset", &status) ||
      require(out, "out", &status))
    return status;
  return guarded([&] {
    const std::string embeddings = embeddings_path == nullptr ? "" : embeddings_path;
    clonedet::EvaluationReport report;
    if (holdout != 0) {
      report = clonedet::evaluate_bundle_holdout(bundle->value, dataset->value, embeddings);
    } else {
      if (dataset->value.labels.empty()) throw std::invalid_argument("dataset has no labels");
      const auto predictions =
          clonedet::predict_pipeline(bundle->value, dataset->value, embeddings);
      report = clonedet::evaluate(predictions, dataset->value.label_pairs());
    }
    *out = to_metrics(report);
  });
}

}  // extern "C"

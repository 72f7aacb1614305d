#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clonedet.h"
#include "json.hpp"

namespace {

struct DatasetDeleter {
  void operator()(cdt_dataset* dataset) const { cdt_dataset_free(dataset); }
};
struct BundleDeleter {
  void operator()(cdt_bundle* bundle) const { cdt_bundle_free(bundle); }
};
using DatasetPtr = std::unique_ptr<cdt_dataset, DatasetDeleter>;
using BundlePtr = std::unique_ptr<cdt_bundle, BundleDeleter>;

int fail(const std::string& action) {
  std::cerr << "error: " << action << ": " << cdt_last_error() << '\n';
  return 1;
}

DatasetPtr load_data(const std::string& dir, int* exit_code) {
  cdt_dataset* raw = nullptr;
  if (cdt_dataset_load(dir.c_str(), &raw) != CDT_OK) {
    *exit_code = fail("loading dataset " + dir);
    return nullptr;
  }
  return DatasetPtr(raw);
}

BundlePtr load_model(const std::string& path, int* exit_code) {
  cdt_bundle* raw = nullptr;
  if (cdt_bundle_load(path.c_str(), &raw) != CDT_OK) {
    *exit_code = fail("loading model " + path);
    return nullptr;
  }
  return BundlePtr(raw);
}

std::string format4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", value);
  return buffer;
}

void print_metrics(const cdt_metrics& metrics, const std::string& scope) {
  std::cout << "scope: " << scope << '\n'
            << "precision: " << format4(metrics.precision) << '\n'
            << "recall: " << format4(metrics.recall) << '\n'
            << "f1: " << format4(metrics.f1) << '\n'
            << "tp: " << metrics.tp << '\n'
            << "fp: " << metrics.fp << '\n'
            << "fn: " << metrics.fn << '\n'
            << "tn: " << metrics.tn << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("identity-clone detection over social account datasets (v") +
               cdt_version() + ")"};
  app.require_subcommand(1);

  // generate -------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "write a deterministic synthetic dataset");
  long long legit = 1000;
  long long clones = 200;
  long long noise = 2000;
  unsigned long long gen_seed = 42;
  std::string gen_out;
  generate->add_option("--legit", legit, "legitimate accounts")->capture_default_str();
  generate->add_option("--clones", clones, "cloned (victim, fake) pairs")->capture_default_str();
  generate->add_option("--noise", noise, "unrelated extra accounts")->capture_default_str();
  generate->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  generate->add_option("--out", gen_out, "dataset directory")->required();

  // build-graph ----------------------------------------------------------
  auto* build = app.add_subcommand("build-graph", "write the candidate pair edge list");
  std::string graph_data;
  double graph_delta = 0.8;
  std::string graph_out;
  build->add_option("--data", graph_data, "dataset directory")->required();
  build->add_option("--delta", graph_delta, "name similarity threshold")->capture_default_str();
  build->add_option("--out", graph_out, "edge list file (TSV)")->required();

  // train ------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "fit a detection model on a labeled dataset");
  std::string train_data;
  std::string train_out;
  double train_delta = 0.8;
  std::vector<double> wgcca_weights = {0.25, 0.5, 0.5, 0.25};
  int latent_dim = 64;
  int folds = 5;
  std::string ablation = "full";
  std::string cascade = "default";
  unsigned long long train_seed = 0;
  std::string train_embeddings;
  int max_levels = 20;
  double train_fraction = 0.8;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--out", train_out, "model file to write")->required();
  train->add_option("--delta", train_delta, "name similarity threshold")->capture_default_str();
  train->add_option("--wgcca-weights", wgcca_weights,
                    "view weights: post,follower,friend,profile")
      ->delimiter(',')
      ->expected(4)
      ->capture_default_str();
  train->add_option("--latent-dim", latent_dim, "fused embedding size")->capture_default_str();
  train->add_option("--folds", folds, "cross-validation folds per level")->capture_default_str();
  train->add_option("--ablation", ablation, "feature set")
      ->check(CLI::IsMember({"full", "gc", "account", "wgcca"}))
      ->capture_default_str();
  train->add_option("--cascade", cascade, "level learner family")
      ->check(CLI::IsMember({"default", "rf", "ert", "lr"}))
      ->capture_default_str();
  train->add_option("--seed", train_seed, "training seed")->capture_default_str();
  train->add_option("--embeddings-file", train_embeddings,
                    "precomputed per-account post vectors");
  train->add_option("--max-levels", max_levels, "cascade level cap")->capture_default_str();
  train->add_option("--train-fraction", train_fraction, "pair-level train share")
      ->capture_default_str();

  // predict ----------------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "score every candidate pair of a dataset");
  std::string predict_model;
  std::string predict_data;
  std::string predict_out;
  std::string predict_embeddings;
  predict->add_option("--model", predict_model, "trained model file")->required();
  predict->add_option("--data", predict_data, "dataset directory")->required();
  predict->add_option("--out", predict_out, "predictions file (TSV)")->required();
  predict->add_option("--embeddings-file", predict_embeddings,
                      "precomputed per-account post vectors");

  // evaluate ---------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "precision/recall/F1 of a model on a dataset");
  std::string eval_model;
  std::string eval_data;
  std::string eval_embeddings;
  std::string eval_json;
  bool eval_all = false;
  evaluate->add_option("--model", eval_model, "trained model file")->required();
  evaluate->add_option("--data", eval_data, "dataset directory")->required();
  evaluate->add_option("--embeddings-file", eval_embeddings,
                       "precomputed per-account post vectors");
  evaluate->add_option("--json", eval_json, "also write the report as JSON");
  evaluate->add_flag("--all", eval_all,
                     "score against all dataset labels instead of the recorded held-out pairs");

  CLI11_PARSE(app, argc, argv);
  int exit_code = 0;

  if (*generate) {
    cdt_dataset* raw = nullptr;
    if (cdt_dataset_generate(legit, clones, noise, gen_seed, &raw) != CDT_OK)
      return fail("generating dataset");
    DatasetPtr dataset(raw);
    if (cdt_dataset_save(dataset.get(), gen_out.c_str()) != CDT_OK)
      return fail("saving dataset " + gen_out);
    std::cout << "accounts: " << cdt_dataset_account_count(dataset.get()) << '\n'
              << "edges: " << cdt_dataset_edge_count(dataset.get()) << '\n'
              << "labels: " << cdt_dataset_label_count(dataset.get()) << '\n'
              << "written: " << gen_out << '\n';
    return 0;
  }

  if (*build) {
    DatasetPtr dataset = load_data(graph_data, &exit_code);
    if (!dataset) return exit_code;
    long long edges = 0;
    if (cdt_build_graph(dataset.get(), graph_delta, graph_out.c_str(), &edges) != CDT_OK)
      return fail("building candidate graph");
    std::cout << "delta: " << format4(graph_delta) << '\n'
              << "candidate pairs: " << edges << '\n'
              << "written: " << graph_out << '\n';
    return 0;
  }

  if (*train) {
    DatasetPtr dataset = load_data(train_data, &exit_code);
    if (!dataset) return exit_code;
    nlohmann::json config;
    config["delta"] = train_delta;
    config["wgcca_weights"] = wgcca_weights;
    config["latent_dim"] = latent_dim;
    config["folds"] = folds;
    config["ablation"] = ablation;
    config["cascade"] = cascade;
    config["seed"] = train_seed;
    config["max_levels"] = max_levels;
    config["train_fraction"] = train_fraction;
    if (!train_embeddings.empty()) config["external_embeddings_path"] = train_embeddings;
    cdt_bundle* raw = nullptr;
    if (cdt_train(dataset.get(), config.dump().c_str(), &raw) != CDT_OK)
      return fail("training");
    BundlePtr bundle(raw);
    if (cdt_bundle_save(bundle.get(), train_out.c_str()) != CDT_OK)
      return fail("saving model " + train_out);
    std::cout << "model written: " << train_out << '\n';
    return 0;
  }

  if (*predict) {
    BundlePtr bundle = load_model(predict_model, &exit_code);
    if (!bundle) return exit_code;
    DatasetPtr dataset = load_data(predict_data, &exit_code);
    if (!dataset) return exit_code;
    long long pairs = 0;
    if (cdt_predict(bundle.get(), dataset.get(),
                    predict_embeddings.empty() ? nullptr : predict_embeddings.c_str(),
                    predict_out.c_str(), &pairs) != CDT_OK)
      return fail("predicting");
    std::cout << "scored pairs: " << pairs << '\n' << "written: " << predict_out << '\n';
    return 0;
  }

  if (*evaluate) {
    BundlePtr bundle = load_model(eval_model, &exit_code);
    if (!bundle) return exit_code;
    DatasetPtr dataset = load_data(eval_data, &exit_code);
    if (!dataset) return exit_code;
    cdt_metrics metrics;
    if (cdt_evaluate(bundle.get(), dataset.get(),
                     eval_embeddings.empty() ? nullptr : eval_embeddings.c_str(),
                     eval_all ? 0 : 1, &metrics) != CDT_OK)
      return fail("evaluating");
    const std::string scope = eval_all ? "all-labels" : "holdout";
    print_metrics(metrics, scope);
    if (!eval_json.empty()) {
      nlohmann::ordered_json report{{"scope", scope},         {"precision", metrics.precision},
                                    {"recall", metrics.recall}, {"f1", metrics.f1},
                                    {"tp", metrics.tp},        {"fp", metrics.fp},
                                    {"fn", metrics.fn},        {"tn", metrics.tn}};
      std::ofstream out(eval_json, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot open for writing: " << eval_json << '\n';
        return 1;
      }
      out << report.dump(2) << '\n';
      std::cout << "report written: " << eval_json << '\n';
    }
    return 0;
  }

  return 0;
}

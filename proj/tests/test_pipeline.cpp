#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "clonedet/pipeline.hpp"
#include "clonedet/rng.hpp"
#include "clonedet/synthetic.hpp"
#include "doctest.h"

using namespace clonedet;
namespace fs = std::filesystem;

namespace {

// One small synthetic corpus shared by the heavier end-to-end cases.
const Dataset& small_dataset() {
  static const Dataset d = generate_synthetic(60, 12, 90, 3);
  return d;
}

// Dimensions small enough that fusion runs in well under a second.
PipelineConfig small_config() {
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
  return config;
}

AccountProfile plain_account(const std::string& id, const std::string& username) {
  AccountProfile a;
  a.id = id;
  a.username = username;
  a.screen_name = username;
  a.description = "account about " + username;
  a.followers_count = 10;
  a.friends_count = 10;
  a.tweet_count = 10;
  a.registered_on = Date{2020, 1, 1};
  a.posts = {"post by " + username};
  return a;
}

Dataset tiny_dataset(const std::vector<std::string>& usernames,
                     const std::vector<std::pair<std::string, std::string>>& labels) {
  Dataset d;
  for (std::size_t i = 0; i < usernames.size(); ++i)
    d.accounts.push_back(plain_account("t" + std::to_string(i + 1), usernames[i]));
  d.labels = labels;
  d.reference_date = Date{2021, 1, 1};
  return d;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("clonedet_pipeline_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_embeddings_file(const fs::path& path, const Dataset& dataset, int dim) {
  std::ofstream out(path);
  for (const AccountProfile& a : dataset.accounts) {
    out << a.id;
    Rng rng(std::hash<std::string>{}(a.id));
    for (int k = 0; k < dim; ++k) out << ' ' << rng.next_double();
    out << '\n';
  }
}

}  // namespace

TEST_CASE("ablation and preset names round-trip") {
  for (const Ablation a : {Ablation::GcOnly, Ablation::AccountOnly, Ablation::WgccaOnly,
                           Ablation::Full})
    CHECK(parse_ablation(to_string(a)) == a);
  CHECK(to_string(Ablation::GcOnly) == "gc");
  CHECK(to_string(Ablation::AccountOnly) == "account");
  CHECK(to_string(Ablation::WgccaOnly) == "wgcca");
  CHECK(to_string(Ablation::Full) == "full");
  CHECK_THROWS_AS(parse_ablation("everything"), std::invalid_argument);

  for (const CascadePreset p :
       {CascadePreset::Default, CascadePreset::Rf, CascadePreset::Ert, CascadePreset::Lr})
    CHECK(parse_cascade_preset(to_string(p)) == p);
  CHECK_THROWS_AS(parse_cascade_preset("boost"), std::invalid_argument);

  const auto standard = cascade_preset_learners(CascadePreset::Default);
  REQUIRE(standard.size() == 4);
  CHECK(standard[2].kind == LearnerKind::ExtraTrees);
  for (const LearnerSpec& spec : cascade_preset_learners(CascadePreset::Lr))
    CHECK(spec.kind == LearnerKind::Logistic);
  for (const LearnerSpec& spec : cascade_preset_learners(CascadePreset::Rf))
    CHECK(spec.kind == LearnerKind::RandomForest);
  for (const LearnerSpec& spec : cascade_preset_learners(CascadePreset::Ert))
    CHECK(spec.kind == LearnerKind::ExtraTrees);
}

TEST_CASE("feature scaling maps training bounds to [0,1] and clamps beyond them") {
  Eigen::MatrixXd x(3, 3);
  x << 1.0, 5.0, 2.0,
       3.0, 5.0, 4.0,
       5.0, 5.0, 6.0;
  const FeatureScaler scaler = FeatureScaler::fit(x);
  const Eigen::MatrixXd t = scaler.transform(x);
  CHECK(t(0, 0) == 0.0);
  CHECK(t(1, 0) == 0.5);
  CHECK(t(2, 0) == 1.0);
  CHECK(t(0, 1) == 0.0);  // constant column collapses to zero
  CHECK(t(2, 1) == 0.0);
  CHECK(t(1, 2) == 0.5);

  Eigen::MatrixXd beyond(1, 3);
  beyond << -10.0, 99.0, 100.0;
  const Eigen::MatrixXd clamped = scaler.transform(beyond);
  CHECK(clamped(0, 0) == 0.0);
  CHECK(clamped(0, 2) == 1.0);

  // A mask leaves unscaled columns untouched.
  const FeatureScaler masked = FeatureScaler::fit(x, {false, true, true});
  const Eigen::MatrixXd mt = masked.transform(beyond);
  CHECK(mt(0, 0) == -10.0);

  Eigen::MatrixXd empty;
  CHECK_THROWS_WITH_AS(FeatureScaler::fit(empty), "cannot fit a scaler without data",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(FeatureScaler::fit(x, {true, false}),
                       "scale mask does not match the column count", std::invalid_argument);
  Eigen::MatrixXd wrong(2, 5);
  wrong.setZero();
  CHECK_THROWS_WITH_AS(scaler.transform(wrong), "column count does not match the fitted scaler",
                       std::invalid_argument);
}

TEST_CASE("evaluation counts graph misses as false negatives") {
  const auto pred = [](const std::string& a, const std::string& b, double p) {
    PairPrediction out;
    out.a = a;
    out.b = b;
    out.clone_probability = p;
    out.label = p > 0.5 ? 1 : 0;
    return out;
  };
  const std::set<std::pair<std::string, std::string>> truth = {
      {"a", "b"}, {"e", "f"}, {"g", "h"}};  // (g,h) never became a candidate
  const std::vector<PairPrediction> predictions = {
      pred("a", "b", 0.9),  // tp
      pred("c", "d", 0.8),  // fp
      pred("e", "f", 0.2),  // truth predicted negative: a miss, not a tn
      pred("i", "j", 0.1),  // tn
  };
  const EvaluationReport report = evaluate(predictions, truth);
  CHECK(report.tp == 1);
  CHECK(report.fp == 1);
  CHECK(report.fn == 2);
  CHECK(report.tn == 1);
  CHECK(report.precision == doctest::Approx(0.5));
  CHECK(report.recall == doctest::Approx(1.0 / 3.0));
  CHECK(report.f1 == doctest::Approx(0.4));

  const EvaluationReport empty = evaluate({}, {});
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);
}

TEST_CASE("feature assembly widths follow the ablation") {
  PipelineConfig config = small_config();
  const struct {
    Ablation ablation;
    int width;
  } expected[] = {
      {Ablation::GcOnly, 2},
      {Ablation::AccountOnly, 10},
      {Ablation::WgccaOnly, 2 * 8},
      {Ablation::Full, 10 + 2 * 8},
  };
  for (const auto& [ablation, width] : expected) {
    CAPTURE(to_string(ablation));
    config.ablation = ablation;
    const TrainingFeaturization fz = featurize_for_training(small_dataset(), config);
    CHECK(fz.features.cols() == width);
    CHECK(fz.bundle.ablation == ablation);
    CHECK(fz.features.rows() == static_cast<Eigen::Index>(fz.bundle.pairs.size()));
    CHECK(fz.labels.size() == fz.bundle.pairs.size());
    // Every assembled feature lives in [0,1]: bounded similarities pass
    // through, everything else is min-max scaled with clamping.
    CHECK(fz.features.minCoeff() >= 0.0);
    CHECK(fz.features.maxCoeff() <= 1.0);
  }
}

TEST_CASE("the pair split is a stratified partition with held-out flags") {
  PipelineConfig config = small_config();
  config.ablation = Ablation::GcOnly;  // cheapest featurization
  const TrainingFeaturization fz = featurize_for_training(small_dataset(), config);

  const int n = static_cast<int>(fz.bundle.pairs.size());
  std::vector<int> all = fz.train_rows;
  all.insert(all.end(), fz.test_rows.begin(), fz.test_rows.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expected(static_cast<std::size_t>(n));
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(all == expected);
  CHECK(std::is_sorted(fz.train_rows.begin(), fz.train_rows.end()));
  CHECK(std::is_sorted(fz.test_rows.begin(), fz.test_rows.end()));

  for (int r : fz.train_rows) CHECK(!fz.bundle.pairs[static_cast<std::size_t>(r)].held_out);
  for (int r : fz.test_rows) CHECK(fz.bundle.pairs[static_cast<std::size_t>(r)].held_out);

  // Pairs are canonical and sorted; labels match the label set.
  const auto truth = small_dataset().label_pairs();
  int positives = 0;
  for (std::size_t i = 0; i < fz.bundle.pairs.size(); ++i) {
    const PairRecord& record = fz.bundle.pairs[i];
    CHECK(record.a < record.b);
    if (i > 0)
      CHECK(std::pair(fz.bundle.pairs[i - 1].a, fz.bundle.pairs[i - 1].b) <
            std::pair(record.a, record.b));
    CHECK(record.label == (truth.count({record.a, record.b}) ? 1 : 0));
    positives += record.label;
  }
  REQUIRE(positives >= 2);

  // Per-class train share is floor(train_fraction * count), clamped to keep
  // at least one pair on each side.
  int train_pos = 0;
  for (int r : fz.train_rows) train_pos += fz.bundle.pairs[static_cast<std::size_t>(r)].label;
  const int expected_train_pos = std::clamp(
      static_cast<int>(0.8 * static_cast<double>(positives)), 1, positives - 1);
  CHECK(train_pos == expected_train_pos);
  const int negatives = n - positives;
  const int train_neg = static_cast<int>(fz.train_rows.size()) - train_pos;
  CHECK(train_neg ==
        std::clamp(static_cast<int>(0.8 * static_cast<double>(negatives)), 1, negatives - 1));
}

TEST_CASE("trained bundles predict deterministically in canonical order") {
  PipelineConfig config = small_config();
  const ModelBundle bundle = train_pipeline(small_dataset(), config);
  CHECK(!bundle.cascade.levels.empty());
  CHECK(bundle.seed == config.seed);

  // Fusion bundles store one embedding row per account, in sorted id order.
  REQUIRE(bundle.account_order.size() == small_dataset().accounts.size());
  CHECK(std::is_sorted(bundle.account_order.begin(), bundle.account_order.end()));
  CHECK(bundle.wgcca.shared_embedding.rows() ==
        static_cast<Eigen::Index>(bundle.account_order.size()));
  for (int i = 0; i < static_cast<int>(bundle.account_order.size()); i += 37)
    CHECK(bundle.trained_row(bundle.account_order[static_cast<std::size_t>(i)]) == i);
  CHECK(bundle.trained_row("no-such-account") == -1);

  const auto first = predict_pipeline(bundle, small_dataset());
  const auto second = predict_pipeline(bundle, small_dataset());
  REQUIRE(!first.empty());
  REQUIRE(first.size() == second.size());
  CHECK(first.size() == bundle.pairs.size());  // same data, same graph, same pairs
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].a < first[i].b);
    if (i > 0) CHECK(std::pair(first[i - 1].a, first[i - 1].b) < std::pair(first[i].a, first[i].b));
    CHECK(first[i].clone_probability == second[i].clone_probability);  // bitwise
    CHECK(first[i].clone_probability >= 0.0);
    CHECK(first[i].clone_probability <= 1.0);
    CHECK(first[i].label == (first[i].clone_probability > 0.5 ? 1 : 0));
  }
}

TEST_CASE("held-out evaluation matches an independent recount") {
  PipelineConfig config = small_config();
  const ModelBundle bundle = train_pipeline(small_dataset(), config);
  const EvaluationReport report = evaluate_bundle_holdout(bundle, small_dataset());

  std::set<std::pair<std::string, std::string>> held;
  std::set<std::pair<std::string, std::string>> held_truth;
  for (const PairRecord& record : bundle.pairs) {
    if (!record.held_out) continue;
    held.emplace(record.a, record.b);
    if (record.label == 1) held_truth.emplace(record.a, record.b);
  }
  REQUIRE(!held.empty());

  long long tp = 0, fp = 0, tn = 0;
  for (const PairPrediction& p : predict_pipeline(bundle, small_dataset())) {
    if (!held.count({p.a, p.b})) continue;
    const bool positive = p.clone_probability > 0.5;
    const bool truth = held_truth.count({p.a, p.b}) > 0;
    if (positive && truth) ++tp;
    if (positive && !truth) ++fp;
    if (!positive && !truth) ++tn;
  }
  CHECK(report.tp == tp);
  CHECK(report.fp == fp);
  CHECK(report.tn == tn);
  CHECK(report.fn == static_cast<long long>(held_truth.size()) - tp);

  ModelBundle no_holdout = bundle;
  for (PairRecord& record : no_holdout.pairs) record.held_out = false;
  CHECK_THROWS_WITH_AS(evaluate_bundle_holdout(no_holdout, small_dataset()),
                       "bundle records no held-out pairs", std::invalid_argument);
}

TEST_CASE("unseen accounts are embedded inductively at prediction time") {
  PipelineConfig config = small_config();
  const ModelBundle bundle = train_pipeline(small_dataset(), config);

  Dataset extended = small_dataset();
  AccountProfile newcomer = extended.accounts[0];
  newcomer.id = "Z9999";  // sorts after every trained id
  newcomer.posts = {"fresh account, no history"};
  extended.accounts.push_back(newcomer);
  extended.labels.clear();

  CHECK(bundle.trained_row("Z9999") == -1);
  const auto predictions = predict_pipeline(bundle, extended);
  bool saw_newcomer = false;
  for (const PairPrediction& p : predictions) {
    if (p.a == extended.accounts[0].id && p.b == "Z9999") {
      saw_newcomer = true;
      // Identical names make this pair an easy candidate.
      CHECK(p.clone_probability >= 0.0);
      CHECK(p.clone_probability <= 1.0);
    }
  }
  CHECK(saw_newcomer);
}

TEST_CASE("gc-only bundles skip fusion state entirely") {
  PipelineConfig config = small_config();
  config.ablation = Ablation::GcOnly;
  const ModelBundle bundle = train_pipeline(small_dataset(), config);
  CHECK(bundle.account_order.empty());
  CHECK(bundle.wgcca.shared_embedding.rows() == 0);
  const auto predictions = predict_pipeline(bundle, small_dataset());
  CHECK(predictions.size() == bundle.pairs.size());
  const EvaluationReport report = evaluate_bundle_holdout(bundle, small_dataset());
  CHECK(report.tp + report.fp + report.fn + report.tn > 0);
}

TEST_CASE("external post embeddings are honored end to end") {
  TempDir dir("external");
  const fs::path good = dir.path / "vectors.txt";
  write_embeddings_file(good, small_dataset(), 8);

  PipelineConfig config = small_config();
  config.external_embeddings_path = good.string();
  const ModelBundle bundle = train_pipeline(small_dataset(), config);
  CHECK(bundle.external_embeddings);
  CHECK(bundle.post_embedding_dim == 8);  // dimension comes from the file

  // Prediction requires the file again.
  CHECK_THROWS_WITH_AS(predict_pipeline(bundle, small_dataset()),
                       "model was trained with external post embeddings; an embeddings file is "
                       "required",
                       std::runtime_error);
  const auto predictions = predict_pipeline(bundle, small_dataset(), good.string());
  CHECK(predictions.size() == bundle.pairs.size());

  // A file with the wrong width is rejected.
  const fs::path narrow = dir.path / "narrow.txt";
  write_embeddings_file(narrow, small_dataset(), 4);
  CHECK_THROWS_AS(predict_pipeline(bundle, small_dataset(), narrow.string()),
                  std::runtime_error);

  // A file missing an account is rejected at training time.
  {
    Dataset trimmed = small_dataset();
    std::ofstream out(dir.path / "partial.txt");
    for (std::size_t i = 1; i < trimmed.accounts.size(); ++i) {
      out << trimmed.accounts[i].id;
      for (int k = 0; k < 8; ++k) out << ' ' << 0.5;
      out << '\n';
    }
  }
  PipelineConfig partial = config;
  partial.external_embeddings_path = (dir.path / "partial.txt").string();
  CHECK_THROWS_AS(train_pipeline(small_dataset(), partial), std::runtime_error);
}

TEST_CASE("configuration and data problems raise specific errors") {
  PipelineConfig config = small_config();
  config.ablation = Ablation::GcOnly;

  Dataset unlabeled = small_dataset();
  unlabeled.labels.clear();
  CHECK_THROWS_WITH_AS(train_pipeline(unlabeled, config), "dataset has no labels",
                       std::invalid_argument);

  PipelineConfig bad = config;
  bad.wgcca_weights = {0.5, 0.5, 0.5};
  CHECK_THROWS_WITH_AS(train_pipeline(small_dataset(), bad),
                       "fusion weights must list 4 views: post, follower, friend, profile",
                       std::invalid_argument);
  bad = config;
  bad.train_fraction = 1.0;
  CHECK_THROWS_AS(train_pipeline(small_dataset(), bad), std::invalid_argument);
  bad = config;
  bad.post_embedding_dim = 0;
  CHECK_THROWS_AS(train_pipeline(small_dataset(), bad), std::invalid_argument);
  bad = config;
  bad.latent_dim = 0;
  CHECK_THROWS_AS(train_pipeline(small_dataset(), bad), std::invalid_argument);

  // No candidate edges at all.
  const Dataset disjoint =
      tiny_dataset({"alpha zz", "broom qq", "cactus rr"}, {{"t1", "t2"}});
  CHECK_THROWS_WITH_AS(train_pipeline(disjoint, config),
                       "candidate graph has no edges; lower the threshold", std::runtime_error);

  // Edges exist but never the labeled pair.
  const Dataset missed =
      tiny_dataset({"martha stone", "martha stonee", "zzz qqq"}, {{"t1", "t3"}});
  CHECK_THROWS_WITH_AS(train_pipeline(missed, config),
                       "candidate graph recovered none of the labeled pairs; lower the threshold",
                       std::runtime_error);

  // Only the labeled pair is a candidate: nothing negative to learn from.
  const Dataset positive_only =
      tiny_dataset({"martha stone", "martha stonee", "zzz qqq"}, {{"t1", "t2"}});
  CHECK_THROWS_WITH_AS(train_pipeline(positive_only, config),
                       "candidate graph produced no negative pairs; raise the threshold",
                       std::runtime_error);

  CHECK_THROWS_WITH_AS(predict_pipeline(ModelBundle{}, small_dataset()),
                       "bundle holds no trained cascade", std::invalid_argument);
}

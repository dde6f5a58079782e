#include <doctest.h>

#include "helpers.hpp"
#include "ncdd/evaluation.hpp"
#include "oracles.hpp"

using namespace ncdd;

TEST_CASE("vectorize_upper stacks the strict upper triangle row-major") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1.5, -2.0, 1.5, 0, 0.25, -2.0, 0.25, 0;
  const Eigen::VectorXd v = vectorize_upper(SimilarityMatrix{m});
  REQUIRE(v.size() == 3);
  CHECK(v(0) == 1.5);
  CHECK(v(1) == -2.0);
  CHECK(v(2) == 0.25);

  Eigen::MatrixXd two = Eigen::MatrixXd::Zero(2, 2);
  CHECK(vectorize_upper(SimilarityMatrix{two}).size() == 1);
  Eigen::MatrixXd five = Eigen::MatrixXd::Zero(5, 5);
  CHECK(vectorize_upper(SimilarityMatrix{five}).size() == 10);
}

TEST_CASE("vectorize_upper rejects asymmetric matrices") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0 + 1e-6;
  try {
    vectorize_upper(SimilarityMatrix{m});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kAsymmetry);
  }
}

TEST_CASE("vectorize_upper round-trips symmetric zero-diagonal matrices") {
  Rng rng(1);
  const int n = 6;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) m(u, v) = m(v, u) = rng.uniform(-1.0, 1.0);
  const Eigen::VectorXd vec = vectorize_upper(SimilarityMatrix{m});
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(n, n);
  int i = 0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) back(u, v) = back(v, u) = vec(i++);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

std::vector<FeatureVector> threshold_dataset(int count, Rng& rng) {
  // Class 1 iff feature 0 > 0.5; three nuisance features.
  std::vector<FeatureVector> data;
  for (int i = 0; i < count; ++i) {
    FeatureVector fv;
    fv.values = helpers::random_matrix(4, 1, rng, 0.0, 1.0).col(0);
    fv.label = fv.values(0) > 0.5 ? 1 : 0;
    data.push_back(std::move(fv));
  }
  return data;
}

}  // namespace

TEST_CASE("forest separates a threshold rule") {
  Rng rng(2);
  const std::vector<FeatureVector> data = threshold_dataset(200, rng);
  ForestConfig config;
  config.n_trees = 50;
  config.seed = RngSeed{9};
  const RandomForest forest = RandomForest::train(data, config);
  int correct = 0;
  for (const FeatureVector& fv : data)
    correct += (forest.score(fv.values) > 0.5 ? 1 : 0) == fv.label;
  CHECK(static_cast<double>(correct) / data.size() >= 0.99);
}

TEST_CASE("forest training requires both classes") {
  Rng rng(3);
  std::vector<FeatureVector> data = threshold_dataset(50, rng);
  for (FeatureVector& fv : data) fv.label = 0;
  try {
    RandomForest::train(data, ForestConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingleClass);
  }
}

TEST_CASE("duplicating the training set barely changes scores") {
  Rng rng(4);
  const std::vector<FeatureVector> data = threshold_dataset(120, rng);
  std::vector<FeatureVector> doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  ForestConfig config;
  config.n_trees = 100;
  config.seed = RngSeed{11};
  const RandomForest base = RandomForest::train(data, config);
  const RandomForest dup = RandomForest::train(doubled, config);
  const std::vector<FeatureVector> probe = threshold_dataset(100, rng);
  double max_diff = 0.0;
  for (const FeatureVector& fv : probe)
    max_diff = std::max(max_diff, std::abs(base.score(fv.values) - dup.score(fv.values)));
  CHECK(max_diff < 0.25);
  // and the seeded run itself is reproducible
  const RandomForest again = RandomForest::train(data, config);
  for (const FeatureVector& fv : probe) CHECK(again.score(fv.values) == base.score(fv.values));
}

TEST_CASE("constant features are never chosen for splits") {
  Rng rng(5);
  std::vector<FeatureVector> data = threshold_dataset(100, rng);
  for (FeatureVector& fv : data) fv.values(2) = 7.0;  // constant nuisance feature
  ForestConfig config;
  config.n_trees = 30;
  config.features_per_split = 4;  // always include the constant feature
  config.seed = RngSeed{13};
  const RandomForest forest = RandomForest::train(data, config);
  // If feature 2 were ever used, scoring with a wildly different value there
  // would change some prediction.
  double max_diff = 0.0;
  for (const FeatureVector& fv : data) {
    Eigen::VectorXd poked = fv.values;
    poked(2) = -1e6;
    max_diff = std::max(max_diff, std::abs(forest.score(poked) - forest.score(fv.values)));
  }
  CHECK(max_diff == 0.0);
}

TEST_CASE("forest scores are the mean of per-tree votes") {
  Rng rng(6);
  const std::vector<FeatureVector> data = threshold_dataset(80, rng);
  ForestConfig config;
  config.n_trees = 17;
  config.seed = RngSeed{15};
  const RandomForest forest = RandomForest::train(data, config);
  const Eigen::VectorXd probe = helpers::random_matrix(4, 1, rng, 0.0, 1.0).col(0);
  double acc = 0.0;
  for (int t = 0; t < forest.n_trees(); ++t) acc += forest.tree_vote(t, probe);
  CHECK(forest.score(probe) == doctest::Approx(acc / 17.0));

  FeatureVector all_pos;
  all_pos.values = Eigen::VectorXd::Constant(4, 0.9);
  // On cleanly separated data every tree votes the same way at the extremes.
  CHECK(forest.score(all_pos.values) == doctest::Approx(1.0));
  CHECK(forest.score(Eigen::VectorXd::Constant(4, 0.0)) == doctest::Approx(0.0));
}

TEST_CASE("forest rejects mismatched feature lengths") {
  Rng rng(7);
  const std::vector<FeatureVector> data = threshold_dataset(40, rng);
  const RandomForest forest = RandomForest::train(data, ForestConfig{.n_trees = 5});
  CHECK_THROWS_AS(forest.score(Eigen::VectorXd::Zero(7)), Error);
}

TEST_CASE("auc on the worked example") {
  CHECK(auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == doctest::Approx(0.75));
}

TEST_CASE("auc extremes and ties") {
  CHECK(auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
  CHECK(auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
  try {
    auc({0.5, 0.6}, {1, 1});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingleClass);
  }
}

TEST_CASE("auc equals the brute-force pair statistic including ties") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_below(20));
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<int> labels(static_cast<std::size_t>(n));
    bool has0 = false, has1 = false;
    for (int i = 0; i < n; ++i) {
      // Coarse grid to force ties.
      scores[static_cast<std::size_t>(i)] = std::round(rng.uniform01() * 4.0) / 4.0;
      labels[static_cast<std::size_t>(i)] = rng.uniform01() < 0.5 ? 0 : 1;
      (labels[static_cast<std::size_t>(i)] ? has1 : has0) = true;
    }
    if (!has0 || !has1) continue;
    CHECK(auc(scores, labels) == oracles::brute_auc(scores, labels));
  }
}

TEST_CASE("auc complement and monotone-transform invariance") {
  Rng rng(9);
  std::vector<double> scores;
  std::vector<int> labels, flipped;
  for (int i = 0; i < 30; ++i) {
    scores.push_back(rng.uniform01() + i * 1e-6);  // tie-free
    labels.push_back(rng.uniform01() < 0.4 ? 0 : 1);
    flipped.push_back(1 - labels.back());
  }
  CHECK(auc(scores, labels) + auc(scores, flipped) == doctest::Approx(1.0));

  std::vector<double> transformed;
  for (double s : scores) transformed.push_back(std::exp(3.0 * s) - 1.0);
  CHECK(auc(transformed, labels) == doctest::Approx(auc(scores, labels)));
}

TEST_CASE("chronological split takes the first half of each class") {
  // 4 class-0 and 2 class-1 samples.
  const std::vector<std::int64_t> times = {10, 20, 30, 40, 15, 25};
  const std::vector<int> labels = {0, 0, 0, 0, 1, 1};
  const auto [train, test] = chronological_split(times, labels);
  CHECK(train == std::vector<std::size_t>{0, 4, 1});  // first two 0s, first 1
  CHECK(test == std::vector<std::size_t>{5, 2, 3});
}

TEST_CASE("chronological split uses the ceiling for odd counts") {
  const std::vector<std::int64_t> times = {1, 2, 3, 4, 5};
  const std::vector<int> labels = {0, 0, 0, 0, 0};
  // Single-class split is fine; classification later is what needs both.
  const auto [train, test] = chronological_split(times, labels);
  CHECK(train.size() == 3);
  CHECK(test.size() == 2);
}

TEST_CASE("chronological split ignores input order") {
  const std::vector<std::int64_t> sorted_times = {1, 2, 3, 4, 5, 6};
  const std::vector<int> sorted_labels = {0, 1, 0, 1, 0, 1};
  const auto [train_a, test_a] = chronological_split(sorted_times, sorted_labels);

  // Same points presented shuffled; identify by timestamp.
  const std::vector<std::int64_t> shuffled_times = {6, 3, 1, 5, 2, 4};
  const std::vector<int> shuffled_labels = {1, 0, 0, 0, 1, 1};
  const auto [train_b, test_b] = chronological_split(shuffled_times, shuffled_labels);

  const auto times_of = [](const std::vector<std::size_t>& idx,
                           const std::vector<std::int64_t>& t) {
    std::vector<std::int64_t> out;
    for (std::size_t i : idx) out.push_back(t[i]);
    return out;
  };
  CHECK(times_of(train_a, sorted_times) == times_of(train_b, shuffled_times));
  CHECK(times_of(test_a, sorted_times) == times_of(test_b, shuffled_times));
}

TEST_CASE("majority subsampling enforces the ratio deterministically") {
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(0);
  for (int i = 0; i < 5; ++i) labels.push_back(1);

  Rng rng_a(123), rng_b(123);
  const auto kept_a = subsample_majority(labels, 10.0, rng_a);
  const auto kept_b = subsample_majority(labels, 10.0, rng_b);
  CHECK(kept_a == kept_b);

  int zeros = 0, ones = 0;
  for (std::size_t i : kept_a) (labels[i] == 0 ? zeros : ones)++;
  CHECK(zeros == 50);
  CHECK(ones == 5);
}

TEST_CASE("majority subsampling keeps balanced data untouched") {
  std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  Rng rng(5);
  const auto kept = subsample_majority(labels, 10.0, rng);
  CHECK(kept == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
}

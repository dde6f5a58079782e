#include <doctest.h>

#include "helpers.hpp"
#include "ncdd/topology.hpp"
#include "oracles.hpp"

using namespace ncdd;

TEST_CASE("sample covariance of identical rows") {
  GraphSignalSample sample;
  sample.values.resize(2, 2);
  sample.values << 1, -1, 1, -1;
  const Eigen::MatrixXd p = sample_covariance(sample);
  CHECK(p(0, 0) == doctest::Approx(2.0));
  CHECK(p(0, 1) == doctest::Approx(2.0));
  CHECK(p(1, 0) == doctest::Approx(2.0));
  CHECK(p(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("sample covariance zeroes rows of constant signals") {
  GraphSignalSample sample;
  sample.values.resize(3, 5);
  Rng rng(3);
  sample.values = helpers::random_matrix(3, 5, rng);
  sample.values.row(1).setConstant(4.2);
  const Eigen::MatrixXd p = sample_covariance(sample);
  for (int v = 0; v < 3; ++v) {
    CHECK(p(1, v) == doctest::Approx(0.0));
    CHECK(p(v, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("sample covariance matches the loop oracle") {
  Rng rng(11);
  const GraphSignalSample sample = helpers::random_sample(3, 10, rng);
  const Eigen::MatrixXd p = sample_covariance(sample);
  const Eigen::MatrixXd q = oracles::loop_covariance(sample.values);
  CHECK((p - q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sample covariance is invariant to row offsets") {
  Rng rng(12);
  GraphSignalSample sample = helpers::random_sample(4, 16, rng);
  const Eigen::MatrixXd before = sample_covariance(sample);
  sample.values.row(2).array() += 17.5;
  const Eigen::MatrixXd after = sample_covariance(sample);
  CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("average precision of a 2*Id covariance sample") {
  // Orthogonal centered rows with variance exactly 2.
  GraphSignalSample sample;
  sample.values.resize(2, 3);
  const double a = std::sqrt(2.0);
  const double b = std::sqrt(2.0 / 3.0);
  sample.values << a, 0, -a, b, -2 * b, b;
  TopologyConfig config;
  config.regularization_epsilon = 0.0;
  const Eigen::MatrixXd avg = average_precision_matrix({sample}, config);
  CHECK((avg - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("average precision rejects T <= N") {
  Rng rng(5);
  const GraphSignalSample sample = helpers::random_sample(4, 4, rng);
  try {
    average_precision_matrix({sample}, TopologyConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPreconditionViolated);
  }
}

TEST_CASE("average precision matches the cofactor-inverse oracle") {
  Rng rng(21);
  std::vector<GraphSignalSample> samples;
  samples.push_back(helpers::random_sample(3, 12, rng));
  samples.push_back(helpers::random_sample(3, 12, rng));
  TopologyConfig config;
  config.regularization_epsilon = 0.0;
  const Eigen::MatrixXd avg = average_precision_matrix(samples, config);

  Eigen::Matrix3d expected = Eigen::Matrix3d::Zero();
  for (const auto& s : samples)
    expected += oracles::inverse3_cofactor(oracles::loop_covariance(s.values));
  expected /= 2.0;
  CHECK((avg - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("singular covariance is reported when unregularized") {
  GraphSignalSample sample;
  sample.values.resize(2, 4);
  sample.values << 1, 2, 3, 4, 2, 4, 6, 8;  // rank one
  TopologyConfig config;
  config.regularization_epsilon = 0.0;
  try {
    average_precision_matrix({sample}, config);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularCovariance);
  }
}

TEST_CASE("build_adjacency extremes") {
  Rng rng(31);
  const Eigen::MatrixXd m = helpers::random_matrix(5, 5, rng);
  const Topology all = build_adjacency(m, 0.0);
  CHECK(all.adjacency().sum() == 25);
  const Topology none = build_adjacency(m, 1.0);
  CHECK(none.adjacency().sum() == 5);
}

TEST_CASE("build_adjacency keeps values at or above the quantile") {
  Eigen::MatrixXd m(3, 3);
  m << 9, 5, 3, 5, 9, 1, 3, 1, 9;  // off-diagonal values {5,5,3,3,1,1}
  const Topology topo = build_adjacency(m, 1.0 / 3.0);

  // Sorting oracle: one third of the unordered off-diagonal values lie below
  // eta, so eta = 3 and pairs valued 3 and 5 stay.
  CHECK(topo.adjacency()(0, 1) == 1);
  CHECK(topo.adjacency()(0, 2) == 1);
  CHECK(topo.adjacency()(1, 2) == 0);
}

TEST_CASE("build_adjacency output is symmetric with unit diagonal for any input") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(6));
    const Eigen::MatrixXd m = helpers::random_matrix(n, n, rng);  // deliberately asymmetric
    const Topology topo = build_adjacency(m, rng.uniform01());
    CHECK(topo.adjacency() == topo.adjacency().transpose().eval());
    for (int u = 0; u < n; ++u) CHECK(topo.adjacency()(u, u) == 1);
  }
}

TEST_CASE("increasing eta_ratio never adds an edge") {
  Rng rng(51);
  const Eigen::MatrixXd m = helpers::random_matrix(6, 6, rng);
  Eigen::MatrixXi prev = build_adjacency(m, 0.0).adjacency();
  for (double ratio : {0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0}) {
    const Eigen::MatrixXi next = build_adjacency(m, ratio).adjacency();
    CHECK(((prev - next).array() >= 0).all());
    prev = next;
  }
}

TEST_CASE("coupled anti-correlated pair is recovered at eta_ratio one half") {
  // Nodes 0 and 1 anti-correlated, node 2 independent: the (0,1) entry of the
  // precision matrix is large and positive, the entries involving node 2 hover
  // near zero, so only the coupled edge survives.
  Rng rng(61);
  std::vector<GraphSignalSample> samples;
  for (int i = 0; i < 8; ++i) {
    GraphSignalSample s;
    s.values.resize(3, 40);
    for (int t = 0; t < 40; ++t) {
      const double shared = rng.normal();
      s.values(0, t) = shared + 0.3 * rng.normal();
      s.values(1, t) = -shared + 0.3 * rng.normal();
      s.values(2, t) = rng.normal();
    }
    samples.push_back(std::move(s));
  }
  TopologyConfig config;
  config.eta_ratio = 0.5;
  const Topology topo = infer_topology(samples, config);
  CHECK(topo.adjacency()(0, 1) == 1);
  CHECK(topo.adjacency()(0, 2) == 0);
  CHECK(topo.adjacency()(1, 2) == 0);
}

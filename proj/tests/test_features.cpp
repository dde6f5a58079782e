#include <doctest.h>

#include "helpers.hpp"
#include "ncdd/features.hpp"
#include "oracles.hpp"

using namespace ncdd;

TEST_CASE("time-domain initial features are the signal itself") {
  Rng rng(1);
  const GraphSignalSample sample = helpers::random_sample(4, 9, rng);
  const Eigen::MatrixXcd features = initial_features_time(sample);
  CHECK(features.real() == sample.values);
  CHECK(features.imag().isZero(0.0));

  GraphSignalSample zero;
  zero.values = Eigen::MatrixXd::Zero(3, 5);
  CHECK(initial_features_time(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partition_windows splits into disjoint equal windows") {
  Rng rng(2);
  const GraphSignalSample sample = helpers::random_sample(2, 6, rng);
  const WindowTensor windows = partition_windows(sample, 3);
  REQUIRE(windows.size() == 2);
  REQUIRE(windows[0].rows() == 3);
  REQUIRE(windows[0].cols() == 2);
  for (int u = 0; u < 2; ++u)
    for (int w = 0; w < 3; ++w)
      for (int i = 0; i < 2; ++i) CHECK(windows[u](w, i) == sample.values(u, 2 * w + i));
}

TEST_CASE("partition_windows drops the trailing remainder") {
  Rng rng(3);
  const GraphSignalSample sample = helpers::random_sample(1, 7, rng);
  const WindowTensor windows = partition_windows(sample, 3);
  REQUIRE(windows[0].cols() == 2);  // L = floor(7/3)
  CHECK(windows[0](2, 1) == sample.values(0, 5));  // column 6 discarded

  const GraphSignalSample big = helpers::random_sample(1, 640, rng);
  const WindowTensor w640 = partition_windows(big, 3);
  CHECK(w640[0].cols() == 213);
  CHECK(3 * 213 == 639);  // one trailing column dropped
}

TEST_CASE("dft of a constant window concentrates in the DC bin") {
  WindowTensor windows(1);
  windows[0] = Eigen::MatrixXd::Constant(1, 8, 3.25);
  const SpectrumTensor spectra = dft_windows(windows, 5);
  CHECK(std::abs(spectra[0](0, 0) - std::complex<double>(3.25 * 8, 0.0)) < 1e-10);
  for (int k = 1; k < 5; ++k) CHECK(std::abs(spectra[0](0, k)) < 1e-10);
}

TEST_CASE("dft of a pure cosine peaks at its bin") {
  const int l = 16;
  WindowTensor windows(1);
  windows[0].resize(1, l);
  const int k0 = 3;
  for (int n = 0; n < l; ++n)
    windows[0](0, n) = std::cos(2.0 * std::numbers::pi * k0 * n / static_cast<double>(l));
  const SpectrumTensor spectra = dft_windows(windows, l / 2 + 1);
  CHECK(std::abs(spectra[0](0, k0)) == doctest::Approx(l / 2.0).epsilon(1e-9));
  for (int k = 0; k <= l / 2; ++k) {
    if (k == k0) continue;
    CHECK(std::abs(spectra[0](0, k)) < 1e-9);
  }
}

TEST_CASE("dft matches the direct-sum oracle") {
  Rng rng(4);
  const GraphSignalSample sample = helpers::random_sample(3, 16, rng);
  const WindowTensor windows = partition_windows(sample, 2);
  const SpectrumTensor spectra = dft_windows(windows, 5);
  for (int u = 0; u < 3; ++u) {
    for (int t = 0; t < 2; ++t) {
      const Eigen::VectorXcd expected = oracles::naive_dft(windows[u].row(t).transpose(), 5);
      for (int k = 0; k < 5; ++k) CHECK(std::abs(spectra[u](t, k) - expected(k)) < 1e-12);
    }
  }
}

TEST_CASE("dft rejects more bins than the window length") {
  WindowTensor windows(1);
  windows[0] = Eigen::MatrixXd::Zero(1, 8);
  try {
    dft_windows(windows, 9);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
  }
}

TEST_CASE("Parseval holds over the full spectrum") {
  Rng rng(5);
  const GraphSignalSample sample = helpers::random_sample(2, 24, rng);
  const WindowTensor windows = partition_windows(sample, 2);
  const int l = static_cast<int>(windows[0].cols());
  const SpectrumTensor spectra = dft_windows(windows, l);  // W = L, full spectrum
  for (int u = 0; u < 2; ++u) {
    for (int t = 0; t < 2; ++t) {
      const double freq_energy = spectra[u].row(t).squaredNorm();
      const double time_energy = windows[u].row(t).squaredNorm();
      CHECK(freq_energy == doctest::Approx(l * time_energy).epsilon(1e-10));
    }
  }
}

TEST_CASE("vectorize_fd concatenates columns") {
  SpectrumTensor spectra(1);
  spectra[0].resize(2, 2);
  spectra[0](0, 0) = {1, 0};  // a
  spectra[0](0, 1) = {2, 0};  // b
  spectra[0](1, 0) = {3, 0};  // c
  spectra[0](1, 1) = {4, 0};  // d
  const Eigen::MatrixXcd flat = vectorize_fd(spectra);
  REQUIRE(flat.cols() == 4);
  CHECK(flat(0, 0) == std::complex<double>(1, 0));
  CHECK(flat(0, 1) == std::complex<double>(3, 0));
  CHECK(flat(0, 2) == std::complex<double>(2, 0));
  CHECK(flat(0, 3) == std::complex<double>(4, 0));
}

TEST_CASE("devectorize inverts vectorize") {
  Rng rng(6);
  SpectrumTensor spectra(1);
  spectra[0].resize(3, 4);
  spectra[0].real() = helpers::random_matrix(3, 4, rng);
  spectra[0].imag() = helpers::random_matrix(3, 4, rng);
  const Eigen::MatrixXcd flat = vectorize_fd(spectra);
  const Eigen::MatrixXcd back = devectorize_node(flat.row(0).transpose(), 3, 4);
  CHECK((back - spectra[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frequency config shape arithmetic at T=640, 3 windows, 79 bins") {
  const FeatureConfig config = FeatureConfig::frequency_domain(3, 79, 256.0, 640);
  CHECK(config.inner_window_length(640) == 213);
  CHECK(config.d0(640) == 237);
  REQUIRE(config.bin_frequencies.size() == 79);
  CHECK(config.bin_frequencies[0] == 0.0);
  CHECK(config.bin_frequencies[1] == doctest::Approx(256.0 / 213.0));
  CHECK(config.bin_frequencies[78] < 100.0);

  Rng rng(7);
  const GraphSignalSample sample = helpers::random_sample(2, 640, rng);
  const Eigen::MatrixXcd features = initial_features(sample, config);
  CHECK(features.cols() == 237);
}

TEST_CASE("frequency config rejects out-of-range bin counts") {
  CHECK_THROWS_AS(FeatureConfig::frequency_domain(3, 108, 256.0, 640), Error);
  CHECK_NOTHROW(FeatureConfig::frequency_domain(3, 107, 256.0, 640));
}

TEST_CASE("frequency features are linear in the signal") {
  Rng rng(8);
  const FeatureConfig config = FeatureConfig::frequency_domain(2, 4, 64.0, 20);
  GraphSignalSample x = helpers::random_sample(3, 20, rng);
  GraphSignalSample y = helpers::random_sample(3, 20, rng);
  const double a = 1.7, b = -0.6;
  GraphSignalSample mix;
  mix.values = a * x.values + b * y.values;
  const Eigen::MatrixXcd fx = initial_features(x, config);
  const Eigen::MatrixXcd fy = initial_features(y, config);
  const Eigen::MatrixXcd fmix = initial_features(mix, config);
  CHECK((fmix - (a * fx + b * fy)).cwiseAbs().maxCoeff() < 1e-10);
}

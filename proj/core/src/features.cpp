#include "ncdd/features.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ncdd/error.hpp"

namespace ncdd {

const char* to_string(Domain domain) {
  return domain == Domain::kTime ? "time" : "frequency";
}

FeatureConfig FeatureConfig::time_domain() {
  FeatureConfig config;
  config.domain = Domain::kTime;
  return config;
}

FeatureConfig FeatureConfig::frequency_domain(int inner_windows, int bins,
                                              double sampling_rate_hz, int t_len) {
  if (inner_windows < 1) fail(ErrorCode::kConfigError, "inner_windows must be positive");
  if (bins < 1) fail(ErrorCode::kConfigError, "bins must be positive");
  if (sampling_rate_hz <= 0.0) fail(ErrorCode::kConfigError, "sampling rate must be positive");
  if (t_len < inner_windows)
    fail(ErrorCode::kConfigError, "window length shorter than the number of inner windows");
  const int l = t_len / inner_windows;
  if (bins > l / 2 + 1)
    fail(ErrorCode::kConfigError, "bins = " + std::to_string(bins) + " exceeds floor(L/2)+1 = " +
                                      std::to_string(l / 2 + 1) + " for L = " + std::to_string(l));
  FeatureConfig config;
  config.domain = Domain::kFrequency;
  config.inner_windows = inner_windows;
  config.bins = bins;
  config.sampling_rate_hz = sampling_rate_hz;
  config.bin_frequencies.resize(bins);
  for (int w = 0; w < bins; ++w)
    config.bin_frequencies[w] = static_cast<double>(w) * sampling_rate_hz / static_cast<double>(l);
  return config;
}

int FeatureConfig::inner_window_length(int t_len) const {
  return domain == Domain::kTime ? t_len : t_len / inner_windows;
}

int FeatureConfig::d0(int t_len) const {
  return domain == Domain::kTime ? t_len : inner_windows * bins;
}

Eigen::MatrixXcd initial_features_time(const GraphSignalSample& sample) {
  Eigen::MatrixXcd features(sample.n_nodes(), sample.t_len());
  features.real() = sample.values;
  features.imag().setZero();
  return features;
}

WindowTensor partition_windows(const GraphSignalSample& sample, int inner_windows) {
  const int t = sample.t_len();
  if (inner_windows < 1) fail(ErrorCode::kConfigError, "inner_windows must be positive");
  if (t < inner_windows)
    fail(ErrorCode::kPreconditionViolated, "window length shorter than inner window count");
  const int l = t / inner_windows;
  WindowTensor windows(static_cast<std::size_t>(sample.n_nodes()));
  for (int u = 0; u < sample.n_nodes(); ++u) {
    Eigen::MatrixXd node(inner_windows, l);
    for (int w = 0; w < inner_windows; ++w) node.row(w) = sample.values.row(u).segment(w * l, l);
    windows[u] = std::move(node);
  }
  return windows;
}

SpectrumTensor dft_windows(const WindowTensor& windows, int bins) {
  if (windows.empty()) return {};
  const Eigen::Index l = windows[0].cols();
  const Eigen::Index t_inner = windows[0].rows();
  if (bins < 1 || bins > l)
    fail(ErrorCode::kConfigError,
         "bins = " + std::to_string(bins) + " out of range for window length " + std::to_string(l));

  // Twiddle table; exponent taken modulo L. Components within one ulp of zero
  // (the DC, Nyquist and quarter-period entries) are snapped to exact zeros so
  // real inputs get exactly real DC/Nyquist coefficients.
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(l));
  for (Eigen::Index m = 0; m < l; ++m) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(l);
    double re = std::cos(angle);
    double im = std::sin(angle);
    if (std::abs(re) < 1e-15) re = 0.0;
    if (std::abs(im) < 1e-15) im = 0.0;
    twiddle[static_cast<std::size_t>(m)] = {re, im};
  }

  SpectrumTensor spectra(windows.size());
  for (std::size_t u = 0; u < windows.size(); ++u) {
    Eigen::MatrixXcd node(t_inner, bins);
    for (Eigen::Index t = 0; t < t_inner; ++t) {
      for (Eigen::Index k = 0; k < bins; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index x = 0; x < l; ++x)
          acc += windows[u](t, x) * twiddle[static_cast<std::size_t>((k * x) % l)];
        node(t, k) = acc;
      }
    }
    spectra[u] = std::move(node);
  }
  return spectra;
}

Eigen::MatrixXcd vectorize_fd(const SpectrumTensor& spectra) {
  if (spectra.empty()) return {};
  const Eigen::Index t_inner = spectra[0].rows();
  const Eigen::Index bins = spectra[0].cols();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(spectra.size()), t_inner * bins);
  for (std::size_t u = 0; u < spectra.size(); ++u) {
    for (Eigen::Index w = 0; w < bins; ++w)
      for (Eigen::Index t = 0; t < t_inner; ++t)
        out(static_cast<Eigen::Index>(u), w * t_inner + t) = spectra[u](t, w);
  }
  return out;
}

Eigen::MatrixXcd devectorize_node(const Eigen::VectorXcd& flat, int inner_windows, int bins) {
  if (flat.size() != static_cast<Eigen::Index>(inner_windows) * bins)
    fail(ErrorCode::kDimensionError,
         "flat length " + std::to_string(flat.size()) + " != inner_windows*bins = " +
             std::to_string(inner_windows * bins));
  Eigen::MatrixXcd out(inner_windows, bins);
  for (int w = 0; w < bins; ++w)
    for (int t = 0; t < inner_windows; ++t) out(t, w) = flat(w * inner_windows + t);
  return out;
}

Eigen::MatrixXcd initial_features(const GraphSignalSample& sample, const FeatureConfig& config) {
  if (config.domain == Domain::kTime) return initial_features_time(sample);
  return vectorize_fd(dft_windows(partition_windows(sample, config.inner_windows), config.bins));
}

}  // namespace ncdd

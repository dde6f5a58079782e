#pragma once

#include <vector>

#include "ncdd/types.hpp"

namespace ncdd {

enum class Domain { kTime, kFrequency };

const char* to_string(Domain domain);

/// Per-node inner windows: tensor[u] is an inner_windows x L real matrix.
using WindowTensor = std::vector<Eigen::MatrixXd>;
/// Per-node spectra: tensor[u] is an inner_windows x W complex matrix.
using SpectrumTensor = std::vector<Eigen::MatrixXcd>;

/// How raw samples map to initial node features.
///
/// Time domain: the feature vector is the signal itself, D0 = T.
/// Frequency domain: the sample is cut into `inner_windows` disjoint windows
/// of length L = floor(T / inner_windows) (trailing remainder dropped), each
/// window is DFT'd and the first `bins` coefficients kept, and the
/// inner_windows x bins matrix is vectorized column-wise, D0 = inner_windows*bins.
struct FeatureConfig {
  Domain domain = Domain::kTime;
  int inner_windows = 0;                 // T~
  int bins = 0;                          // W
  double sampling_rate_hz = 0.0;
  std::vector<double> bin_frequencies;   // bin w at w*rate/L

  static FeatureConfig time_domain();

  /// Validates inner_windows*L <= t_len and bins <= floor(L/2)+1 and fills
  /// bin_frequencies. Throws ConfigError.
  static FeatureConfig frequency_domain(int inner_windows, int bins, double sampling_rate_hz,
                                        int t_len);

  int inner_window_length(int t_len) const;
  int d0(int t_len) const;
};

/// Identity feature map; imaginary parts are zero.
Eigen::MatrixXcd initial_features_time(const GraphSignalSample& sample);

/// Window t covers columns [t*L, (t+1)*L), L = floor(T / inner_windows).
WindowTensor partition_windows(const GraphSignalSample& sample, int inner_windows);

/// Per node and inner window, the length-L DFT X[k] = sum_n x[n] e^{-2pi i kn/L}
/// truncated to the first `bins` coefficients. Throws ConfigError if bins > L.
SpectrumTensor dft_windows(const WindowTensor& windows, int bins);

/// Column-wise vectorization: entry (t, w) of a node's spectrum lands at flat
/// position w*inner_windows + t. Result is N x (inner_windows*bins).
Eigen::MatrixXcd vectorize_fd(const SpectrumTensor& spectra);

/// Inverse of the vectorization for one node's flat vector.
Eigen::MatrixXcd devectorize_node(const Eigen::VectorXcd& flat, int inner_windows, int bins);

/// Dispatch on config.domain.
Eigen::MatrixXcd initial_features(const GraphSignalSample& sample, const FeatureConfig& config);

}  // namespace ncdd

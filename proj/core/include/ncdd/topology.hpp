#pragma once

#include <vector>

#include "ncdd/types.hpp"

namespace ncdd {

struct TopologyConfig {
  /// Target fraction of zero off-diagonal adjacency entries, in [0, 1].
  double eta_ratio = 0.5;
  /// Ridge added to each covariance before inversion, relative to trace/N.
  double regularization_epsilon = 1e-8;
};

/// Sample covariance P = (X - mean)(X - mean)^T / (T - 1), row means over all
/// T columns. Symmetric positive semidefinite.
Eigen::MatrixXd sample_covariance(const GraphSignalSample& sample);

/// Mean over samples of (P_i + eps*(trace/N)*I)^-1, summed in sample order.
/// Requires T > N for every sample (PreconditionViolated otherwise);
/// throws SingularCovariance if a regularized covariance is not invertible.
Eigen::MatrixXd average_precision_matrix(const std::vector<GraphSignalSample>& samples,
                                         const TopologyConfig& config);

/// Thresholds the symmetrized averaged precision matrix: eta is the
/// ceil(eta_ratio*M)-th smallest of the M = N(N-1)/2 off-diagonal values and
/// entries >= eta become edges. Diagonal is always 1.
Topology build_adjacency(const Eigen::MatrixXd& avg_precision, double eta_ratio);

/// average_precision_matrix followed by build_adjacency.
Topology infer_topology(const std::vector<GraphSignalSample>& samples, const TopologyConfig& config);

}  // namespace ncdd

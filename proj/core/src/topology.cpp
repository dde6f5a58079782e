#include "ncdd/topology.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "ncdd/error.hpp"

namespace ncdd {

Eigen::MatrixXd sample_covariance(const GraphSignalSample& sample) {
  const int t = sample.t_len();
  if (t < 2) fail(ErrorCode::kPreconditionViolated, "sample covariance needs T >= 2");
  if (!sample.values.allFinite())
    fail(ErrorCode::kNonFiniteValue, "sample contains a non-finite entry");
  Eigen::MatrixXd centered = sample.values;
  centered.colwise() -= sample.values.rowwise().mean();
  return centered * centered.transpose() / static_cast<double>(t - 1);
}

Eigen::MatrixXd average_precision_matrix(const std::vector<GraphSignalSample>& samples,
                                         const TopologyConfig& config) {
  if (samples.empty()) fail(ErrorCode::kPreconditionViolated, "no samples");
  const int n = samples[0].n_nodes();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const GraphSignalSample& sample : samples) {
    if (sample.n_nodes() != n) fail(ErrorCode::kDimensionMismatch, "inconsistent node counts");
    if (sample.t_len() <= n)
      fail(ErrorCode::kPreconditionViolated,
           "signal dimension T = " + std::to_string(sample.t_len()) +
               " must exceed the number of nodes N = " + std::to_string(n));
    Eigen::MatrixXd cov = sample_covariance(sample);
    const double ridge = config.regularization_epsilon * cov.trace() / static_cast<double>(n);
    cov.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::kSingularCovariance,
           "covariance of sample " + std::to_string(sample.sample_index) +
               " is not invertible after regularization");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    if (!inv.allFinite())
      fail(ErrorCode::kSingularCovariance,
           "non-finite inverse covariance for sample " + std::to_string(sample.sample_index));
    sum += inv;
  }
  return sum / static_cast<double>(samples.size());
}

Topology build_adjacency(const Eigen::MatrixXd& avg_precision, double eta_ratio) {
  if (avg_precision.rows() != avg_precision.cols() || avg_precision.rows() < 1)
    fail(ErrorCode::kDimensionMismatch, "precision matrix must be square");
  if (eta_ratio < 0.0 || eta_ratio > 1.0)
    fail(ErrorCode::kConfigError, "eta_ratio must be in [0, 1]");
  const int n = static_cast<int>(avg_precision.rows());
  const Eigen::MatrixXd sym = 0.5 * (avg_precision + avg_precision.transpose());

  std::vector<double> off;
  off.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) off.push_back(sym(u, v));
  std::sort(off.begin(), off.end());

  Eigen::MatrixXi adj = Eigen::MatrixXi::Identity(n, n);
  if (!off.empty()) {
    const auto m = off.size();
    const auto k = static_cast<std::size_t>(std::ceil(eta_ratio * static_cast<double>(m) - 1e-12));
    if (k < m) {
      const double eta = off[k];
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          if (sym(u, v) >= eta) {
            adj(u, v) = 1;
            adj(v, u) = 1;
          }
        }
      }
    }
  }
  return Topology::from_adjacency(adj);
}

Topology infer_topology(const std::vector<GraphSignalSample>& samples,
                        const TopologyConfig& config) {
  return build_adjacency(average_precision_matrix(samples, config), config.eta_ratio);
}

}  // namespace ncdd

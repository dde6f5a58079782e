#include "ncdd/similarity.hpp"

#include "kernels.hpp"
#include "ncdd/error.hpp"

namespace ncdd {

Eigen::VectorXd center_normalize(const Eigen::VectorXd& v, double epsilon) {
  if (epsilon <= 0.0) fail(ErrorCode::kConfigError, "epsilon must be positive");
  return detail::cn_rows(v.transpose(), epsilon, nullptr).transpose();
}

SimilarityMatrix similarity_time(const EmbeddingSet& embeddings, const Eigen::VectorXd& theta,
                                 CnEpsilon epsilon) {
  if (epsilon.value <= 0.0) fail(ErrorCode::kConfigError, "epsilon must be positive");
  if (theta.size() != embeddings.d())
    fail(ErrorCode::kDimensionMismatch, "theta length must equal the embedding length 2*D0");
  const Eigen::MatrixXcd z = embeddings.combined();
  if (!z.imag().isZero(0.0))
    fail(ErrorCode::kPreconditionViolated, "time-domain similarity requires real embeddings");
  const Eigen::MatrixXd normalized = detail::cn_rows(z.real(), epsilon.value, nullptr);
  return SimilarityMatrix{detail::sim_time_forward(normalized, theta)};
}

std::vector<Eigen::MatrixXd> welch_cross_spectrum(const SpectrumTensor& part) {
  return detail::welch_forward(part, nullptr);
}

SimilarityMatrix similarity_frequency(const EmbeddingSet& embeddings,
                                      const Eigen::VectorXd& theta_a,
                                      const Eigen::VectorXd& theta_b, int inner_windows) {
  const int d0 = embeddings.d0();
  if (inner_windows < 1 || d0 % inner_windows != 0)
    fail(ErrorCode::kDimensionError, "D0 = " + std::to_string(d0) +
                                         " is not divisible by inner_windows = " +
                                         std::to_string(inner_windows));
  const int bins = d0 / inner_windows;
  if (theta_a.size() != bins || theta_b.size() != bins)
    fail(ErrorCode::kDimensionMismatch, "theta_a/theta_b length must equal the bin count");

  const int n = embeddings.n_nodes();
  SpectrumTensor part_a(static_cast<std::size_t>(n)), part_b(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    part_a[u] = devectorize_node(embeddings.initial().row(u).transpose(), inner_windows, bins);
    part_b[u] = devectorize_node(embeddings.hidden().row(u).transpose(), inner_windows, bins);
  }
  const std::vector<Eigen::MatrixXd> omega_a = detail::welch_forward(part_a, nullptr);
  const std::vector<Eigen::MatrixXd> omega_b = detail::welch_forward(part_b, nullptr);

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int w = 0; w < bins; ++w) s += theta_a(w) * omega_a[w] + theta_b(w) * omega_b[w];
  return SimilarityMatrix{std::move(s)};
}

}  // namespace ncdd

#include "ncdd/types.hpp"

#include <algorithm>
#include <cmath>

namespace ncdd {

Topology::Topology(Eigen::MatrixXi adjacency) : adjacency_(std::move(adjacency)) {
  const int n = static_cast<int>(adjacency_.rows());
  neighbour_lists_.resize(n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (adjacency_(u, v) != 0) neighbour_lists_[u].push_back(v);
    }
  }
}

Topology Topology::from_adjacency(const Eigen::MatrixXi& adjacency) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() < 1)
    fail(ErrorCode::kDimensionMismatch, "adjacency must be square and non-empty");
  const int n = static_cast<int>(adjacency.rows());
  for (int u = 0; u < n; ++u) {
    if (adjacency(u, u) != 1)
      fail(ErrorCode::kPreconditionViolated, "adjacency diagonal must be 1 (self-connected nodes)");
    for (int v = 0; v < n; ++v) {
      if (adjacency(u, v) != 0 && adjacency(u, v) != 1)
        fail(ErrorCode::kPreconditionViolated, "adjacency entries must be 0 or 1");
      if (adjacency(u, v) != adjacency(v, u))
        fail(ErrorCode::kPreconditionViolated, "adjacency must be symmetric");
    }
  }
  return Topology(adjacency);
}

Topology Topology::from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
  if (n_nodes < 1) fail(ErrorCode::kDimensionMismatch, "topology needs at least one node");
  Eigen::MatrixXi adj = Eigen::MatrixXi::Identity(n_nodes, n_nodes);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
      fail(ErrorCode::kDimensionMismatch, "edge endpoint out of range");
    adj(u, v) = 1;
    adj(v, u) = 1;
  }
  return Topology(std::move(adj));
}

Topology Topology::complete(int n_nodes) {
  if (n_nodes < 1) fail(ErrorCode::kDimensionMismatch, "topology needs at least one node");
  return Topology(Eigen::MatrixXi::Ones(n_nodes, n_nodes));
}

Topology Topology::self_loops_only(int n_nodes) {
  if (n_nodes < 1) fail(ErrorCode::kDimensionMismatch, "topology needs at least one node");
  return Topology(Eigen::MatrixXi::Identity(n_nodes, n_nodes));
}

void validate_sample(const GraphSignalSample& sample, int expected_n, int expected_t) {
  if (sample.n_nodes() != expected_n || sample.t_len() != expected_t)
    fail(ErrorCode::kDimensionMismatch,
         "sample is " + std::to_string(sample.n_nodes()) + "x" + std::to_string(sample.t_len()) +
             ", expected " + std::to_string(expected_n) + "x" + std::to_string(expected_t));
  if (!sample.values.allFinite())
    fail(ErrorCode::kNonFiniteValue,
         "sample " + std::to_string(sample.sample_index) + " contains a non-finite entry");
}

EmbeddingSet::EmbeddingSet(Eigen::MatrixXcd initial, Eigen::MatrixXcd hidden)
    : initial_(std::move(initial)), hidden_(std::move(hidden)) {
  if (initial_.rows() != hidden_.rows() || initial_.cols() != hidden_.cols())
    fail(ErrorCode::kDimensionMismatch, "initial and hidden feature shapes differ");
}

Eigen::MatrixXcd EmbeddingSet::combined() const {
  Eigen::MatrixXcd z(n_nodes(), 2 * d0());
  z.leftCols(d0()) = initial_;
  z.rightCols(d0()) = hidden_;
  return z;
}

double asymmetry(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace ncdd

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ncdd/error.hpp"

namespace ncdd {

/// Binary symmetric adjacency with self-loops on every node.
/// Immutable after construction; safe to share across threads read-only.
class Topology {
 public:
  /// Validates symmetry, 0/1 entries and unit diagonal.
  static Topology from_adjacency(const Eigen::MatrixXi& adjacency);

  /// Symmetrizes the edge list and adds self-loops.
  static Topology from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges);

  static Topology complete(int n_nodes);
  static Topology self_loops_only(int n_nodes);

  int n_nodes() const { return static_cast<int>(adjacency_.rows()); }
  const Eigen::MatrixXi& adjacency() const { return adjacency_; }

  /// Sorted neighbour index list of u; always contains u itself.
  const std::vector<int>& neighbours(int u) const { return neighbour_lists_[u]; }
  int degree(int u) const { return static_cast<int>(neighbour_lists_[u].size()); }

 private:
  explicit Topology(Eigen::MatrixXi adjacency);

  Eigen::MatrixXi adjacency_;
  std::vector<std::vector<int>> neighbour_lists_;
};

/// One window of the multichannel signal, one row per node.
struct GraphSignalSample {
  Eigen::MatrixXd values;  // N x T
  std::int64_t sample_index = 0;
  std::optional<std::int64_t> timestamp;
  std::optional<int> label;  // binary state, 0 or 1

  int n_nodes() const { return static_cast<int>(values.rows()); }
  int t_len() const { return static_cast<int>(values.cols()); }
};

/// Throws DimensionMismatch / NonFiniteValue.
void validate_sample(const GraphSignalSample& sample, int expected_n, int expected_t);

/// Per-node initial and hidden feature vectors; the combined embedding of a
/// node is the concatenation [initial ; hidden], so its length is exactly 2*D0.
class EmbeddingSet {
 public:
  EmbeddingSet(Eigen::MatrixXcd initial, Eigen::MatrixXcd hidden);

  const Eigen::MatrixXcd& initial() const { return initial_; }
  const Eigen::MatrixXcd& hidden() const { return hidden_; }

  /// N x 2*D0 matrix whose row u is [initial_u ; hidden_u].
  Eigen::MatrixXcd combined() const;

  int n_nodes() const { return static_cast<int>(initial_.rows()); }
  int d0() const { return static_cast<int>(initial_.cols()); }
  int d() const { return 2 * d0(); }

 private:
  Eigen::MatrixXcd initial_;
  Eigen::MatrixXcd hidden_;
};

/// Learned graph: real symmetric similarity matrix.
struct SimilarityMatrix {
  Eigen::MatrixXd values;  // N x N

  int n_nodes() const { return static_cast<int>(values.rows()); }
};

/// Max |S - S^T| entry; 0 for exactly symmetric matrices.
double asymmetry(const Eigen::MatrixXd& m);

}  // namespace ncdd

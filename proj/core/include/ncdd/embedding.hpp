#pragma once

#include <vector>

#include "ncdd/types.hpp"

namespace ncdd {

enum class AggregatorKind { kMean, kMax };
enum class Activation { kRelu, kSoftmax };

const char* to_string(AggregatorKind kind);
const char* to_string(Activation activation);

/// Shared per-iteration aggregation parameters. weight[k] is D0 x D0 and
/// bias[k] has length D0; both are real and act on complex features by plain
/// complex arithmetic (the bias lands on the real part). Activations are
/// applied to real and imaginary parts independently; a real-valued input
/// stays real through every iteration.
struct AggregatorParams {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
  AggregatorKind aggregator = AggregatorKind::kMean;
  Activation activation = Activation::kRelu;

  int iterations() const { return static_cast<int>(weight.size()); }
};

/// One mean-aggregation step:
/// h_u = act( weight * mean_{v in N(u)} prev_v + bias ).
Eigen::MatrixXcd aggregate_mean(const Eigen::MatrixXcd& hidden_prev, const Topology& topology,
                                const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                                Activation activation);

/// One max-aggregation step:
/// h_u = elementwise max_{v in N(u)} act( weight * prev_v + bias ),
/// the max taken independently on real and imaginary parts.
Eigen::MatrixXcd aggregate_max(const Eigen::MatrixXcd& hidden_prev, const Topology& topology,
                               const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                               Activation activation);

/// K rounds of aggregation starting from `initial`; returns the initial and
/// final hidden features.
EmbeddingSet run_aggregation(const Eigen::MatrixXcd& initial, const Topology& topology,
                             const AggregatorParams& params);

}  // namespace ncdd

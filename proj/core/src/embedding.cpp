#include "ncdd/embedding.hpp"

#include "kernels.hpp"
#include "ncdd/error.hpp"

namespace ncdd {

const char* to_string(AggregatorKind kind) {
  return kind == AggregatorKind::kMean ? "mean" : "max";
}

const char* to_string(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "softmax";
}

namespace {

void check_step_inputs(const Eigen::MatrixXcd& hidden_prev, const Topology& topology,
                       const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias) {
  if (hidden_prev.rows() != topology.n_nodes())
    fail(ErrorCode::kDimensionMismatch, "feature rows do not match the topology");
  if (weight.rows() != weight.cols() || weight.rows() != hidden_prev.cols())
    fail(ErrorCode::kDimensionMismatch, "weight must be D0 x D0");
  if (bias.size() != hidden_prev.cols())
    fail(ErrorCode::kDimensionMismatch, "bias length must be D0");
}

}  // namespace

Eigen::MatrixXcd aggregate_mean(const Eigen::MatrixXcd& hidden_prev, const Topology& topology,
                                const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                                Activation activation) {
  check_step_inputs(hidden_prev, topology, weight, bias);
  return detail::join_channels(detail::mean_step(detail::split_channels(hidden_prev), topology,
                                                 weight, bias, activation, nullptr));
}

Eigen::MatrixXcd aggregate_max(const Eigen::MatrixXcd& hidden_prev, const Topology& topology,
                               const Eigen::MatrixXd& weight, const Eigen::VectorXd& bias,
                               Activation activation) {
  check_step_inputs(hidden_prev, topology, weight, bias);
  return detail::join_channels(detail::max_step(detail::split_channels(hidden_prev), topology,
                                                weight, bias, activation, nullptr));
}

EmbeddingSet run_aggregation(const Eigen::MatrixXcd& initial, const Topology& topology,
                             const AggregatorParams& params) {
  if (params.iterations() < 1) fail(ErrorCode::kConfigError, "need at least one iteration");
  if (static_cast<int>(params.bias.size()) != params.iterations())
    fail(ErrorCode::kConfigError, "weight/bias iteration counts differ");
  for (int k = 0; k < params.iterations(); ++k)
    check_step_inputs(initial, topology, params.weight[k], params.bias[k]);
  detail::CMat h = detail::split_channels(initial);
  for (int k = 0; k < params.iterations(); ++k)
    h = detail::aggregation_step(h, topology, params.weight[k], params.bias[k], params.aggregator,
                                 params.activation, nullptr);
  return EmbeddingSet(initial, detail::join_channels(h));
}

}  // namespace ncdd

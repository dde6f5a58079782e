#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ncdd/embedding.hpp"
#include "ncdd/features.hpp"
#include "ncdd/rng.hpp"
#include "ncdd/similarity.hpp"
#include "ncdd/types.hpp"

namespace ncdd {

/// Restriction of a trainable parameter group.
enum class ParamMode { kFull, kDiagonalRepeated, kScalar };

const char* to_string(ParamMode mode);

/// The six physiological bands used by diagonal-repeated mode, in Hz.
struct BandEdges {
  std::array<std::pair<double, double>, 6> ranges;

  /// delta 0.1-4, theta 4-8, alpha 8-13, beta 13-30, gamma 30-50, high gamma 70-100.
  static BandEdges physiological();
};

/// Assigns every bin frequency to exactly one band: its containing band, or
/// for frequencies outside all ranges the band with the nearest edge, ties to
/// the lower band. Returned index lists are sorted and partition [0, W).
std::array<std::vector<int>, 6> band_partition(const std::vector<double>& bin_frequencies,
                                               const BandEdges& edges);

/// Everything needed to expand free variables and run the forward pass.
struct ModelSpec {
  Domain domain = Domain::kTime;
  int k_iterations = 1;
  AggregatorKind aggregator = AggregatorKind::kMean;
  Activation activation = Activation::kRelu;
  int d0 = 0;           // feature length: T (time) or inner_windows*bins (frequency)
  int inner_windows = 0;  // frequency domain only
  int bins = 0;           // frequency domain only
  int inner_len = 0;      // frequency domain only; DFT window length
  ParamMode theta_mode = ParamMode::kFull;
  ParamMode psi_mode = ParamMode::kFull;
  std::array<int, 6> band_sizes = {0, 0, 0, 0, 0, 0};  // bins per band, sum = W
  double cn_epsilon = 1e-12;

  int d() const { return 2 * d0; }
  int psi_free_per_iteration() const;
  int theta_free() const;
  int free_count() const;

  void validate() const;  // throws ConfigError / ModeUnavailable
};

/// Convenience builder; derives d0, inner_len and band_sizes from the feature
/// configuration and target window length.
ModelSpec make_model_spec(const FeatureConfig& features, int t_len, int k_iterations,
                          AggregatorKind aggregator, Activation activation, ParamMode theta_mode,
                          ParamMode psi_mode, const BandEdges& edges, double cn_epsilon);

/// Expanded view of the free variables.
struct ExpandedParams {
  AggregatorParams agg;
  SimilarityParams sim;
};

/// Flat vector of optimization variables plus the linear expansion rule.
///
/// Layout: for k = 1..K the weight block then the bias block (full: D0*D0
/// row-major + D0; diagonal-repeated: 6 + 6 band values; scalar: 1 + 1),
/// followed by the theta block (time full: D; time scalar: 1; frequency full:
/// W + W; frequency diagonal-repeated: 6 + 6; frequency scalar: 1 + 1).
class TrainableParameters {
 public:
  TrainableParameters(ModelSpec spec, Eigen::VectorXd free_variables);

  /// Seeded initialization: full-mode weights start at identity plus uniform
  /// +-0.01 noise with zero bias; restricted modes start at the projection of
  /// that point. Theta starts at 1/(D-1) (time) or 1/(inner_windows*L*W)
  /// (frequency).
  static TrainableParameters initialize(const ModelSpec& spec, RngSeed seed);

  const ModelSpec& spec() const { return spec_; }
  const Eigen::VectorXd& free_variables() const { return free_; }
  Eigen::VectorXd& free_variables() { return free_; }
  RngSeed seed() const { return seed_; }
  void set_seed(RngSeed seed) { seed_ = seed; }

  /// The linear expansion free variables -> (U_k, b_k, theta).
  ExpandedParams expand() const;

  /// Transpose of the expansion applied to parameter-space gradients.
  Eigen::VectorXd contract_gradient(const ExpandedParams& gradients) const;

 private:
  ModelSpec spec_;
  Eigen::VectorXd free_;
  RngSeed seed_{0};
};

/// Free-function spelling of the expansion.
ExpandedParams expand_parameters(const TrainableParameters& params);

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 0.1;
  int batch_size = 1;
  RngSeed seed{1};
};

/// The objective contribution of one similarity matrix:
///   -sum_v [ sum_{u in N(v)} S(u,v) - |N(v)| * logsumexp_u S(u,v) ],
/// with max-subtracted log-sum-exp.
double similarity_loss(const SimilarityMatrix& s, const Topology& topology);

/// The graph learning objective over a batch: the sum of similarity_loss over
/// each sample's forward pass.
double loss(std::span<const GraphSignalSample> batch, const Topology& topology,
            const TrainableParameters& params);

/// Analytic gradient of `loss` with respect to the free variables.
/// Optionally reports per-sample losses for the batch.
Eigen::VectorXd loss_gradient(std::span<const GraphSignalSample> batch, const Topology& topology,
                              const TrainableParameters& params,
                              std::vector<double>* per_sample_loss = nullptr);

/// Distance of the current point from the nearest non-differentiability
/// (ReLU zero crossing, max-aggregation tie, zero Welch magnitude,
/// center-normalize epsilon guard) over the batch.
double kink_margin(std::span<const GraphSignalSample> batch, const Topology& topology,
                   const TrainableParameters& params);

struct TrainResult {
  TrainableParameters params;
  std::vector<double> epoch_mean_loss;
};

/// Mini-batch SGD on the batch-summed loss: seeded shuffle each epoch,
/// sequential steps x <- x - lr * grad, final short batch included.
/// Per-epoch mean loss is accumulated in dataset order so the trace is
/// independent of the shuffle.
TrainResult sgd_train(const std::vector<GraphSignalSample>& samples, const Topology& topology,
                      const ModelSpec& spec, const TrainConfig& config);

/// Closed-form forward pass: features -> embeddings -> similarity matrix.
/// No optimization happens here; cost is independent of the training-set size.
SimilarityMatrix infer_similarity(const GraphSignalSample& sample, const Topology& topology,
                                  const TrainableParameters& params);

}  // namespace ncdd

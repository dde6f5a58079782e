#pragma once

#include <vector>

#include "ncdd/embedding.hpp"
#include "ncdd/features.hpp"
#include "ncdd/rng.hpp"
#include "ncdd/training.hpp"

namespace ncdd {

/// Inference timing harness: uniform random signals, a complete topology,
/// one cheap training epoch over `train_set_size` samples, then timed
/// closed-form inference. Used by the `benchmark` CLI subcommand.
struct PerfConfig {
  int t_len = 50;
  int n_eval_samples = 100;
  int repeats = 7;             // median over repeats
  double min_batch_seconds = 0.05;
  Domain domain = Domain::kTime;
  int k_iterations = 1;
  AggregatorKind aggregator = AggregatorKind::kMean;
  Activation activation = Activation::kRelu;
  RngSeed seed{1};
};

struct PerfPoint {
  int n_nodes = 0;
  int train_set_size = 0;
  double seconds_per_sample = 0.0;
};

/// A prepared inference workload: trained parameters plus an evaluation set.
struct InferenceWorkload {
  Topology topology{Topology::complete(2)};
  TrainableParameters params;
  std::vector<GraphSignalSample> eval;
  int train_set_size = 0;
};

InferenceWorkload prepare_workload(int n_nodes, int train_set_size, const PerfConfig& config);

/// Seconds per inferred sample over one timed batch of at least min_seconds.
double time_inference_batch(const InferenceWorkload& workload, double min_seconds);

/// Median per-sample inference wall time at one (N, I) point.
PerfPoint measure_inference(int n_nodes, int train_set_size, const PerfConfig& config);

/// Sweep over node counts at a fixed training-set size.
std::vector<PerfPoint> sweep_nodes(const std::vector<int>& n_list, int train_set_size,
                                   const PerfConfig& config);

/// Sweep over training-set sizes at a fixed node count. Timed batches are
/// interleaved round-robin across the sizes so slow clock or thermal drift
/// cannot masquerade as a dependence on the training-set size.
std::vector<PerfPoint> sweep_train_size(int n_nodes, const std::vector<int>& i_list,
                                        const PerfConfig& config);

}  // namespace ncdd

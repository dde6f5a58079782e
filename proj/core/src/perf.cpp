#include "ncdd/perf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ncdd/error.hpp"

namespace ncdd {

namespace {

constexpr std::uint64_t kTrainStream = 11;
constexpr std::uint64_t kEvalStream = 12;

std::vector<GraphSignalSample> uniform_samples(int n_nodes, int t_len, int count, Rng rng) {
  std::vector<GraphSignalSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GraphSignalSample sample;
    sample.values = Eigen::MatrixXd::NullaryExpr(
        n_nodes, t_len, [&rng]() { return rng.uniform01(); });
    sample.sample_index = i;
    sample.timestamp = i;
    samples.push_back(std::move(sample));
  }
  return samples;
}

ModelSpec perf_spec(int t_len, const PerfConfig& config) {
  FeatureConfig features;
  if (config.domain == Domain::kTime) {
    features = FeatureConfig::time_domain();
  } else {
    const int inner = 2;
    const int bins = std::min(8, t_len / inner / 2 + 1);
    features = FeatureConfig::frequency_domain(inner, bins, 256.0, t_len);
  }
  // Scalar modes keep the setup training cheap at large training-set sizes.
  return make_model_spec(features, t_len, config.k_iterations, config.aggregator,
                         config.activation, ParamMode::kScalar, ParamMode::kScalar,
                         BandEdges::physiological(), 1e-12);
}

double relative_sink = 0.0;  // defeats over-eager dead-code elimination

}  // namespace

InferenceWorkload prepare_workload(int n_nodes, int train_set_size, const PerfConfig& config) {
  if (n_nodes < 2 || train_set_size < 1 || config.n_eval_samples < 1 || config.repeats < 1)
    fail(ErrorCode::kConfigError, "bad benchmark configuration");
  const Rng base(config.seed);
  const ModelSpec spec = perf_spec(config.t_len, config);
  const Topology topology = Topology::complete(n_nodes);

  const std::vector<GraphSignalSample> train =
      uniform_samples(n_nodes, config.t_len, train_set_size, base.child(kTrainStream));
  TrainConfig train_config;
  train_config.epochs = 1;
  train_config.learning_rate = 1e-6;
  train_config.batch_size = std::min<int>(64, train_set_size);
  train_config.seed = config.seed;
  TrainResult trained = sgd_train(train, topology, spec, train_config);

  InferenceWorkload workload{topology, std::move(trained.params),
                             uniform_samples(n_nodes, config.t_len, config.n_eval_samples,
                                             base.child(kEvalStream)),
                             train_set_size};
  return workload;
}

double time_inference_batch(const InferenceWorkload& workload, double min_seconds) {
  using Clock = std::chrono::steady_clock;
  double sink = 0.0;
  long inferences = 0;
  const auto start = Clock::now();
  double elapsed = 0.0;
  do {
    for (const GraphSignalSample& sample : workload.eval)
      sink += infer_similarity(sample, workload.topology, workload.params).values.sum();
    inferences += static_cast<long>(workload.eval.size());
    elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  } while (elapsed < min_seconds);
  if (!std::isfinite(sink)) fail(ErrorCode::kNumerical, "benchmark produced non-finite output");
  relative_sink += sink;
  return elapsed / static_cast<double>(inferences);
}

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

}  // namespace

PerfPoint measure_inference(int n_nodes, int train_set_size, const PerfConfig& config) {
  const InferenceWorkload workload = prepare_workload(n_nodes, train_set_size, config);
  time_inference_batch(workload, config.min_batch_seconds);  // warm-up
  std::vector<double> per_sample;
  for (int rep = 0; rep < config.repeats; ++rep)
    per_sample.push_back(time_inference_batch(workload, config.min_batch_seconds));
  return PerfPoint{n_nodes, train_set_size, median(std::move(per_sample))};
}

std::vector<PerfPoint> sweep_nodes(const std::vector<int>& n_list, int train_set_size,
                                   const PerfConfig& config) {
  std::vector<PerfPoint> points;
  for (int n : n_list) points.push_back(measure_inference(n, train_set_size, config));
  return points;
}

std::vector<PerfPoint> sweep_train_size(int n_nodes, const std::vector<int>& i_list,
                                        const PerfConfig& config) {
  std::vector<InferenceWorkload> workloads;
  for (int i : i_list) workloads.push_back(prepare_workload(n_nodes, i, config));
  for (const InferenceWorkload& workload : workloads)
    time_inference_batch(workload, config.min_batch_seconds);  // warm-up

  std::vector<std::vector<double>> samples(workloads.size());
  for (int rep = 0; rep < config.repeats; ++rep)
    for (std::size_t w = 0; w < workloads.size(); ++w)
      samples[w].push_back(time_inference_batch(workloads[w], config.min_batch_seconds));

  std::vector<PerfPoint> points;
  for (std::size_t w = 0; w < workloads.size(); ++w)
    points.push_back(
        PerfPoint{n_nodes, workloads[w].train_set_size, median(std::move(samples[w]))});
  return points;
}

}  // namespace ncdd

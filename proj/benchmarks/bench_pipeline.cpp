#include <benchmark/benchmark.h>

#include "ncdd/features.hpp"
#include "ncdd/perf.hpp"
#include "ncdd/rng.hpp"
#include "ncdd/training.hpp"

using namespace ncdd;

namespace {

GraphSignalSample make_sample(int n, int t, std::uint64_t seed) {
  Rng rng(seed);
  GraphSignalSample sample;
  sample.values = Eigen::MatrixXd::NullaryExpr(n, t, [&rng]() { return rng.uniform(-1.0, 1.0); });
  return sample;
}

void BM_InferSimilarity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PerfConfig config;
  const InferenceWorkload workload = prepare_workload(n, 32, config);
  std::size_t i = 0;
  for (auto _ : state) {
    const SimilarityMatrix s = infer_similarity(workload.eval[i % workload.eval.size()],
                                                workload.topology, workload.params);
    benchmark::DoNotOptimize(s.values.data());
    ++i;
  }
}
BENCHMARK(BM_InferSimilarity)->Arg(5)->Arg(15)->Arg(25)->Arg(50)->Arg(75);

void BM_DftWindows(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const GraphSignalSample sample = make_sample(12, t, 3);
  const WindowTensor windows = partition_windows(sample, 3);
  const int bins = static_cast<int>(windows[0].cols()) / 2 + 1;
  for (auto _ : state) {
    const SpectrumTensor spectra = dft_windows(windows, bins);
    benchmark::DoNotOptimize(spectra[0].data());
  }
}
BENCHMARK(BM_DftWindows)->Arg(160)->Arg(640);

void BM_LossGradient(benchmark::State& state) {
  const int n = 12, t = 640;
  std::vector<GraphSignalSample> batch;
  for (int i = 0; i < 4; ++i) batch.push_back(make_sample(n, t, 10 + i));
  const Topology topology = Topology::complete(n);
  const ModelSpec spec = make_model_spec(
      state.range(0) == 0 ? FeatureConfig::time_domain()
                          : FeatureConfig::frequency_domain(3, 79, 256.0, t),
      t, 1, AggregatorKind::kMean, Activation::kRelu, ParamMode::kFull, ParamMode::kFull,
      BandEdges::physiological(), 1e-12);
  const TrainableParameters params = TrainableParameters::initialize(spec, RngSeed{5});
  for (auto _ : state) {
    const Eigen::VectorXd grad = loss_gradient(batch, topology, params);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_LossGradient)->Arg(0)->Arg(1)->ArgNames({"domain"});

}  // namespace

BENCHMARK_MAIN();

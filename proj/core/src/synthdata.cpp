#include "ncdd/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncdd/error.hpp"

namespace ncdd {

void SynthConfig::validate() const {
  if (n_nodes < 2) fail(ErrorCode::kConfigError, "need at least 2 nodes");
  if (t_len < 2) fail(ErrorCode::kConfigError, "t_len must be >= 2");
  if (n_samples_per_state < 1) fail(ErrorCode::kConfigError, "need at least 1 sample per state");
  if (sampling_rate_hz <= 0.0) fail(ErrorCode::kConfigError, "sampling rate must be positive");
  if (ar_coefficient < 0.0 || ar_coefficient >= 1.0)
    fail(ErrorCode::kConfigError, "AR coefficient must be in [0, 1)");
  if (noise_sigma <= 0.0) fail(ErrorCode::kConfigError, "noise sigma must be positive");
  if (coupling < 0.0) fail(ErrorCode::kConfigError, "coupling must be nonnegative");
  if (f1_hz <= 0.0 || f1_hz >= sampling_rate_hz / 2.0)
    fail(ErrorCode::kConfigError, "f1 must lie below the Nyquist frequency");
  for (int u : coupled_nodes)
    if (u < 0 || u >= n_nodes) fail(ErrorCode::kConfigError, "coupled node index out of range");
}

namespace {

constexpr int kBurnIn = 64;

Eigen::MatrixXd draw_sample(const SynthConfig& config, const std::vector<int>& coupled, int state,
                            Rng rng) {
  Eigen::MatrixXd x(config.n_nodes, config.t_len);
  // Shared oscillation phase; drawn for both states so the state-0 and
  // state-1 generators consume the stream identically.
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double omega = 2.0 * std::numbers::pi * config.f1_hz / config.sampling_rate_hz;

  for (int u = 0; u < config.n_nodes; ++u) {
    double prev = 0.0;
    for (int t = -kBurnIn; t < config.t_len; ++t) {
      prev = config.ar_coefficient * prev + config.noise_sigma * rng.normal();
      if (t >= 0) x(u, t) = prev;
    }
  }
  if (state == 1) {
    for (int u : coupled) {
      for (int t = 0; t < config.t_len; ++t)
        x(u, t) += config.coupling * std::sin(omega * static_cast<double>(t) + phase);
    }
  }
  return x;
}

}  // namespace

std::vector<GraphSignalSample> generate(const SynthConfig& config) {
  config.validate();
  std::vector<int> coupled = config.coupled_nodes;
  if (coupled.empty()) {
    for (int u = 0; u < config.n_nodes / 2; ++u) coupled.push_back(u);
  }
  std::sort(coupled.begin(), coupled.end());

  const Rng base(config.seed);
  std::vector<GraphSignalSample> samples;
  samples.reserve(static_cast<std::size_t>(2 * config.n_samples_per_state));
  for (int j = 0; j < config.n_samples_per_state; ++j) {
    for (int state = 0; state < 2; ++state) {
      const std::int64_t index = 2 * j + state;
      GraphSignalSample sample;
      sample.values =
          draw_sample(config, coupled, state, base.child(static_cast<std::uint64_t>(index)));
      sample.sample_index = index;
      sample.timestamp = index;
      sample.label = state;
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

}  // namespace ncdd

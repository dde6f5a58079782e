#pragma once

#include <cstdint>
#include <vector>

#include "ncdd/rng.hpp"
#include "ncdd/types.hpp"

namespace ncdd {

/// Two-state synthetic multichannel signals. State 0: independent AR(1) noise
/// per node. State 1: the coupled node subset additionally receives a shared
/// sinusoid at f1_hz with a per-sample random phase, scaled by kappa, so the
/// subset shows elevated correlation and coherence at f1.
struct SynthConfig {
  int n_nodes = 12;
  int t_len = 640;
  int n_samples_per_state = 100;
  double sampling_rate_hz = 256.0;
  double ar_coefficient = 0.5;   // rho0, in [0, 1)
  double noise_sigma = 1.0;
  double f1_hz = 11.0;
  double coupling = 3.0;         // kappa >= 0
  std::vector<int> coupled_nodes;  // empty = first half of the nodes
  RngSeed seed{1};

  void validate() const;  // throws ConfigError
};

/// Labeled samples with interleaved timestamps (state-s sample j gets
/// timestamp 2*j + s). Deterministic given the seed; per-sample child streams.
std::vector<GraphSignalSample> generate(const SynthConfig& config);

}  // namespace ncdd

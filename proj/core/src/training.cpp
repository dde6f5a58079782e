#include "ncdd/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kernels.hpp"
#include "ncdd/error.hpp"

namespace ncdd {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

}  // namespace

const char* to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::kFull: return "full";
    case ParamMode::kDiagonalRepeated: return "diagonal_repeated";
    case ParamMode::kScalar: return "scalar";
  }
  return "?";
}

BandEdges BandEdges::physiological() {
  BandEdges edges;
  edges.ranges = {{{0.1, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 30.0}, {30.0, 50.0}, {70.0, 100.0}}};
  return edges;
}

std::array<std::vector<int>, 6> band_partition(const std::vector<double>& bin_frequencies,
                                               const BandEdges& edges) {
  for (std::size_t i = 1; i < bin_frequencies.size(); ++i) {
    if (bin_frequencies[i] <= bin_frequencies[i - 1])
      fail(ErrorCode::kPreconditionViolated, "bin frequencies must be strictly increasing");
  }
  std::array<std::vector<int>, 6> groups;
  for (std::size_t w = 0; w < bin_frequencies.size(); ++w) {
    const double f = bin_frequencies[w];
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int l = 0; l < 6; ++l) {
      const auto [lo, hi] = edges.ranges[static_cast<std::size_t>(l)];
      const double dist = (f >= lo && f <= hi) ? 0.0 : std::min(std::abs(f - lo), std::abs(f - hi));
      if (dist < best_dist) {  // ties go to the lower band
        best_dist = dist;
        best = l;
      }
    }
    groups[static_cast<std::size_t>(best)].push_back(static_cast<int>(w));
  }
  return groups;
}

int ModelSpec::psi_free_per_iteration() const {
  switch (psi_mode) {
    case ParamMode::kFull: return d0 * d0 + d0;
    case ParamMode::kDiagonalRepeated: return 12;
    case ParamMode::kScalar: return 2;
  }
  return 0;
}

int ModelSpec::theta_free() const {
  if (domain == Domain::kTime) {
    switch (theta_mode) {
      case ParamMode::kFull: return d();
      case ParamMode::kScalar: return 1;
      default: break;
    }
    return 0;
  }
  switch (theta_mode) {
    case ParamMode::kFull: return 2 * bins;
    case ParamMode::kDiagonalRepeated: return 12;
    case ParamMode::kScalar: return 2;
  }
  return 0;
}

int ModelSpec::free_count() const {
  return k_iterations * psi_free_per_iteration() + theta_free();
}

void ModelSpec::validate() const {
  if (k_iterations < 1) fail(ErrorCode::kConfigError, "k_iterations must be >= 1");
  if (d0 < 1) fail(ErrorCode::kConfigError, "d0 must be >= 1");
  if (cn_epsilon <= 0.0) fail(ErrorCode::kConfigError, "cn_epsilon must be positive");
  if (domain == Domain::kTime) {
    if (theta_mode == ParamMode::kDiagonalRepeated || psi_mode == ParamMode::kDiagonalRepeated)
      fail(ErrorCode::kModeUnavailable,
           "diagonal_repeated mode is only defined in the frequency domain");
  } else {
    if (inner_windows < 1 || bins < 1 || d0 != inner_windows * bins)
      fail(ErrorCode::kConfigError, "frequency domain needs d0 = inner_windows * bins");
    if (inner_len < bins) fail(ErrorCode::kConfigError, "inner window length below bin count");
    if (theta_mode == ParamMode::kDiagonalRepeated || psi_mode == ParamMode::kDiagonalRepeated) {
      const int total = std::accumulate(band_sizes.begin(), band_sizes.end(), 0);
      if (total != bins)
        fail(ErrorCode::kConfigError, "band sizes must partition the frequency bins");
    }
  }
}

ModelSpec make_model_spec(const FeatureConfig& features, int t_len, int k_iterations,
                          AggregatorKind aggregator, Activation activation, ParamMode theta_mode,
                          ParamMode psi_mode, const BandEdges& edges, double cn_epsilon) {
  ModelSpec spec;
  spec.domain = features.domain;
  spec.k_iterations = k_iterations;
  spec.aggregator = aggregator;
  spec.activation = activation;
  spec.theta_mode = theta_mode;
  spec.psi_mode = psi_mode;
  spec.cn_epsilon = cn_epsilon;
  spec.d0 = features.d0(t_len);
  if (features.domain == Domain::kFrequency) {
    spec.inner_windows = features.inner_windows;
    spec.bins = features.bins;
    spec.inner_len = features.inner_window_length(t_len);
    const auto groups = band_partition(features.bin_frequencies, edges);
    int cursor = 0;
    for (int l = 0; l < 6; ++l) {
      const auto& group = groups[static_cast<std::size_t>(l)];
      spec.band_sizes[static_cast<std::size_t>(l)] = static_cast<int>(group.size());
      for (int w : group) {
        if (w != cursor++)
          fail(ErrorCode::kConfigError, "band assignment is not contiguous over the sorted bins");
      }
    }
  }
  spec.validate();
  return spec;
}

namespace {

// Band index of each flat feature position p (bin = p / inner_windows).
std::vector<int> band_of_position(const ModelSpec& spec) {
  std::vector<int> band_of_bin(static_cast<std::size_t>(spec.bins));
  int w = 0;
  for (int l = 0; l < 6; ++l)
    for (int c = 0; c < spec.band_sizes[static_cast<std::size_t>(l)]; ++c)
      band_of_bin[static_cast<std::size_t>(w++)] = l;
  std::vector<int> band_of_pos(static_cast<std::size_t>(spec.d0));
  for (int p = 0; p < spec.d0; ++p)
    band_of_pos[static_cast<std::size_t>(p)] =
        band_of_bin[static_cast<std::size_t>(p / spec.inner_windows)];
  return band_of_pos;
}

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutableMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

TrainableParameters::TrainableParameters(ModelSpec spec, Eigen::VectorXd free_variables)
    : spec_(std::move(spec)), free_(std::move(free_variables)) {
  spec_.validate();
  if (free_.size() != spec_.free_count())
    fail(ErrorCode::kDimensionMismatch,
         "free vector length " + std::to_string(free_.size()) + " != expected " +
             std::to_string(spec_.free_count()));
}

TrainableParameters TrainableParameters::initialize(const ModelSpec& spec, RngSeed seed) {
  spec.validate();
  Rng rng = Rng(seed).child(kInitStream);
  Eigen::VectorXd free = Eigen::VectorXd::Zero(spec.free_count());
  int idx = 0;
  for (int k = 0; k < spec.k_iterations; ++k) {
    switch (spec.psi_mode) {
      case ParamMode::kFull:
        for (int r = 0; r < spec.d0; ++r)
          for (int c = 0; c < spec.d0; ++c)
            free(idx++) = (r == c ? 1.0 : 0.0) + rng.uniform(-0.01, 0.01);
        idx += spec.d0;  // bias stays 0
        break;
      case ParamMode::kDiagonalRepeated:
        for (int l = 0; l < 6; ++l) free(idx++) = 1.0 + rng.uniform(-0.01, 0.01);
        idx += 6;
        break;
      case ParamMode::kScalar:
        free(idx++) = 1.0 / static_cast<double>(spec.d0) + rng.uniform(-0.01, 0.01);
        idx += 1;
        break;
    }
  }
  // Theta starts at the plain-correlation / scaled cross-spectrum point.
  if (spec.domain == Domain::kTime) {
    const double base = 1.0 / static_cast<double>(spec.d() - 1);
    for (int i = idx; i < free.size(); ++i) free(i) = base;
  } else {
    const double base =
        1.0 / (static_cast<double>(spec.inner_windows) * spec.inner_len * spec.bins);
    for (int i = idx; i < free.size(); ++i) free(i) = base;
  }
  TrainableParameters params(spec, std::move(free));
  params.set_seed(seed);
  return params;
}

ExpandedParams TrainableParameters::expand() const {
  const ModelSpec& spec = spec_;
  ExpandedParams out;
  out.agg.aggregator = spec.aggregator;
  out.agg.activation = spec.activation;
  out.sim.domain = spec.domain;

  const std::vector<int> band_of_pos =
      (spec.domain == Domain::kFrequency &&
       (spec.psi_mode == ParamMode::kDiagonalRepeated ||
        spec.theta_mode == ParamMode::kDiagonalRepeated))
          ? band_of_position(spec)
          : std::vector<int>();

  int idx = 0;
  for (int k = 0; k < spec.k_iterations; ++k) {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
    switch (spec.psi_mode) {
      case ParamMode::kFull:
        weight = RowMajorMap(free_.data() + idx, spec.d0, spec.d0);
        idx += spec.d0 * spec.d0;
        bias = free_.segment(idx, spec.d0);
        idx += spec.d0;
        break;
      case ParamMode::kDiagonalRepeated: {
        weight = Eigen::MatrixXd::Zero(spec.d0, spec.d0);
        bias.resize(spec.d0);
        for (int p = 0; p < spec.d0; ++p) {
          const int l = band_of_pos[static_cast<std::size_t>(p)];
          weight(p, p) = free_(idx + l);
          bias(p) = free_(idx + 6 + l);
        }
        idx += 12;
        break;
      }
      case ParamMode::kScalar:
        weight = Eigen::MatrixXd::Constant(spec.d0, spec.d0, free_(idx));
        bias = Eigen::VectorXd::Constant(spec.d0, free_(idx + 1));
        idx += 2;
        break;
    }
    out.agg.weight.push_back(std::move(weight));
    out.agg.bias.push_back(std::move(bias));
  }

  if (spec.domain == Domain::kTime) {
    switch (spec.theta_mode) {
      case ParamMode::kFull:
        out.sim.theta = free_.segment(idx, spec.d());
        break;
      case ParamMode::kScalar:
        out.sim.theta = Eigen::VectorXd::Constant(spec.d(), free_(idx));
        break;
      default:
        fail(ErrorCode::kModeUnavailable, "diagonal_repeated theta in the time domain");
    }
  } else {
    switch (spec.theta_mode) {
      case ParamMode::kFull:
        out.sim.theta_a = free_.segment(idx, spec.bins);
        out.sim.theta_b = free_.segment(idx + spec.bins, spec.bins);
        break;
      case ParamMode::kDiagonalRepeated: {
        out.sim.theta_a.resize(spec.bins);
        out.sim.theta_b.resize(spec.bins);
        for (int w = 0; w < spec.bins; ++w) {
          const int l = band_of_pos[static_cast<std::size_t>(w * spec.inner_windows)];
          out.sim.theta_a(w) = free_(idx + l);
          out.sim.theta_b(w) = free_(idx + 6 + l);
        }
        break;
      }
      case ParamMode::kScalar:
        out.sim.theta_a = Eigen::VectorXd::Constant(spec.bins, free_(idx));
        out.sim.theta_b = Eigen::VectorXd::Constant(spec.bins, free_(idx + 1));
        break;
    }
  }
  return out;
}

Eigen::VectorXd TrainableParameters::contract_gradient(const ExpandedParams& gradients) const {
  const ModelSpec& spec = spec_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.free_count());

  const std::vector<int> band_of_pos =
      (spec.domain == Domain::kFrequency &&
       (spec.psi_mode == ParamMode::kDiagonalRepeated ||
        spec.theta_mode == ParamMode::kDiagonalRepeated))
          ? band_of_position(spec)
          : std::vector<int>();

  int idx = 0;
  for (int k = 0; k < spec.k_iterations; ++k) {
    const Eigen::MatrixXd& g_weight = gradients.agg.weight[static_cast<std::size_t>(k)];
    const Eigen::VectorXd& g_bias = gradients.agg.bias[static_cast<std::size_t>(k)];
    switch (spec.psi_mode) {
      case ParamMode::kFull:
        RowMajorMutableMap(out.data() + idx, spec.d0, spec.d0) = g_weight;
        idx += spec.d0 * spec.d0;
        out.segment(idx, spec.d0) = g_bias;
        idx += spec.d0;
        break;
      case ParamMode::kDiagonalRepeated:
        for (int p = 0; p < spec.d0; ++p) {
          const int l = band_of_pos[static_cast<std::size_t>(p)];
          out(idx + l) += g_weight(p, p);
          out(idx + 6 + l) += g_bias(p);
        }
        idx += 12;
        break;
      case ParamMode::kScalar:
        out(idx) = g_weight.sum();
        out(idx + 1) = g_bias.sum();
        idx += 2;
        break;
    }
  }

  if (spec.domain == Domain::kTime) {
    const Eigen::VectorXd& g_theta = gradients.sim.theta;
    if (spec.theta_mode == ParamMode::kFull) {
      out.segment(idx, spec.d()) = g_theta;
    } else {
      out(idx) = g_theta.sum();
    }
  } else {
    const Eigen::VectorXd& g_a = gradients.sim.theta_a;
    const Eigen::VectorXd& g_b = gradients.sim.theta_b;
    switch (spec.theta_mode) {
      case ParamMode::kFull:
        out.segment(idx, spec.bins) = g_a;
        out.segment(idx + spec.bins, spec.bins) = g_b;
        break;
      case ParamMode::kDiagonalRepeated:
        for (int w = 0; w < spec.bins; ++w) {
          const int l = band_of_pos[static_cast<std::size_t>(w * spec.inner_windows)];
          out(idx + l) += g_a(w);
          out(idx + 6 + l) += g_b(w);
        }
        break;
      case ParamMode::kScalar:
        out(idx) = g_a.sum();
        out(idx + 1) = g_b.sum();
        break;
    }
  }
  return out;
}

ExpandedParams expand_parameters(const TrainableParameters& params) {
  return params.expand();
}

namespace {

struct SampleTrace {
  std::vector<detail::CMat> levels;       // h^0 .. h^K
  std::vector<detail::StepTrace> steps;   // per iteration
  detail::CnTrace cn;                     // time domain
  SpectrumTensor part_a, part_b;          // frequency domain
  std::vector<Eigen::MatrixXd> omega_a, omega_b;
  detail::WelchTrace welch_b;
};

SpectrumTensor channels_to_spectra(const detail::CMat& h, const ModelSpec& spec) {
  const Eigen::MatrixXcd joined = detail::join_channels(h);
  SpectrumTensor out(static_cast<std::size_t>(joined.rows()));
  for (Eigen::Index u = 0; u < joined.rows(); ++u)
    out[static_cast<std::size_t>(u)] =
        devectorize_node(joined.row(u).transpose(), spec.inner_windows, spec.bins);
  return out;
}

Eigen::MatrixXd forward_similarity(const GraphSignalSample& sample, const Topology& topology,
                                   const ModelSpec& spec, const ExpandedParams& params,
                                   SampleTrace* trace) {
  if (sample.n_nodes() != topology.n_nodes())
    fail(ErrorCode::kDimensionMismatch, "sample node count does not match the topology");
  if (!sample.values.allFinite())
    fail(ErrorCode::kNonFiniteValue,
         "sample " + std::to_string(sample.sample_index) + " contains a non-finite entry");

  SpectrumTensor part_a;
  detail::CMat h0;
  if (spec.domain == Domain::kTime) {
    if (sample.t_len() != spec.d0)
      fail(ErrorCode::kDimensionMismatch, "time-domain features need T = D0");
    h0.re = sample.values;
    h0.has_im = false;
  } else {
    part_a = dft_windows(partition_windows(sample, spec.inner_windows), spec.bins);
    h0 = detail::split_channels(vectorize_fd(part_a));
  }

  if (trace) {
    trace->levels.clear();
    trace->steps.assign(static_cast<std::size_t>(spec.k_iterations), detail::StepTrace{});
    trace->levels.push_back(h0);
  }
  detail::CMat h = h0;
  for (int k = 0; k < spec.k_iterations; ++k) {
    h = detail::aggregation_step(h, topology, params.agg.weight[static_cast<std::size_t>(k)],
                                 params.agg.bias[static_cast<std::size_t>(k)],
                                 params.agg.aggregator, params.agg.activation,
                                 trace ? &trace->steps[static_cast<std::size_t>(k)] : nullptr);
    if (trace) trace->levels.push_back(h);
  }

  if (spec.domain == Domain::kTime) {
    Eigen::MatrixXd z(sample.n_nodes(), spec.d());
    z.leftCols(spec.d0) = h0.re;
    z.rightCols(spec.d0) = h.re;
    const Eigen::MatrixXd normalized =
        detail::cn_rows(z, spec.cn_epsilon, trace ? &trace->cn : nullptr);
    return detail::sim_time_forward(normalized, params.sim.theta);
  }

  SpectrumTensor part_b = channels_to_spectra(h, spec);
  std::vector<Eigen::MatrixXd> omega_a = detail::welch_forward(part_a, nullptr);
  std::vector<Eigen::MatrixXd> omega_b =
      detail::welch_forward(part_b, trace ? &trace->welch_b : nullptr);

  const int n = sample.n_nodes();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int w = 0; w < spec.bins; ++w)
    s += params.sim.theta_a(w) * omega_a[static_cast<std::size_t>(w)] +
         params.sim.theta_b(w) * omega_b[static_cast<std::size_t>(w)];
  if (trace) {
    trace->part_a = std::move(part_a);
    trace->part_b = std::move(part_b);
    trace->omega_a = std::move(omega_a);
    trace->omega_b = std::move(omega_b);
  }
  return s;
}

void backward_similarity(const SampleTrace& trace, const Topology& topology, const ModelSpec& spec,
                         const ExpandedParams& params, const Eigen::MatrixXd& g_s,
                         ExpandedParams& grads) {
  const detail::CMat& h_final = trace.levels.back();
  detail::CMat g_h = detail::CMat::zeros_like(h_final);

  if (spec.domain == Domain::kTime) {
    Eigen::MatrixXd g_norm = Eigen::MatrixXd::Zero(g_s.rows(), spec.d());
    detail::sim_time_backward(trace.cn.normalized, params.sim.theta, g_s, g_norm, grads.sim.theta);
    const Eigen::MatrixXd g_z = detail::cn_rows_backward(trace.cn, g_norm, spec.cn_epsilon);
    g_h.re = g_z.rightCols(spec.d0);
  } else {
    std::vector<Eigen::MatrixXd> g_omega_b(static_cast<std::size_t>(spec.bins));
    for (int w = 0; w < spec.bins; ++w) {
      grads.sim.theta_a(w) += g_s.cwiseProduct(trace.omega_a[static_cast<std::size_t>(w)]).sum();
      grads.sim.theta_b(w) += g_s.cwiseProduct(trace.omega_b[static_cast<std::size_t>(w)]).sum();
      g_omega_b[static_cast<std::size_t>(w)] = params.sim.theta_b(w) * g_s;
    }
    SpectrumTensor g_part_b(trace.part_b.size());
    for (std::size_t u = 0; u < trace.part_b.size(); ++u)
      g_part_b[u] = Eigen::MatrixXcd::Zero(spec.inner_windows, spec.bins);
    detail::welch_backward(trace.part_b, trace.welch_b, g_omega_b, g_part_b);
    for (std::size_t u = 0; u < g_part_b.size(); ++u) {
      for (int w = 0; w < spec.bins; ++w) {
        for (int t = 0; t < spec.inner_windows; ++t) {
          const std::complex<double> g = g_part_b[u](t, w);
          g_h.re(static_cast<Eigen::Index>(u), w * spec.inner_windows + t) = g.real();
          if (g_h.has_im)
            g_h.im(static_cast<Eigen::Index>(u), w * spec.inner_windows + t) = g.imag();
        }
      }
    }
  }

  for (int k = spec.k_iterations - 1; k >= 0; --k) {
    detail::CMat g_prev = detail::CMat::zeros_like(trace.levels[static_cast<std::size_t>(k)]);
    detail::aggregation_step_backward(
        trace.steps[static_cast<std::size_t>(k)], trace.levels[static_cast<std::size_t>(k)],
        topology, params.agg.weight[static_cast<std::size_t>(k)], params.agg.aggregator,
        params.agg.activation, g_h, g_prev, grads.agg.weight[static_cast<std::size_t>(k)],
        grads.agg.bias[static_cast<std::size_t>(k)]);
    g_h = std::move(g_prev);
  }
}

ExpandedParams zero_gradients(const ModelSpec& spec) {
  ExpandedParams grads;
  grads.agg.aggregator = spec.aggregator;
  grads.agg.activation = spec.activation;
  grads.sim.domain = spec.domain;
  for (int k = 0; k < spec.k_iterations; ++k) {
    grads.agg.weight.push_back(Eigen::MatrixXd::Zero(spec.d0, spec.d0));
    grads.agg.bias.push_back(Eigen::VectorXd::Zero(spec.d0));
  }
  if (spec.domain == Domain::kTime) {
    grads.sim.theta = Eigen::VectorXd::Zero(spec.d());
  } else {
    grads.sim.theta_a = Eigen::VectorXd::Zero(spec.bins);
    grads.sim.theta_b = Eigen::VectorXd::Zero(spec.bins);
  }
  return grads;
}

}  // namespace

double similarity_loss(const SimilarityMatrix& s, const Topology& topology) {
  if (s.n_nodes() != topology.n_nodes() || s.values.cols() != s.values.rows())
    fail(ErrorCode::kDimensionMismatch, "similarity matrix does not match the topology");
  return detail::loss_from_similarity(s.values, topology, nullptr);
}

double loss(std::span<const GraphSignalSample> batch, const Topology& topology,
            const TrainableParameters& params) {
  if (batch.empty()) fail(ErrorCode::kPreconditionViolated, "empty batch");
  const ExpandedParams expanded = params.expand();
  double total = 0.0;
  for (const GraphSignalSample& sample : batch) {
    const Eigen::MatrixXd s =
        forward_similarity(sample, topology, params.spec(), expanded, nullptr);
    total += detail::loss_from_similarity(s, topology, nullptr);
  }
  return total;
}

Eigen::VectorXd loss_gradient(std::span<const GraphSignalSample> batch, const Topology& topology,
                              const TrainableParameters& params,
                              std::vector<double>* per_sample_loss) {
  if (batch.empty()) fail(ErrorCode::kPreconditionViolated, "empty batch");
  const ModelSpec& spec = params.spec();
  const ExpandedParams expanded = params.expand();
  ExpandedParams grads = zero_gradients(spec);
  if (per_sample_loss) per_sample_loss->clear();

  SampleTrace trace;
  Eigen::MatrixXd g_s;
  for (const GraphSignalSample& sample : batch) {
    const Eigen::MatrixXd s = forward_similarity(sample, topology, spec, expanded, &trace);
    const double sample_loss = detail::loss_from_similarity(s, topology, &g_s);
    if (per_sample_loss) per_sample_loss->push_back(sample_loss);
    backward_similarity(trace, topology, spec, expanded, g_s, grads);
  }
  return params.contract_gradient(grads);
}

double kink_margin(std::span<const GraphSignalSample> batch, const Topology& topology,
                   const TrainableParameters& params) {
  const ModelSpec& spec = params.spec();
  const ExpandedParams expanded = params.expand();
  double margin = std::numeric_limits<double>::infinity();

  // Exact zeros are skipped everywhere below: they are structural (e.g. the
  // imaginary part of a DC bin, or a ReLU-dead unit feeding a max tie) and
  // stay constant under perturbation, so they are not non-differentiabilities.
  const auto min_abs_nonzero = [&margin](const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double a = std::abs(m.data()[i]);
      if (a != 0.0) margin = std::min(margin, a);
    }
  };

  SampleTrace trace;
  for (const GraphSignalSample& sample : batch) {
    forward_similarity(sample, topology, spec, expanded, &trace);
    for (const detail::StepTrace& step : trace.steps) {
      if (spec.activation == Activation::kRelu) {
        const detail::CMat& pre = spec.aggregator == AggregatorKind::kMean ? step.pre : step.trans_pre;
        min_abs_nonzero(pre.re);
        if (pre.has_im) min_abs_nonzero(pre.im);
      }
      if (spec.aggregator == AggregatorKind::kMax) {
        // Gap between the winner and the runner-up per (node, component, channel).
        const auto gap = [&](const Eigen::MatrixXd& trans, const Eigen::MatrixXi& argmax) {
          for (int u = 0; u < topology.n_nodes(); ++u) {
            const auto& nbrs = topology.neighbours(u);
            if (nbrs.size() < 2) continue;
            for (Eigen::Index d = 0; d < trans.cols(); ++d) {
              const double best = trans(argmax(u, d), d);
              for (int v : nbrs) {
                if (v == argmax(u, d)) continue;
                const double g = best - trans(v, d);
                if (g != 0.0) margin = std::min(margin, g);
              }
            }
          }
        };
        gap(step.trans_out.re, step.argmax_re);
        if (step.trans_out.has_im) gap(step.trans_out.im, step.argmax_im);
      }
    }
    if (spec.domain == Domain::kTime) {
      margin = std::min(margin, (trace.cn.sdev.array() - spec.cn_epsilon).abs().minCoeff());
    } else {
      for (const Eigen::MatrixXcd& cross : trace.welch_b.cross) min_abs_nonzero(cross.cwiseAbs());
    }
  }
  return margin;
}

TrainResult sgd_train(const std::vector<GraphSignalSample>& samples, const Topology& topology,
                      const ModelSpec& spec, const TrainConfig& config) {
  if (samples.empty()) fail(ErrorCode::kPreconditionViolated, "no training samples");
  if (config.epochs < 1) fail(ErrorCode::kConfigError, "epochs must be >= 1");
  if (config.batch_size < 1 || config.batch_size > static_cast<int>(samples.size()))
    fail(ErrorCode::kConfigError, "batch_size must be in [1, number of training samples]");
  if (!(config.learning_rate >= 0.0))
    fail(ErrorCode::kConfigError, "learning rate must be nonnegative");

  TrainableParameters params = TrainableParameters::initialize(spec, config.seed);
  Rng shuffle_rng = Rng(config.seed).child(kShuffleStream);

  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::vector<double> per_loss(n);
  std::vector<GraphSignalSample> batch;
  std::vector<double> batch_losses;
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle_indices(order, shuffle_rng);

    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
      const Eigen::VectorXd grad = loss_gradient(batch, topology, params, &batch_losses);
      for (std::size_t i = start; i < stop; ++i) per_loss[order[i]] = batch_losses[i - start];
      params.free_variables() -= config.learning_rate * grad;
      if (!params.free_variables().allFinite())
        fail(ErrorCode::kNumerical, "parameters diverged (non-finite) during SGD");
    }

    // Dataset-order summation keeps the trace independent of the shuffle.
    double total = 0.0;
    for (double v : per_loss) total += v;
    trace.push_back(total / static_cast<double>(n));
  }
  return TrainResult{std::move(params), std::move(trace)};
}

SimilarityMatrix infer_similarity(const GraphSignalSample& sample, const Topology& topology,
                                  const TrainableParameters& params) {
  const ExpandedParams expanded = params.expand();
  return SimilarityMatrix{
      forward_similarity(sample, topology, params.spec(), expanded, nullptr)};
}

}  // namespace ncdd

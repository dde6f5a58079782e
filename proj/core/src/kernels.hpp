// Internal forward/backward kernels shared by the embedding, similarity and
// training translation units. Complex features are carried as separate real
// channels; a missing imaginary channel means the data is real and stays real.
#pragma once

#include <Eigen/Core>
#include <vector>

#include "ncdd/embedding.hpp"
#include "ncdd/features.hpp"
#include "ncdd/types.hpp"

namespace ncdd::detail {

struct CMat {
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  bool has_im = false;

  Eigen::Index rows() const { return re.rows(); }
  Eigen::Index cols() const { return re.cols(); }

  static CMat zeros_like(const CMat& other) {
    CMat out;
    out.re = Eigen::MatrixXd::Zero(other.rows(), other.cols());
    out.has_im = other.has_im;
    if (out.has_im) out.im = Eigen::MatrixXd::Zero(other.rows(), other.cols());
    return out;
  }
};

CMat split_channels(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd join_channels(const CMat& m);

// Row-wise activation on one real channel.
Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& pre, Activation activation);
// d(loss)/d(pre) from d(loss)/d(out). ReLU derivative at exactly 0 is 0.
Eigen::MatrixXd activation_backward(const Eigen::MatrixXd& g_out, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& out, Activation activation);

struct StepTrace {
  CMat agg;   // mean: neighbourhood averages; max: unused
  CMat pre;   // mean: pre-activation per node
  CMat out;   // sigma(pre) / the max-reduced output
  // max aggregator only:
  CMat trans_pre;            // weight*prev_v + bias per source node
  CMat trans_out;            // sigma(trans_pre)
  Eigen::MatrixXi argmax_re;  // winning source node per (u, d)
  Eigen::MatrixXi argmax_im;
};

CMat mean_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
               const Eigen::VectorXd& bias, Activation activation, StepTrace* trace);

CMat max_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
              const Eigen::VectorXd& bias, Activation activation, StepTrace* trace);

CMat aggregation_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
                      const Eigen::VectorXd& bias, AggregatorKind kind, Activation activation,
                      StepTrace* trace);

// Accumulates into g_weight / g_bias / g_prev.
void mean_step_backward(const StepTrace& trace, const Topology& topology,
                        const Eigen::MatrixXd& weight, Activation activation, const CMat& g_out,
                        CMat& g_prev, Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias);

void max_step_backward(const StepTrace& trace, const CMat& prev, const Topology& topology,
                       const Eigen::MatrixXd& weight, Activation activation, const CMat& g_out,
                       CMat& g_prev, Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias);

void aggregation_step_backward(const StepTrace& trace, const CMat& prev, const Topology& topology,
                               const Eigen::MatrixXd& weight, AggregatorKind kind,
                               Activation activation, const CMat& g_out, CMat& g_prev,
                               Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias);

struct CnTrace {
  Eigen::MatrixXd normalized;  // row-wise centered/normalized
  Eigen::VectorXd mean;
  Eigen::VectorXd sdev;        // sample std, divisor D-1
};

// Row-wise centering-normalizing; rows with sdev < epsilon become zero.
Eigen::MatrixXd cn_rows(const Eigen::MatrixXd& z, double epsilon, CnTrace* trace);
// Returns d(loss)/d(z) given d(loss)/d(normalized).
Eigen::MatrixXd cn_rows_backward(const CnTrace& trace, const Eigen::MatrixXd& g_norm,
                                 double epsilon);

// S = C * diag(theta) * C^T.
Eigen::MatrixXd sim_time_forward(const Eigen::MatrixXd& normalized, const Eigen::VectorXd& theta);
void sim_time_backward(const Eigen::MatrixXd& normalized, const Eigen::VectorXd& theta,
                       const Eigen::MatrixXd& g_s, Eigen::MatrixXd& g_normalized,
                       Eigen::VectorXd& g_theta);

struct WelchTrace {
  std::vector<Eigen::MatrixXcd> cross;  // per bin: the complex sums before |.|
};

// omega[w](u, v) = |sum_t part[u](t, w) * conj(part[v](t, w))|.
std::vector<Eigen::MatrixXd> welch_forward(const SpectrumTensor& part, WelchTrace* trace);
// Accumulates the complex adjoint (d/d_re + i*d/d_im) into g_part.
void welch_backward(const SpectrumTensor& part, const WelchTrace& trace,
                    const std::vector<Eigen::MatrixXd>& g_omega, SpectrumTensor& g_part);

// loss(S) = -sum_v [ sum_{u in N(v)} S(u,v) - |N(v)| * logsumexp_u S(u,v) ].
// When g_s is non-null it receives d(loss)/d(S).
double loss_from_similarity(const Eigen::MatrixXd& s, const Topology& topology,
                            Eigen::MatrixXd* g_s);

}  // namespace ncdd::detail

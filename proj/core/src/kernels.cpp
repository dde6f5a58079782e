#include "kernels.hpp"

#include <cmath>

#include "ncdd/error.hpp"

namespace ncdd::detail {

CMat split_channels(const Eigen::MatrixXcd& m) {
  CMat out;
  out.re = m.real();
  Eigen::MatrixXd im = m.imag();
  out.has_im = !im.isZero(0.0);
  if (out.has_im) out.im = std::move(im);
  return out;
}

Eigen::MatrixXcd join_channels(const CMat& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  if (m.has_im) {
    out.real() = m.re;
    out.imag() = m.im;
  } else {
    out.real() = m.re;
    out.imag().setZero();
  }
  return out;
}

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& pre, Activation activation) {
  if (activation == Activation::kRelu) {
    return pre.cwiseMax(0.0);
  }
  // Softmax over each node's feature vector, max-subtracted.
  Eigen::MatrixXd out(pre.rows(), pre.cols());
  for (Eigen::Index u = 0; u < pre.rows(); ++u) {
    const double m = pre.row(u).maxCoeff();
    Eigen::ArrayXd e = (pre.row(u).array() - m).exp();
    out.row(u) = (e / e.sum()).matrix();
  }
  return out;
}

Eigen::MatrixXd activation_backward(const Eigen::MatrixXd& g_out, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& out, Activation activation) {
  if (activation == Activation::kRelu) {
    return (pre.array() > 0.0).select(g_out, Eigen::MatrixXd::Zero(pre.rows(), pre.cols()));
  }
  Eigen::MatrixXd g_pre(pre.rows(), pre.cols());
  for (Eigen::Index u = 0; u < pre.rows(); ++u) {
    const double dot = g_out.row(u).dot(out.row(u));
    g_pre.row(u) =
        out.row(u).cwiseProduct(g_out.row(u) - Eigen::RowVectorXd::Constant(pre.cols(), dot));
  }
  return g_pre;
}

namespace {

Eigen::MatrixXd neighbour_mean(const Eigen::MatrixXd& h, const Topology& topology) {
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  for (int u = 0; u < topology.n_nodes(); ++u) {
    for (int v : topology.neighbours(u)) agg.row(u) += h.row(v);
    agg.row(u) /= static_cast<double>(topology.degree(u));
  }
  return agg;
}

// Transpose of neighbour_mean: scatters row u scaled by 1/|N(u)| to its neighbours.
void neighbour_mean_backward(const Eigen::MatrixXd& g_agg, const Topology& topology,
                             Eigen::MatrixXd& g_h) {
  for (int u = 0; u < topology.n_nodes(); ++u) {
    const double inv = 1.0 / static_cast<double>(topology.degree(u));
    for (int v : topology.neighbours(u)) g_h.row(v) += inv * g_agg.row(u);
  }
}

void max_reduce(const Eigen::MatrixXd& trans, const Topology& topology, Eigen::MatrixXd& out,
                Eigen::MatrixXi& argmax) {
  const int n = topology.n_nodes();
  const Eigen::Index d0 = trans.cols();
  out.resize(n, d0);
  argmax.resize(n, d0);
  for (int u = 0; u < n; ++u) {
    const auto& nbrs = topology.neighbours(u);
    out.row(u) = trans.row(nbrs[0]);
    argmax.row(u).setConstant(nbrs[0]);
    for (std::size_t j = 1; j < nbrs.size(); ++j) {
      const int v = nbrs[j];
      for (Eigen::Index d = 0; d < d0; ++d) {
        if (trans(v, d) > out(u, d)) {
          out(u, d) = trans(v, d);
          argmax(u, d) = v;
        }
      }
    }
  }
}

}  // namespace

CMat mean_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
               const Eigen::VectorXd& bias, Activation activation, StepTrace* trace) {
  CMat agg;
  agg.has_im = prev.has_im;
  agg.re = neighbour_mean(prev.re, topology);
  if (prev.has_im) agg.im = neighbour_mean(prev.im, topology);

  CMat pre;
  pre.has_im = prev.has_im;
  pre.re = agg.re * weight.transpose();
  pre.re.rowwise() += bias.transpose();
  if (prev.has_im) pre.im = agg.im * weight.transpose();

  CMat out;
  out.has_im = prev.has_im;
  out.re = apply_activation(pre.re, activation);
  if (prev.has_im) out.im = apply_activation(pre.im, activation);

  if (trace) {
    trace->agg = agg;
    trace->pre = pre;
    trace->out = out;
  }
  return out;
}

CMat max_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
              const Eigen::VectorXd& bias, Activation activation, StepTrace* trace) {
  CMat trans_pre;
  trans_pre.has_im = prev.has_im;
  trans_pre.re = prev.re * weight.transpose();
  trans_pre.re.rowwise() += bias.transpose();
  if (prev.has_im) trans_pre.im = prev.im * weight.transpose();

  CMat trans_out;
  trans_out.has_im = prev.has_im;
  trans_out.re = apply_activation(trans_pre.re, activation);
  if (prev.has_im) trans_out.im = apply_activation(trans_pre.im, activation);

  CMat out;
  out.has_im = prev.has_im;
  Eigen::MatrixXi argmax_re, argmax_im;
  max_reduce(trans_out.re, topology, out.re, argmax_re);
  if (prev.has_im) max_reduce(trans_out.im, topology, out.im, argmax_im);

  if (trace) {
    trace->trans_pre = trans_pre;
    trace->trans_out = trans_out;
    trace->out = out;
    trace->argmax_re = argmax_re;
    trace->argmax_im = argmax_im;
  }
  return out;
}

CMat aggregation_step(const CMat& prev, const Topology& topology, const Eigen::MatrixXd& weight,
                      const Eigen::VectorXd& bias, AggregatorKind kind, Activation activation,
                      StepTrace* trace) {
  return kind == AggregatorKind::kMean
             ? mean_step(prev, topology, weight, bias, activation, trace)
             : max_step(prev, topology, weight, bias, activation, trace);
}

void mean_step_backward(const StepTrace& trace, const Topology& topology,
                        const Eigen::MatrixXd& weight, Activation activation, const CMat& g_out,
                        CMat& g_prev, Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias) {
  const Eigen::MatrixXd g_pre_re =
      activation_backward(g_out.re, trace.pre.re, trace.out.re, activation);
  g_weight += g_pre_re.transpose() * trace.agg.re;
  g_bias += g_pre_re.colwise().sum().transpose();
  neighbour_mean_backward(g_pre_re * weight, topology, g_prev.re);
  if (g_out.has_im) {
    const Eigen::MatrixXd g_pre_im =
        activation_backward(g_out.im, trace.pre.im, trace.out.im, activation);
    g_weight += g_pre_im.transpose() * trace.agg.im;
    neighbour_mean_backward(g_pre_im * weight, topology, g_prev.im);
  }
}

void max_step_backward(const StepTrace& trace, const CMat& prev, const Topology& topology,
                       const Eigen::MatrixXd& weight, Activation activation, const CMat& g_out,
                       CMat& g_prev, Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias) {
  const int n = topology.n_nodes();
  const Eigen::Index d0 = g_out.re.cols();

  Eigen::MatrixXd g_trans_re = Eigen::MatrixXd::Zero(n, d0);
  for (int u = 0; u < n; ++u)
    for (Eigen::Index d = 0; d < d0; ++d) g_trans_re(trace.argmax_re(u, d), d) += g_out.re(u, d);
  const Eigen::MatrixXd g_pre_re =
      activation_backward(g_trans_re, trace.trans_pre.re, trace.trans_out.re, activation);
  g_weight += g_pre_re.transpose() * prev.re;
  g_bias += g_pre_re.colwise().sum().transpose();
  g_prev.re += g_pre_re * weight;

  if (g_out.has_im) {
    Eigen::MatrixXd g_trans_im = Eigen::MatrixXd::Zero(n, d0);
    for (int u = 0; u < n; ++u)
      for (Eigen::Index d = 0; d < d0; ++d) g_trans_im(trace.argmax_im(u, d), d) += g_out.im(u, d);
    const Eigen::MatrixXd g_pre_im =
        activation_backward(g_trans_im, trace.trans_pre.im, trace.trans_out.im, activation);
    g_weight += g_pre_im.transpose() * prev.im;
    g_prev.im += g_pre_im * weight;
  }
}

void aggregation_step_backward(const StepTrace& trace, const CMat& prev, const Topology& topology,
                               const Eigen::MatrixXd& weight, AggregatorKind kind,
                               Activation activation, const CMat& g_out, CMat& g_prev,
                               Eigen::MatrixXd& g_weight, Eigen::VectorXd& g_bias) {
  if (kind == AggregatorKind::kMean) {
    mean_step_backward(trace, topology, weight, activation, g_out, g_prev, g_weight, g_bias);
  } else {
    max_step_backward(trace, prev, topology, weight, activation, g_out, g_prev, g_weight, g_bias);
  }
}

Eigen::MatrixXd cn_rows(const Eigen::MatrixXd& z, double epsilon, CnTrace* trace) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  if (d < 2) fail(ErrorCode::kPreconditionViolated, "center_normalize needs at least 2 components");
  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd mean(n), sdev(n);
  for (Eigen::Index u = 0; u < n; ++u) {
    const double m = z.row(u).mean();
    const Eigen::RowVectorXd w = z.row(u).array() - m;
    const double s = std::sqrt(w.squaredNorm() / static_cast<double>(d - 1));
    mean(u) = m;
    sdev(u) = s;
    if (s < epsilon) {
      out.row(u).setZero();
    } else {
      out.row(u) = w / s;
    }
  }
  if (trace) {
    trace->normalized = out;
    trace->mean = mean;
    trace->sdev = sdev;
  }
  return out;
}

Eigen::MatrixXd cn_rows_backward(const CnTrace& trace, const Eigen::MatrixXd& g_norm,
                                 double epsilon) {
  const Eigen::Index n = g_norm.rows();
  const Eigen::Index d = g_norm.cols();
  Eigen::MatrixXd g_z = Eigen::MatrixXd::Zero(n, d);
  for (Eigen::Index u = 0; u < n; ++u) {
    const double s = trace.sdev(u);
    if (s < epsilon) continue;  // constant row mapped to zero: flat locally
    const Eigen::RowVectorXd g = g_norm.row(u);
    const Eigen::RowVectorXd c = trace.normalized.row(u);
    const double g_mean = g.mean();
    const double g_dot_c = g.dot(c);
    g_z.row(u) =
        (g.array() - g_mean).matrix() / s - c * (g_dot_c / (static_cast<double>(d - 1) * s));
  }
  return g_z;
}

Eigen::MatrixXd sim_time_forward(const Eigen::MatrixXd& normalized, const Eigen::VectorXd& theta) {
  return normalized * theta.asDiagonal() * normalized.transpose();
}

void sim_time_backward(const Eigen::MatrixXd& normalized, const Eigen::VectorXd& theta,
                       const Eigen::MatrixXd& g_s, Eigen::MatrixXd& g_normalized,
                       Eigen::VectorXd& g_theta) {
  const Eigen::MatrixXd t1 = g_s * normalized;  // t1(u, d) = sum_v g_s(u,v) C(v,d)
  g_theta += normalized.cwiseProduct(t1).colwise().sum().transpose();
  g_normalized += (g_s + g_s.transpose()) * normalized * theta.asDiagonal();
}

std::vector<Eigen::MatrixXd> welch_forward(const SpectrumTensor& part, WelchTrace* trace) {
  const int n = static_cast<int>(part.size());
  const Eigen::Index t_inner = part.empty() ? 0 : part[0].rows();
  const Eigen::Index w_bins = part.empty() ? 0 : part[0].cols();
  std::vector<Eigen::MatrixXd> omega(static_cast<std::size_t>(w_bins));
  if (trace) trace->cross.assign(static_cast<std::size_t>(w_bins), Eigen::MatrixXcd());
  for (Eigen::Index w = 0; w < w_bins; ++w) {
    Eigen::MatrixXcd cross(n, n);
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index t = 0; t < t_inner; ++t) acc += part[u](t, w) * std::conj(part[v](t, w));
        cross(u, v) = acc;
      }
    }
    omega[w] = cross.cwiseAbs();
    if (trace) trace->cross[w] = std::move(cross);
  }
  return omega;
}

void welch_backward(const SpectrumTensor& part, const WelchTrace& trace,
                    const std::vector<Eigen::MatrixXd>& g_omega, SpectrumTensor& g_part) {
  const int n = static_cast<int>(part.size());
  const Eigen::Index t_inner = part.empty() ? 0 : part[0].rows();
  const Eigen::Index w_bins = part.empty() ? 0 : part[0].cols();
  for (Eigen::Index w = 0; w < w_bins; ++w) {
    const Eigen::MatrixXcd& cross = trace.cross[w];
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        const double mag = std::abs(cross(u, v));
        if (mag == 0.0) continue;  // |.| subgradient at 0
        const std::complex<double> g =
            (g_omega[w](u, v) / mag) * cross(u, v);  // (d/d_re + i d/d_im) of the sum
        for (Eigen::Index t = 0; t < t_inner; ++t) {
          g_part[u](t, w) += g * part[v](t, w);
          g_part[v](t, w) += std::conj(g) * part[u](t, w);
        }
      }
    }
  }
}

double loss_from_similarity(const Eigen::MatrixXd& s, const Topology& topology,
                            Eigen::MatrixXd* g_s) {
  const int n = topology.n_nodes();
  double total = 0.0;
  if (g_s) g_s->setZero(n, n);
  for (int v = 0; v < n; ++v) {
    const double m = s.col(v).maxCoeff();
    const Eigen::ArrayXd e = (s.col(v).array() - m).exp();
    const double z = e.sum();
    const double lse = m + std::log(z);
    double edge_sum = 0.0;
    for (int u : topology.neighbours(v)) edge_sum += s(u, v);
    const double deg = static_cast<double>(topology.degree(v));
    total -= edge_sum - deg * lse;
    if (g_s) {
      g_s->col(v) += deg * (e / z).matrix();
      for (int u : topology.neighbours(v)) (*g_s)(u, v) -= 1.0;
    }
  }
  return total;
}

}  // namespace ncdd::detail

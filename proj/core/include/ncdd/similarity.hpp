#pragma once

#include <vector>

#include "ncdd/features.hpp"
#include "ncdd/types.hpp"

namespace ncdd {

/// Guard against zero-variance vectors in center_normalize.
struct CnEpsilon {
  double value = 1e-12;
};

/// Weights mapping embeddings to similarities. Time domain: one weight per
/// embedding component (length D = 2*D0). Frequency domain: one weight per
/// frequency bin and embedding half (theta_a for the initial half, theta_b
/// for the hidden half, each of length W).
struct SimilarityParams {
  Domain domain = Domain::kTime;
  Eigen::VectorXd theta;
  Eigen::VectorXd theta_a;
  Eigen::VectorXd theta_b;
};

/// (v - mean) / sample_std with divisor D-1; the zero vector when
/// sample_std < epsilon.
Eigen::VectorXd center_normalize(const Eigen::VectorXd& v, double epsilon);

/// S[u][v] = sum_d theta_d * cn(z_u)_d * cn(z_v)_d, a weighted correlation of
/// the row-normalized embeddings. Embeddings must be real (time domain).
SimilarityMatrix similarity_time(const EmbeddingSet& embeddings, const Eigen::VectorXd& theta,
                                 CnEpsilon epsilon);

/// Welch cross-spectrum of one embedding half:
/// result[w](u, v) = | sum_t part[u](t, w) * conj(part[v](t, w)) |.
/// Nonnegative and symmetric in (u, v).
std::vector<Eigen::MatrixXd> welch_cross_spectrum(const SpectrumTensor& part);

/// Devectorizes both embedding halves into inner_windows x W spectra and
/// returns S = sum_w theta_a[w]*Omega_a[w] + theta_b[w]*Omega_b[w].
/// Throws DimensionError when D0 is not divisible by inner_windows.
SimilarityMatrix similarity_frequency(const EmbeddingSet& embeddings,
                                      const Eigen::VectorXd& theta_a,
                                      const Eigen::VectorXd& theta_b, int inner_windows);

}  // namespace ncdd

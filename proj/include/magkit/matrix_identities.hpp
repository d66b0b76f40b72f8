#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>
#include <Eigen/QR>

#include "magkit/embedding.hpp"
#include "magkit/pairs.hpp"

namespace magkit {

/// Moore-Penrose pseudoinverse of a symmetric matrix; eigenvalues with
/// |mu| <= tol.pinv * max|mu| count as zero.
inline Matrix pseudoinverse_symmetric(const Matrix& k, const Tolerances& tol = {}) {
  const Index n = k.rows();
  if (n == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const Vector& mu = es.eigenvalues();
  const double top = mu.cwiseAbs().maxCoeff();
  Matrix out = Matrix::Zero(n, n);
  if (top == 0.0) return out;
  const Matrix& v = es.eigenvectors();
  for (Index i = 0; i < n; ++i) {
    if (std::abs(mu(i)) > tol.pinv * top) {
      out.noalias() += (v.col(i) / mu(i)) * v.col(i).transpose();
    }
  }
  return 0.5 * (out + out.transpose());
}

/// K^dagger for a centred similarity matrix K. The constant vector is in the
/// kernel by construction, so it is projected out exactly (through an
/// orthonormal basis Q of its complement) instead of being left to the rank
/// cutoff, where rounding noise could pass for a tiny genuine eigenvalue.
inline Matrix pseudoinverse_centered(const Matrix& k, const Tolerances& tol = {}) {
  const Index n = k.rows();
  if (n <= 1) return Matrix::Zero(n, n);
  const Matrix full_q = Eigen::HouseholderQR<Matrix>(Matrix::Ones(n, 1)).householderQ();
  const Matrix q = full_q.rightCols(n - 1);
  const Matrix reduced = q.transpose() * k * q;
  const Matrix out = q * pseudoinverse_symmetric(0.5 * (reduced + reduced.transpose()), tol) *
                     q.transpose();
  return 0.5 * (out + out.transpose());
}

/// gamma = diag(K) - 1/2.
inline Vector gamma_vector(const Matrix& k) {
  return k.diagonal().array() - 0.5;
}

/// Coefficients of the pseudoinverse centred similarity matrix:
/// c_ij = -Kdag_ij (i != j), cbar_i = Kdag_ii, gamma = diag(K) - 1/2.
struct CoefficientData {
  Matrix z;
  Matrix kdag;
  Vector cbar;
  Vector gamma;

  std::size_t size() const { return static_cast<std::size_t>(kdag.rows()); }
  double c(std::size_t i, std::size_t j) const {
    return -kdag(static_cast<Index>(i), static_cast<Index>(j));
  }
};

inline CoefficientData coefficients_from_similarity(const Matrix& z,
                                                    const Tolerances& tol = {}) {
  CoefficientData out;
  out.z = z;
  const Matrix k = centered_similarity(z);
  out.kdag = pseudoinverse_centered(k, tol);
  out.cbar = out.kdag.diagonal();
  out.gamma = gamma_vector(k);
  return out;
}

inline CoefficientData coefficients(const MetricSpace& space,
                                    const Tolerances& tol = {}) {
  return coefficients_from_similarity(similarity_matrix(space), tol);
}

/// Weighting and magnitude of a space with invertible Z and nonzero
/// magnitude, the shared hypothesis of the bordered-inverse identities.
struct InvertibleData {
  Matrix z;
  Matrix z_inverse;
  Vector w;
  double magnitude = 0.0;
};

inline InvertibleData require_invertible_nonzero(const Matrix& z,
                                                 const Tolerances& tol = {}) {
  if (classify_definiteness(z, tol) == Definiteness::Singular) {
    throw Error(ErrorCode::SingularZ, "similarity matrix is singular");
  }
  InvertibleData d;
  d.z = z;
  d.z_inverse = z.partialPivLu().inverse();
  d.z_inverse = 0.5 * (d.z_inverse + d.z_inverse.transpose()).eval();
  d.w = z.partialPivLu().solve(Vector::Ones(z.rows()));
  d.magnitude = d.w.sum();
  if (!(std::abs(d.magnitude) > tol.strict)) {
    throw Error(ErrorCode::ZeroMagnitude, "magnitude is zero");
  }
  return d;
}

struct FiedlerBapatBlock {
  Matrix bordered;       // [[0, 1^T], [1, Z]]
  Matrix inverse_block;  // [[-1/|X|, w^T/|X|], [w/|X|, Kdag/2]]

  double product_residual() const {
    const Index m = bordered.rows();
    return (bordered * inverse_block - Matrix::Identity(m, m))
        .lpNorm<Eigen::Infinity>();
  }
};

inline Matrix bordered_matrix(const Matrix& z) {
  const Index n = z.rows();
  Matrix b(n + 1, n + 1);
  b(0, 0) = 0.0;
  b.block(0, 1, 1, n).setOnes();
  b.block(1, 0, n, 1).setOnes();
  b.bottomRightCorner(n, n) = z;
  return b;
}

inline FiedlerBapatBlock fiedler_bapat_block_from_similarity(
    const Matrix& z, const Tolerances& tol = {}) {
  const InvertibleData inv = require_invertible_nonzero(z, tol);
  const Index n = z.rows();
  const Matrix kdag = pseudoinverse_centered(centered_similarity(z), tol);
  FiedlerBapatBlock fb;
  fb.bordered = bordered_matrix(z);
  fb.inverse_block.resize(n + 1, n + 1);
  fb.inverse_block(0, 0) = -1.0 / inv.magnitude;
  fb.inverse_block.block(0, 1, 1, n) = inv.w.transpose() / inv.magnitude;
  fb.inverse_block.block(1, 0, n, 1) = inv.w / inv.magnitude;
  fb.inverse_block.bottomRightCorner(n, n) = 0.5 * kdag;
  return fb;
}

/// Both sides of the bordered-inverse identity for Z invertible with
/// nonzero magnitude (not only positive definite spaces).
inline FiedlerBapatBlock fiedler_bapat_block(const MetricSpace& space,
                                             const Tolerances& tol = {}) {
  return fiedler_bapat_block_from_similarity(similarity_matrix(space), tol);
}

/// |X| = -det([[0, 1^T], [1, Z]]) / det(Z), both determinants by LU with
/// partial pivoting. A verification path only: accuracy degrades for large n.
inline double magnitude_via_determinant(const MetricSpace& space,
                                        const Tolerances& tol = {}) {
  const Matrix z = similarity_matrix(space);
  require_positive_definite(z, tol, "magnitude_via_determinant");
  return -bordered_matrix(z).partialPivLu().determinant() /
         z.partialPivLu().determinant();
}

struct InterlacingReport {
  Vector lambda;  // eigenvalues of Z, descending
  Vector mu;      // eigenvalues of K without one centring zero, descending
  bool applicable = true;  // false when Z is singular: informational only
  bool chain_holds = false;
  double max_chain_violation = 0.0;
  bool homogeneous = false;
  std::optional<bool> equality_holds;
  double max_equality_deviation = 0.0;
};

/// lambda_1 >= 2 mu_1 >= lambda_2 >= ... >= 2 mu_{n-1} >= lambda_n, with
/// equality (apart from the eigenvalue of the constant vector) for spaces
/// where Z 1 is a multiple of 1.
inline InterlacingReport interlacing_check(const MetricSpace& space,
                                           double slack = 1e-12,
                                           const Tolerances& tol = {}) {
  const Matrix z = similarity_matrix(space);
  const Index n = z.rows();
  InterlacingReport r;
  r.lambda = sorted_eigenvalues(z);
  r.applicable = classify_definiteness_from_eigenvalues(r.lambda, tol) !=
                 Definiteness::Singular;

  Vector mu_all = sorted_eigenvalues(centered_similarity(z));
  Index drop = 0;
  for (Index i = 1; i < n; ++i) {
    if (std::abs(mu_all(i)) < std::abs(mu_all(drop))) drop = i;
  }
  r.mu.resize(n - 1);
  for (Index i = 0, o = 0; i < n; ++i) {
    if (i != drop) r.mu(o++) = mu_all(i);
  }

  const double scaled_slack = slack * std::max(1.0, std::abs(r.lambda(0)));
  double worst = 0.0;
  for (Index i = 0; i + 1 < n; ++i) {
    worst = std::max(worst, 2.0 * r.mu(i) - r.lambda(i));
    worst = std::max(worst, r.lambda(i + 1) - 2.0 * r.mu(i));
  }
  r.max_chain_violation = worst;
  r.chain_holds = worst <= scaled_slack;

  const Vector row_sums = z.rowwise().sum();
  const double mean = row_sums.mean();
  r.homogeneous = (row_sums.array() - mean).abs().maxCoeff() <= tol.homogeneity;
  if (r.homogeneous) {
    // drop the eigenvalue belonging to the constant eigenvector (= mean row sum)
    Index skip = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(r.lambda(i) - mean) < std::abs(r.lambda(skip) - mean)) skip = i;
    }
    double dev = 0.0;
    for (Index i = 0, o = 0; i < n; ++i) {
      if (i == skip) continue;
      dev = std::max(dev, std::abs(2.0 * r.mu(o++) - r.lambda(i)));
    }
    r.max_equality_deviation = dev;
    r.equality_holds = dev <= 1e-10 * std::max(1.0, std::abs(r.lambda(0)));
  }
  return r;
}

/// Magnitude and weighting written through the coefficients c.
struct CoefficientSums {
  Vector normalized_weighting;          // w_i/|X| = 1 - 1/2 sum_j c_ij (1 - z_ij)
  Vector inverse_magnitude_per_anchor;  // 1 - 1/2 sum_pairs c_ij (z_ix - z_jx)^2
  double inverse_magnitude_trace = 0.0; // tr(I - Z Kdag Z / 2) / n
  double foster_sum = 0.0;              // sum_pairs c_ij (1 - z_ij), equals n - 1
};

inline CoefficientSums magnitude_weighting_via_c(const MetricSpace& space,
                                                 const Tolerances& tol = {}) {
  const Matrix z = similarity_matrix(space);
  require_invertible_nonzero(z, tol);
  const CoefficientData cd = coefficients_from_similarity(z, tol);
  const std::size_t n = cd.size();
  const auto ni = static_cast<Index>(n);

  CoefficientSums out;
  out.normalized_weighting = Vector::Ones(ni);
  for_each_pair(n, [&](std::size_t i, std::size_t j) {
    const double term = 0.5 * cd.c(i, j) *
                        (1.0 - z(static_cast<Index>(i), static_cast<Index>(j)));
    out.normalized_weighting(static_cast<Index>(i)) -= term;
    out.normalized_weighting(static_cast<Index>(j)) -= term;
  });

  out.inverse_magnitude_per_anchor.resize(ni);
  for (Index x = 0; x < ni; ++x) {
    out.inverse_magnitude_per_anchor(x) =
        1.0 - 0.5 * pair_sum(n, [&](std::size_t i, std::size_t j) {
          const double diff = z(static_cast<Index>(i), x) - z(static_cast<Index>(j), x);
          return cd.c(i, j) * diff * diff;
        });
  }

  const Matrix inner = Matrix::Identity(ni, ni) - 0.5 * z * cd.kdag * z;
  out.inverse_magnitude_trace = inner.trace() / static_cast<double>(n);
  out.foster_sum = pair_sum(n, [&](std::size_t i, std::size_t j) {
    return cd.c(i, j) * (1.0 - z(static_cast<Index>(i), static_cast<Index>(j)));
  });
  return out;
}

struct ResidualEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;

  bool all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ResidualEntry& e) { return e.pass; });
  }
  double max_residual() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.residual);
    return m;
  }
  const ResidualEntry* find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

/// Max-norm residuals of the matrix identities linking Z, K, Kdag, w and
/// |X|. Requires Z invertible with nonzero magnitude.
inline ResidualReport identity_residuals(const MetricSpace& space,
                                         double tolerance = 1e-9,
                                         const Tolerances& tol = {}) {
  const Matrix z = similarity_matrix(space);
  const InvertibleData inv = require_invertible_nonzero(z, tol);
  const Index n = z.rows();
  const double nd = static_cast<double>(n);
  const Matrix k = centered_similarity(z);
  const Matrix kdag = pseudoinverse_centered(k, tol);
  const Vector gamma = gamma_vector(k);
  const Vector ones = Vector::Ones(n);
  const Matrix id = Matrix::Identity(n, n);
  const double mag = inv.magnitude;
  const Vector& w = inv.w;

  ResidualReport rep;
  auto add = [&](std::string name, double value) {
    rep.entries.push_back({std::move(name), value, tolerance, value <= tolerance});
  };
  auto maxabs = [](const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; };

  add("zk_dagger", maxabs(z * kdag - (2.0 * id - 2.0 * ones * w.transpose() / mag)));
  add("two_k_minus_z",
      maxabs(2.0 * k - z - (gamma * ones.transpose() + ones * gamma.transpose())));
  const Vector gamma_alt =
      -z * ones / nd + Vector::Constant(n, ones.dot(z * ones) / (2.0 * nd * nd));
  add("gamma_forms", maxabs(gamma - gamma_alt));
  add("inverse_difference",
      maxabs(2.0 * inv.z_inverse - kdag - 2.0 * w * w.transpose() / mag));
  add("weighting_via_gamma",
      maxabs(w / mag - (0.5 * kdag * gamma + ones / nd)));
  add("inverse_magnitude_via_gamma",
      std::abs(1.0 / mag - (-0.5 * gamma.dot(kdag * gamma) - 2.0 / nd * gamma.sum())));

  add("penrose_kkk", maxabs(k * kdag * k - k));
  add("penrose_ddk", maxabs(kdag * k * kdag - kdag));
  const Matrix kk = k * kdag;
  const Matrix dk = kdag * k;
  add("penrose_sym_left", maxabs(kk - kk.transpose()));
  add("penrose_sym_right", maxabs(dk - dk.transpose()));

  const FiedlerBapatBlock fb = fiedler_bapat_block_from_similarity(z, tol);
  add("fiedler_bapat", fb.product_residual());

  const CoefficientSums cs = magnitude_weighting_via_c(space, tol);
  add("weighting_via_c", maxabs(cs.normalized_weighting - w / mag));
  add("inverse_magnitude_anchor",
      maxabs(cs.inverse_magnitude_per_anchor.array() - 1.0 / mag));
  add("inverse_magnitude_trace", std::abs(cs.inverse_magnitude_trace - 1.0 / mag));
  add("foster_sum", std::abs(cs.foster_sum - (nd - 1.0)));

  const InterlacingReport il = interlacing_check(space, 1e-12, tol);
  add("interlacing", il.max_chain_violation > 0.0 ? il.max_chain_violation : 0.0);
  return rep;
}

}  // namespace magkit

#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "magkit/metric_space.hpp"

namespace magkit {

enum class Definiteness { PositiveDefinite, InvertibleIndefinite, Singular };

constexpr std::string_view to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::InvertibleIndefinite: return "InvertibleIndefinite";
    case Definiteness::Singular: return "Singular";
  }
  return "Unknown";
}

/// z_ij = exp(-d(i,j)).
inline Matrix similarity_matrix(const MetricSpace& space) {
  Matrix z = (-space.distances().array()).exp().matrix();
  z.diagonal().setOnes();
  return z;
}

/// Eigenvalues of a symmetric matrix in descending order.
inline Vector sorted_eigenvalues(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

inline double pd_cutoff(const Vector& eigenvalues_desc, const Tolerances& tol) {
  const double top = eigenvalues_desc.size() ? eigenvalues_desc(0) : 0.0;
  return tol.pd * std::max(1.0, top);
}

inline Definiteness classify_definiteness_from_eigenvalues(
    const Vector& eigenvalues_desc, const Tolerances& tol = {}) {
  const double eps = pd_cutoff(eigenvalues_desc, tol);
  if ((eigenvalues_desc.array().abs() <= eps).any()) {
    return Definiteness::Singular;
  }
  if (eigenvalues_desc(eigenvalues_desc.size() - 1) > eps) {
    return Definiteness::PositiveDefinite;
  }
  return Definiteness::InvertibleIndefinite;
}

/// PositiveDefinite iff lambda_min > eps_pd; Singular iff some |lambda| <= eps_pd.
inline Definiteness classify_definiteness(const Matrix& z,
                                          const Tolerances& tol = {}) {
  return classify_definiteness_from_eigenvalues(sorted_eigenvalues(z), tol);
}

namespace detail {

// Minimum-norm solution of Z w = 1 through the eigendecomposition, dropping
// eigenvalues with |lambda| <= eps_pd. Returns nullopt when the system is
// inconsistent.
inline std::optional<Vector> min_norm_weighting(const Matrix& z,
                                                const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(z);
  const Vector& lambda = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  const double eps = tol.pd * std::max(1.0, lambda.maxCoeff());
  const Vector proj = v.transpose() * Vector::Ones(z.rows());
  Vector coeff = Vector::Zero(z.rows());
  for (Index k = 0; k < lambda.size(); ++k) {
    if (std::abs(lambda(k)) > eps) coeff(k) = proj(k) / lambda(k);
  }
  Vector w = v * coeff;
  const double residual =
      (z * w - Vector::Ones(z.rows())).lpNorm<Eigen::Infinity>();
  if (!(residual <= tol.residual)) return std::nullopt;
  return w;
}

}  // namespace detail

/// A weighting: a solution of Z w = 1. Cholesky when Z is positive definite,
/// otherwise the minimum-norm solution; nullopt when none exists.
inline std::optional<Vector> weighting(const Matrix& z,
                                       const Tolerances& tol = {}) {
  if (classify_definiteness(z, tol) == Definiteness::PositiveDefinite) {
    Eigen::LLT<Matrix> llt(z);
    if (llt.info() == Eigen::Success) {
      return Vector(llt.solve(Vector::Ones(z.rows())));
    }
  }
  return detail::min_norm_weighting(z, tol);
}

struct SimilarityData {
  Matrix z;
  Vector eigenvalues;  // descending
  std::optional<Vector> weighting;
  std::optional<double> magnitude;
  Definiteness definiteness = Definiteness::Singular;

  std::size_t size() const { return static_cast<std::size_t>(z.rows()); }
};

inline SimilarityData analyze_similarity(const Matrix& z,
                                         const Tolerances& tol = {}) {
  SimilarityData data;
  data.z = z;
  data.eigenvalues = sorted_eigenvalues(z);
  data.definiteness = classify_definiteness_from_eigenvalues(data.eigenvalues, tol);
  if (data.definiteness == Definiteness::PositiveDefinite) {
    Eigen::LLT<Matrix> llt(z);
    if (llt.info() == Eigen::Success) {
      data.weighting = Vector(llt.solve(Vector::Ones(z.rows())));
    }
  }
  if (!data.weighting) data.weighting = detail::min_norm_weighting(z, tol);
  if (data.weighting) data.magnitude = data.weighting->sum();
  return data;
}

inline SimilarityData analyze(const MetricSpace& space,
                              const Tolerances& tol = {}) {
  return analyze_similarity(similarity_matrix(space), tol);
}

/// |X| = 1^T w, or nullopt when no weighting exists.
inline std::optional<double> magnitude(const MetricSpace& space,
                                       const Tolerances& tol = {}) {
  return analyze(space, tol).magnitude;
}

/// Throws NotPositiveDefinite unless Z is positive definite.
inline void require_positive_definite(const Matrix& z, const Tolerances& tol,
                                      std::string_view what) {
  if (classify_definiteness(z, tol) != Definiteness::PositiveDefinite) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(what) + " requires a positive definite space");
  }
}

}  // namespace magkit

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "magkit/magnitude.hpp"
#include "magkit/parallel.hpp"

namespace magkit {

/// K = 1/2 (I - 11^T/n) Z (I - 11^T/n), formed by double centering.
inline Matrix centered_similarity(const Matrix& z) {
  const double n = static_cast<double>(z.rows());
  const Vector row_mean = z.rowwise().sum() / n;
  const double grand_mean = row_mean.sum() / n;
  Matrix k = z;
  k.colwise() -= row_mean;
  k.rowwise() -= row_mean.transpose();
  k.array() += grand_mean;
  k *= 0.5;
  return 0.5 * (k + k.transpose());
}

/// Circumsphere of the similarity embedding, described intrinsically:
/// barycentric circumcenter p (1^T p = 1) and radius R, with
/// deficit = (n-1)/n - 2R^2 kept separately because it carries the
/// significant digits once R approaches the regular-simplex value.
struct Circumsphere {
  double radius = 0.0;
  double radius_squared = 0.0;
  double deficit = 0.0;
  Vector barycentric;
};

/// Solves the equilibrium system Z p = (1 - 2r^2) 1, 1^T p = 1, written
/// around the centroid: p = 1/n + u, 1 - 2r^2 = 1/n + v, so that
///   Z u - v 1 = -(Z - I) 1 / n,   1^T u = 0.
inline Circumsphere circumradius_equilibrium(const Matrix& z,
                                             const Tolerances& tol = {}) {
  require_positive_definite(z, tol, "circumradius_equilibrium");
  const Index n = z.rows();
  const double nd = static_cast<double>(n);
  Matrix bordered(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = z;
  bordered.topRightCorner(n, 1).setConstant(-1.0);
  bordered.bottomLeftCorner(1, n).setOnes();
  bordered(n, n) = 0.0;
  Vector rhs(n + 1);
  Matrix off = z;
  off.diagonal().setZero();
  rhs.head(n) = -off.rowwise().sum() / nd;
  rhs(n) = 0.0;
  const Vector sol = bordered.partialPivLu().solve(rhs);

  Circumsphere cs;
  cs.barycentric = Vector::Constant(n, 1.0 / nd) + sol.head(n);
  cs.deficit = sol(n);
  cs.radius_squared = 0.5 * ((nd - 1.0) / nd - cs.deficit);
  cs.radius = std::sqrt(std::max(0.0, cs.radius_squared));
  return cs;
}

struct GeometricCircumsphere {
  double radius = 0.0;
  Vector center;
};

/// Circumsphere of affinely independent points (the columns of `points`),
/// from the equidistance equations 2 (s_j - s_0)^T (c - s_0) = |s_j - s_0|^2
/// with c restricted to the affine hull.
inline GeometricCircumsphere circumradius_geometric(const Matrix& points,
                                                    const Tolerances& tol = {}) {
  const Index n = points.cols();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no points");
  GeometricCircumsphere out;
  out.center = points.col(0);
  if (n == 1) return out;
  if (points.rows() < n - 1) {
    throw Error(ErrorCode::DegenerateSimplex,
                "ambient dimension too small for an affinely independent set");
  }
  const Matrix edges = points.rightCols(n - 1).colwise() - points.col(0);
  Eigen::JacobiSVD<Matrix> svd(edges);
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > tol.simplex * sv(0))) {
    throw Error(ErrorCode::DegenerateSimplex,
                "points are not affinely independent");
  }
  const Matrix gram = edges.transpose() * edges;
  const Vector coeff = gram.ldlt().solve(0.5 * gram.diagonal());
  const Vector offset = edges * coeff;
  out.center = points.col(0) + offset;
  out.radius = offset.norm();
  return out;
}

struct EmbeddingData {
  Matrix k;       // centred similarity matrix
  Matrix sqrt_k;  // (n-1) x n, columns are the embedded points
  Vector mu;      // nonzero eigenvalues of K, descending
  Circumsphere circumsphere;

  std::size_t size() const { return static_cast<std::size_t>(k.rows()); }
  double radius() const { return circumsphere.radius; }
  const Vector& barycentric() const { return circumsphere.barycentric; }
  /// Circumcenter in embedding coordinates.
  Vector circumcenter() const { return sqrt_k * circumsphere.barycentric; }
};

/// Similarity embedding: sqrt_k^T sqrt_k = K with the kernel direction of K
/// dropped, so |phi(i) - phi(j)|^2 = 1 - z_ij.
inline EmbeddingData similarity_embedding(const MetricSpace& space,
                                          const Tolerances& tol = {}) {
  const Matrix z = similarity_matrix(space);
  require_positive_definite(z, tol, "similarity_embedding");
  const Index n = z.rows();
  EmbeddingData e;
  e.k = centered_similarity(z);
  Eigen::SelfAdjointEigenSolver<Matrix> es(e.k);
  // ascending order; index 0 is the centring kernel
  e.mu.resize(n - 1);
  e.sqrt_k.resize(n - 1, n);
  for (Index r = 0; r < n - 1; ++r) {
    const Index src = n - 1 - r;
    const double mu = std::max(0.0, es.eigenvalues()(src));
    e.mu(r) = es.eigenvalues()(src);
    e.sqrt_k.row(r) = std::sqrt(mu) * es.eigenvectors().col(src).transpose();
  }
  e.circumsphere = circumradius_equilibrium(z, tol);
  return e;
}

/// |X| = 1 / (1 - 2R^2) with R measured geometrically on the embedded points.
inline double magnitude_via_circumradius(const MetricSpace& space,
                                         const Tolerances& tol = {}) {
  const EmbeddingData e = similarity_embedding(space, tol);
  const double r = circumradius_geometric(e.sqrt_k, tol).radius;
  return 1.0 / (1.0 - 2.0 * r * r);
}

struct SubspaceCharacterizationReport {
  std::size_t subsets_checked = 0;
  bool exhaustive = false;
  double max_abs_deviation = 0.0;
  std::uint64_t worst_subset = 0;
};

/// Checks |Y| = 1 / (1 - 2 R(phi(Y))^2) on nonempty subsets Y, where phi(Y)
/// restricts the embedding of the whole space. All subsets are visited when
/// 2^n - 1 <= max_subsets, otherwise max_subsets uniformly random ones.
inline SubspaceCharacterizationReport verify_subspace_characterization(
    const MetricSpace& space, std::size_t max_subsets, std::uint64_t seed = 0,
    const Tolerances& tol = {}) {
  const std::size_t n = space.size();
  if (n > 62) {
    throw Error(ErrorCode::TooManyPoints, "subset masks support up to 62 points");
  }
  const EmbeddingData e = similarity_embedding(space, tol);
  const Matrix z = similarity_matrix(space);
  const std::uint64_t total = (std::uint64_t{1} << n) - 1;

  std::vector<std::uint64_t> masks;
  SubspaceCharacterizationReport report;
  if (total <= max_subsets) {
    report.exhaustive = true;
    masks.reserve(total);
    for (std::uint64_t m = 1; m <= total; ++m) masks.push_back(m);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(1, total);
    masks.reserve(max_subsets);
    for (std::size_t s = 0; s < max_subsets; ++s) masks.push_back(pick(rng));
  }

  std::vector<double> deviation(masks.size());
  parallel_for(masks.size(), [&](std::size_t idx) {
    const auto subset = SubsetSelector::from_mask(masks[idx]);
    const Matrix zy = gather(z, subset);
    const double mag_y = Eigen::LLT<Matrix>(zy).solve(Vector::Ones(zy.rows())).sum();
    const Matrix pts = gather(e.sqrt_k, SubsetSelector::all(n - 1), subset);
    const double r = circumradius_geometric(pts, tol).radius;
    deviation[idx] = std::abs(mag_y - 1.0 / (1.0 - 2.0 * r * r));
  });
  report.subsets_checked = masks.size();
  for (std::size_t idx = 0; idx < masks.size(); ++idx) {
    if (deviation[idx] > report.max_abs_deviation) {
      report.max_abs_deviation = deviation[idx];
      report.worst_subset = masks[idx];
    }
  }
  return report;
}

}  // namespace magkit

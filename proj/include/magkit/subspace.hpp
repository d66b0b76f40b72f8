#pragma once

#include <cmath>
#include <optional>
#include <string_view>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "magkit/matrix_identities.hpp"

namespace magkit {

/// M/pivot := M_YY - M_YP (M_PP)^{-1} M_PY with Y the complement of the
/// pivot. The pivot block must be well conditioned.
inline Matrix schur_complement(const Matrix& m, const SubsetSelector& pivot,
                               const Tolerances& tol = {}) {
  const auto n = static_cast<std::size_t>(m.rows());
  pivot.check_range(n);
  const SubsetSelector keep = pivot.complement(n);
  if (pivot.empty()) return m;
  const Matrix pp = gather(m, pivot);
  Eigen::JacobiSVD<Matrix> svd(pp);
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > tol.pd * std::max(1.0, sv(0)))) {
    throw Error(ErrorCode::SingularPivotBlock, "pivot block is singular");
  }
  const Matrix yp = gather(m, keep, pivot);
  const Matrix py = gather(m, pivot, keep);
  return gather(m, keep) - yp * pp.partialPivLu().solve(py);
}

enum class Derivation { Incremental, Recomputed };

constexpr std::string_view to_string(Derivation d) {
  return d == Derivation::Incremental ? "Incremental" : "Recomputed";
}

/// Incremental and recomputed subspace magnitudes that disagree beyond the
/// conditioning tolerance.
struct ConditioningWarning {
  double incremental = 0.0;
  double recomputed = 0.0;
  double relative_gap = 0.0;
};

/// Magnitude data of a subspace Y, indexed by Y's points in ascending order
/// of their index in the original space.
struct SubspaceResult {
  SubsetSelector subset;
  double magnitude = 0.0;
  Vector weighting;
  Matrix kdag;
  Derivation derivation = Derivation::Recomputed;
  std::optional<ConditioningWarning> warning;

  Vector normalized_weighting() const { return weighting / magnitude; }
};

/// Oracle path: restrict, then solve and pseudo-invert from scratch.
inline SubspaceResult recompute_subspace(const MetricSpace& space,
                                         const SubsetSelector& subset,
                                         const Tolerances& tol = {}) {
  const MetricSpace y = restrict(space, subset);
  const Matrix z = similarity_matrix(y);
  require_positive_definite(z, tol, "recompute_subspace");
  SubspaceResult r;
  r.subset = subset;
  r.weighting = Eigen::LLT<Matrix>(z).solve(Vector::Ones(z.rows()));
  r.magnitude = r.weighting.sum();
  r.kdag = pseudoinverse_centered(centered_similarity(z), tol);
  r.derivation = Derivation::Recomputed;
  return r;
}

/// Full-space data that the incremental formulas start from.
inline SubspaceResult full_space_result(const MetricSpace& space,
                                        const Tolerances& tol = {}) {
  return recompute_subspace(space, SubsetSelector::all(space.size()), tol);
}

namespace detail {

inline SubsetSelector local_positions(const SubsetSelector& outer,
                                      const SubsetSelector& inner) {
  std::vector<std::size_t> pos;
  pos.reserve(inner.size());
  for (auto i : inner.members()) {
    auto p = outer.position(i);
    if (!p) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "point " + std::to_string(i) + " is not in the current subspace");
    }
    pos.push_back(*p);
  }
  return SubsetSelector(std::move(pos));
}

}  // namespace detail

/// Magnitude, weighting and Kdag of Y from the data of a larger space X:
///   |Y| = |X| (1 + 2 w_c^T (Kdag_cc)^{-1} w_c / |X|)^{-1}
///   w'/|Y| = w_Y/|X| - Kdag_Yc (Kdag_cc)^{-1} w_c / |X|
///   Kdag(Y) = Kdag(X) / Y^c
/// with c = Y^c, using a Cholesky factorisation of the pivot block.
inline SubspaceResult subspace_magnitude_weighting(const SubspaceResult& from,
                                                   const SubsetSelector& subset,
                                                   const Tolerances& tol = {}) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "empty subset");
  const std::size_t n = from.subset.size();
  const SubsetSelector keep = detail::local_positions(from.subset, subset);
  const SubsetSelector pivot = keep.complement(n);
  if (pivot.empty()) {
    SubspaceResult same = from;
    same.warning.reset();
    return same;
  }
  const Matrix kcc = gather(from.kdag, pivot);
  Eigen::LLT<Matrix> llt(kcc);
  if (llt.info() != Eigen::Success || !(llt.rcond() > tol.pd)) {
    throw Error(ErrorCode::SingularPivotBlock,
                "Kdag block on the removed points is not positive definite");
  }
  const Matrix kyc = gather(from.kdag, keep, pivot);
  const Vector wc = gather(from.weighting, pivot);
  const Vector wy = gather(from.weighting, keep);
  const Vector solved = llt.solve(wc);

  SubspaceResult r;
  r.subset = subset;
  r.derivation = Derivation::Incremental;
  r.magnitude = from.magnitude / (1.0 + 2.0 * wc.dot(solved) / from.magnitude);
  const Vector normalized = wy / from.magnitude - kyc * solved / from.magnitude;
  r.weighting = r.magnitude * normalized;
  r.kdag = gather(from.kdag, keep) - kyc * llt.solve(kyc.transpose());
  r.kdag = 0.5 * (r.kdag + r.kdag.transpose()).eval();
  return r;
}

inline SubspaceResult subspace_magnitude_weighting(const MetricSpace& space,
                                                   const SubsetSelector& subset,
                                                   const Tolerances& tol = {}) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "empty subset");
  subset.check_range(space.size());
  return subspace_magnitude_weighting(full_space_result(space, tol), subset, tol);
}

/// Incremental result, cross-checked against recomputation; a disagreement
/// beyond tol.conditioning is attached as a warning rather than resolved.
inline SubspaceResult checked_subspace(const MetricSpace& space,
                                       const SubsetSelector& subset,
                                       const Tolerances& tol = {}) {
  SubspaceResult inc = subspace_magnitude_weighting(space, subset, tol);
  const SubspaceResult rec = recompute_subspace(space, subset, tol);
  const double gap = std::abs(inc.magnitude - rec.magnitude) / std::abs(rec.magnitude);
  if (gap > tol.conditioning) {
    inc.warning = ConditioningWarning{inc.magnitude, rec.magnitude, gap};
  }
  return inc;
}

/// One-point deletion as a rank-one update (O(n^2)):
///   |X\x| = |X| (1 + 2 w_x^2 / (cbar_x |X|))^{-1}
///   w'_i/|X\x| = w_i/|X| + (c_ix / cbar_x) (w_x / |X|)
///   Kdag' = Kdag_{-x,-x} - Kdag_{.x} Kdag_{x.} / Kdag_xx
/// `x` is an index of the original space and must belong to current.subset.
inline SubspaceResult delete_point(const SubspaceResult& current, std::size_t x,
                                   const Tolerances& tol = {}) {
  const auto pos = current.subset.position(x);
  if (!pos) {
    throw Error(ErrorCode::IndexOutOfRange,
                "point " + std::to_string(x) + " is not in the current subspace");
  }
  const auto n = static_cast<Index>(current.subset.size());
  if (n == 1) throw Error(ErrorCode::LastPoint, "cannot delete the last point");
  const auto p = static_cast<Index>(*pos);
  const double cbar_x = current.kdag(p, p);
  if (!(cbar_x > tol.pd * std::max(1.0, current.kdag.diagonal().cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::SingularPivotBlock, "cbar_x is not positive");
  }
  const double mag = current.magnitude;
  const double wx = current.weighting(p);

  SubspaceResult r;
  r.subset = current.subset.without(x);
  r.derivation = Derivation::Incremental;
  r.magnitude = mag / (1.0 + 2.0 * wx * wx / (cbar_x * mag));
  r.weighting.resize(n - 1);
  r.kdag.resize(n - 1, n - 1);
  for (Index i = 0, a = 0; i < n; ++i) {
    if (i == p) continue;
    const double c_ix = -current.kdag(i, p);
    r.weighting(a) = r.magnitude * (current.weighting(i) / mag + c_ix / cbar_x * wx / mag);
    for (Index j = 0, b = 0; j < n; ++j) {
      if (j == p) continue;
      r.kdag(a, b) = current.kdag(i, j) - current.kdag(i, p) * current.kdag(j, p) / cbar_x;
      ++b;
    }
    ++a;
  }
  return r;
}

/// c'_ij = c_ij + c_ix c_jx / cbar_x and cbar'_i = cbar_i - c_ix^2 / cbar_x
/// over X \ {x}; `x` is a position in coeffs.
inline CoefficientData delete_point_coefficients(const CoefficientData& coeffs,
                                                 std::size_t x,
                                                 const Tolerances& tol = {}) {
  const std::size_t n = coeffs.size();
  if (x >= n) {
    throw Error(ErrorCode::IndexOutOfRange, "point " + std::to_string(x) + " out of range");
  }
  if (n == 1) throw Error(ErrorCode::LastPoint, "cannot delete the last point");
  const double cbar_x = coeffs.cbar(static_cast<Index>(x));
  if (!(cbar_x > tol.pd * std::max(1.0, coeffs.cbar.cwiseAbs().maxCoeff()))) {
    throw Error(ErrorCode::SingularPivotBlock, "cbar_x is not positive");
  }
  const SubsetSelector rest = SubsetSelector::all(n).without(x);
  const Vector col = gather(Vector(coeffs.kdag.col(static_cast<Index>(x))), rest);
  CoefficientData out;
  out.z = gather(coeffs.z, rest);
  out.kdag = gather(coeffs.kdag, rest) - col * col.transpose() / cbar_x;
  out.cbar = out.kdag.diagonal();
  out.gamma = gamma_vector(centered_similarity(out.z));
  return out;
}

}  // namespace magkit

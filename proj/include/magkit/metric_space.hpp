#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "magkit/error.hpp"
#include "magkit/tolerances.hpp"

namespace magkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted, duplicate-free set of point indices. Range checks against a
/// particular space happen where the selector is used.
class SubsetSelector {
 public:
  SubsetSelector() = default;

  explicit SubsetSelector(std::vector<std::size_t> members)
      : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()),
                   members_.end());
  }

  static SubsetSelector all(std::size_t n) {
    std::vector<std::size_t> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = i;
    return SubsetSelector(std::move(m));
  }

  static SubsetSelector from_mask(std::uint64_t mask) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
      if (mask & 1u) m.push_back(i);
    }
    return SubsetSelector(std::move(m));
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (auto i : members_) m |= std::uint64_t{1} << i;
    return m;
  }

  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t operator[](std::size_t k) const { return members_[k]; }

  bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

  /// Position of point i inside the selector.
  std::optional<std::size_t> position(std::size_t i) const {
    auto it = std::lower_bound(members_.begin(), members_.end(), i);
    if (it == members_.end() || *it != i) return std::nullopt;
    return static_cast<std::size_t>(it - members_.begin());
  }

  SubsetSelector complement(std::size_t n) const {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i) {
      if (!contains(i)) m.push_back(i);
    }
    return SubsetSelector(std::move(m));
  }

  SubsetSelector without(std::size_t i) const {
    std::vector<std::size_t> m;
    for (auto k : members_) {
      if (k != i) m.push_back(k);
    }
    return SubsetSelector(std::move(m));
  }

  void check_range(std::size_t n) const {
    if (!members_.empty() && members_.back() >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "point index " + std::to_string(members_.back()) +
                      " outside 0.." + std::to_string(n - 1));
    }
  }

  friend bool operator==(const SubsetSelector&, const SubsetSelector&) = default;

 private:
  std::vector<std::size_t> members_;
};

inline Vector gather(const Vector& v, const SubsetSelector& s) {
  Vector out(static_cast<Index>(s.size()));
  for (std::size_t k = 0; k < s.size(); ++k) {
    out(static_cast<Index>(k)) = v(static_cast<Index>(s[k]));
  }
  return out;
}

inline Matrix gather(const Matrix& m, const SubsetSelector& rows,
                     const SubsetSelector& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b) {
      out(static_cast<Index>(a), static_cast<Index>(b)) =
          m(static_cast<Index>(rows[a]), static_cast<Index>(cols[b]));
    }
  }
  return out;
}

inline Matrix gather(const Matrix& m, const SubsetSelector& s) {
  return gather(m, s, s);
}

/// A validated finite metric space. Immutable after construction; build one
/// through from_distance_matrix or from_points_euclidean.
class MetricSpace {
 public:
  std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }
  const Matrix& distances() const { return dist_; }
  double distance(std::size_t i, std::size_t j) const {
    return dist_(static_cast<Index>(i), static_cast<Index>(j));
  }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Smallest and largest off-diagonal distance (0 for a single point).
  double min_distance() const {
    double m = 0.0;
    for (Index i = 0; i < dist_.rows(); ++i) {
      for (Index j = i + 1; j < dist_.cols(); ++j) {
        m = (m == 0.0) ? dist_(i, j) : std::min(m, dist_(i, j));
      }
    }
    return m;
  }
  double max_distance() const { return dist_.size() ? dist_.maxCoeff() : 0.0; }

  friend MetricSpace from_distance_matrix(const Matrix&, const Tolerances&,
                                          std::vector<std::string>);
  friend MetricSpace scale(const MetricSpace&, double);
  friend MetricSpace restrict(const MetricSpace&, const SubsetSelector&);

 private:
  MetricSpace(Matrix dist, std::vector<std::string> labels)
      : dist_(std::move(dist)), labels_(std::move(labels)) {}

  Matrix dist_;
  std::vector<std::string> labels_;
};

namespace detail {

inline std::string triple(Index i, Index j, Index k) {
  std::ostringstream os;
  os << "(" << i << "," << j << "," << k << ")";
  return os.str();
}

}  // namespace detail

/// Validates a square distance matrix: finite entries, zero diagonal,
/// symmetry, positive off-diagonal entries and the triangle inequality with
/// additive slack tol.metric * max distance.
inline MetricSpace from_distance_matrix(const Matrix& matrix,
                                        const Tolerances& tol = {},
                                        std::vector<std::string> labels = {}) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::NotSquare, "distance matrix is " +
                                          std::to_string(matrix.rows()) + "x" +
                                          std::to_string(matrix.cols()));
  }
  const Index n = matrix.rows();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "no points");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(n) + " labels, got " +
                    std::to_string(labels.size()));
  }
  if (!matrix.allFinite()) {
    throw Error(ErrorCode::NonFinite, "distance matrix has NaN or infinity");
  }
  for (Index i = 0; i < n; ++i) {
    if (matrix(i, i) != 0.0) {
      throw Error(ErrorCode::NonzeroDiagonal,
                  "diagonal entry " + std::to_string(i) + " is not zero");
    }
    for (Index j = 0; j < n; ++j) {
      if (matrix(i, j) != matrix(j, i)) {
        throw Error(ErrorCode::AsymmetricInput,
                    "d(" + std::to_string(i) + "," + std::to_string(j) +
                        ") != d(" + std::to_string(j) + "," +
                        std::to_string(i) + ")");
      }
      if (matrix(i, j) < 0.0) {
        throw Error(ErrorCode::NegativeDistance,
                    "d(" + std::to_string(i) + "," + std::to_string(j) +
                        ") < 0");
      }
      if (i != j && matrix(i, j) == 0.0) {
        throw Error(ErrorCode::ZeroOffDiagonal,
                    "points " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide");
      }
    }
  }
  const double slack = tol.metric * matrix.maxCoeff();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < n; ++k) {
        if (matrix(i, k) > matrix(i, j) + matrix(j, k) + slack) {
          throw Error(ErrorCode::TriangleViolation,
                      "d(i,k) > d(i,j) + d(j,k) for (i,j,k) = " +
                          detail::triple(i, j, k));
        }
      }
    }
  }
  return MetricSpace(matrix, std::move(labels));
}

/// Euclidean distances between coordinate vectors of equal dimension.
inline MetricSpace from_points_euclidean(
    std::span<const std::vector<double>> points, const Tolerances& tol = {}) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "no points");
  const std::size_t dim = points.front().size();
  const auto n = static_cast<Index>(points.size());
  Matrix dist = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    if (p.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "point " + std::to_string(i) + " has dimension " +
                      std::to_string(p.size()) + ", expected " +
                      std::to_string(dim));
    }
    for (double x : p) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::NonFinite,
                    "point " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const auto& a = points[static_cast<std::size_t>(i)];
      const auto& b = points[static_cast<std::size_t>(j)];
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      if (s == 0.0) {
        throw Error(ErrorCode::DuplicatePoint,
                    "points " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide");
      }
      dist(i, j) = dist(j, i) = std::sqrt(s);
    }
  }
  return from_distance_matrix(dist, tol);
}

inline MetricSpace from_points_euclidean(
    const std::vector<std::vector<double>>& points, const Tolerances& tol = {}) {
  return from_points_euclidean(std::span<const std::vector<double>>(points), tol);
}

/// The space tX with distances t * d.
inline MetricSpace scale(const MetricSpace& space, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::NonpositiveScale,
                "scale factor must be positive and finite, got " +
                    std::to_string(t));
  }
  return MetricSpace(space.dist_ * t, space.labels_);
}

/// The metric subspace (Y, d|_Y).
inline MetricSpace restrict(const MetricSpace& space,
                            const SubsetSelector& subset) {
  if (subset.empty()) throw Error(ErrorCode::EmptySubset, "empty subset");
  subset.check_range(space.size());
  std::vector<std::string> labels;
  if (!space.labels_.empty()) {
    for (auto i : subset.members()) labels.push_back(space.labels_[i]);
  }
  return MetricSpace(gather(space.dist_, subset), std::move(labels));
}

}  // namespace magkit

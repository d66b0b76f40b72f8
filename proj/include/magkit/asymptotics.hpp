#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "magkit/embedding.hpp"
#include "magkit/format.hpp"
#include "magkit/parallel.hpp"

namespace magkit {

/// q = 1^T (Z - I) w, equal to n - |X| whenever Zw = 1 but without the
/// cancellation of subtracting two nearly equal numbers.
inline double remainder_from_weighting(const Matrix& z, const Vector& w) {
  Matrix off = z;
  off.diagonal().setZero();
  return (off * w).sum();
}

/// Logarithmically spaced scales from t_min to t_max inclusive.
inline std::vector<double> log_grid(double t_min, double t_max, int per_decade = 32) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max) || per_decade < 1) {
    throw Error(ErrorCode::InvalidGrid, "log grid needs 0 < t_min <= t_max");
  }
  std::vector<double> grid;
  const double decades = std::log10(t_max / t_min);
  const auto steps = static_cast<long>(std::floor(decades * per_decade + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    grid.push_back(t_min * std::pow(10.0, static_cast<double>(k) / per_decade));
  }
  if (grid.back() < t_max * (1.0 - 1e-12)) {
    grid.push_back(t_max);
  } else {
    grid.back() = t_max;
  }
  return grid;
}

/// Evenly spaced scales from t_min to t_max inclusive.
inline std::vector<double> linear_grid(double t_min, double t_max, std::size_t count) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max) || count == 0 ||
      (count == 1 && t_max != t_min)) {
    throw Error(ErrorCode::InvalidGrid, "linear grid needs 0 < t_min <= t_max");
  }
  std::vector<double> grid(count, t_min);
  for (std::size_t k = 1; k < count; ++k) {
    grid[k] = t_min + (t_max - t_min) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return grid;
}

struct SweepPoint {
  double t = 0.0;
  Definiteness definiteness = Definiteness::Singular;
  std::optional<double> magnitude;
  std::optional<double> q;          // n - magnitude
  std::optional<double> r_squared;  // circumradius^2 of the embedding of tX
  std::optional<double> asymptote;  // n^2 ((n-1)/n - 2R^2)
  // n - magnitude fell below 1e-13 n and carries no significant digits
  bool q_below_floor = false;
};

inline void validate_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw Error(ErrorCode::InvalidGrid, "empty scale grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k])) {
      throw Error(ErrorCode::InvalidGrid, "scales must be positive and finite");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw Error(ErrorCode::InvalidGrid, "scale grid must be strictly increasing");
    }
  }
}

inline SweepPoint sweep_point(const MetricSpace& space, double t, const Tolerances& tol = {}) {
  const MetricSpace scaled = scale(space, t);
  const SimilarityData data = analyze(scaled, tol);
  const double n = static_cast<double>(space.size());
  SweepPoint p;
  p.t = t;
  p.definiteness = data.definiteness;
  if (data.magnitude) {
    p.magnitude = *data.magnitude;
    p.q = n - *data.magnitude;
    p.q_below_floor = std::abs(*p.q) < 1e-13 * n;
  }
  if (data.definiteness == Definiteness::PositiveDefinite) {
    const Circumsphere cs = circumradius_equilibrium(data.z, tol);
    p.r_squared = cs.radius_squared;
    p.asymptote = n * n * cs.deficit;
  }
  return p;
}

/// Magnitude, remainder and circumradius data of tX for each t on the grid.
/// Nonexistence at a scale is recorded in that point.
inline std::vector<SweepPoint> magnitude_sweep(const MetricSpace& space,
                                               const std::vector<double>& t_grid,
                                               const Tolerances& tol = {}) {
  validate_grid(t_grid);
  std::vector<SweepPoint> out(t_grid.size());
  parallel_for(t_grid.size(), [&](std::size_t k) { out[k] = sweep_point(space, t_grid[k], tol); });
  return out;
}

/// q(tX) / (n^2 ((n-1)/n - 2R^2)), which tends to 1 as t grows. Both the
/// remainder and the circumradius deficit are formed without cancellation.
inline double asymptotic_ratio(const MetricSpace& space, double t, const Tolerances& tol = {}) {
  const MetricSpace scaled = scale(space, t);
  const Matrix z = similarity_matrix(scaled);
  require_positive_definite(z, tol, "asymptotic_ratio");
  const Vector w = Eigen::LLT<Matrix>(z).solve(Vector::Ones(z.rows()));
  const double q = remainder_from_weighting(z, w);
  const double n = static_cast<double>(space.size());
  const double deficit = circumradius_equilibrium(z, tol).deficit;
  if (!(std::abs(q) >= 1e-300) || !(std::abs(deficit) >= 1e-300)) {
    throw Error(ErrorCode::DegenerateRemainder, "remainder underflows at this scale");
  }
  return q / (n * n * deficit);
}

struct TwoPointRow {
  double t = 0.0;
  double exact = 0.0;           // 2 / (1 + e^{td})
  double approx = 0.0;          // 2 e^{-td}
  double relative_error = 0.0;  // (approx - exact) / approx
};

/// Remainder of two points at distance d against its exponential
/// approximation.
inline std::vector<TwoPointRow> two_point_approximation(double d,
                                                        const std::vector<double>& t_grid) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw Error(ErrorCode::NegativeDistance, "distance must be positive");
  }
  std::vector<TwoPointRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::InvalidGrid, "scales must be nonnegative and finite");
    }
    const double e = std::exp(-t * d);
    TwoPointRow r;
    r.t = t;
    r.exact = 2.0 * e / (1.0 + e);
    r.approx = 2.0 * e;
    r.relative_error = (r.approx - r.exact) / r.approx;
    rows.push_back(r);
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  os << "t,magnitude,q,R_squared,asymptote,definiteness\n";
  for (const auto& p : points) {
    os << format_double(p.t) << ',' << opt(p.magnitude) << ','
       << (p.q_below_floor ? std::string() : opt(p.q)) << ',' << opt(p.r_squared) << ','
       << opt(p.asymptote) << ',' << to_string(p.definiteness) << '\n';
  }
}

}  // namespace magkit

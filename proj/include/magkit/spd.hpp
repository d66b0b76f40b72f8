#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "magkit/asymptotics.hpp"
#include "magkit/subspace.hpp"

namespace magkit {

// ---------------------------------------------------------------------------
// Strong positive definiteness
// ---------------------------------------------------------------------------

/// Four independent routes to "c > 0" / "w > 0" for a positive definite space.
struct SpdCharacterizations {
  bool sign_pattern = false;           // Kdag off-diagonals all negative
  bool m_matrix = false;               // PSD spectrum + negative off-diagonals
  bool laplacian = false;              // complete graph, positive weights, ker = span(1)
  bool circumcenter_interior = false;  // barycentric circumcenter > 0
};

struct SpdCertificate {
  bool is_pd = false;
  bool w_positive = false;
  bool c_positive = false;
  bool verdict = false;
  // some w_i (c_ij) within +-tol.strict of zero
  bool w_boundary = false;
  bool c_boundary = false;
  double min_w = 0.0;
  double min_c = 0.0;
  SpdCharacterizations characterizations;

  bool characterizations_agree() const {
    const auto& ch = characterizations;
    return ch.sign_pattern == c_positive && ch.m_matrix == c_positive &&
           ch.laplacian == c_positive && ch.circumcenter_interior == w_positive;
  }
};

inline SpdCertificate spd_certificate_from_similarity(const Matrix& z,
                                                      const Tolerances& tol = {}) {
  SpdCertificate cert;
  cert.is_pd = classify_definiteness(z, tol) == Definiteness::PositiveDefinite;
  if (!cert.is_pd) return cert;

  const Index n = z.rows();
  const double eps = tol.strict;
  const Vector w = Eigen::LLT<Matrix>(z).solve(Vector::Ones(n));
  const Matrix kdag = pseudoinverse_centered(centered_similarity(z), tol);

  cert.min_w = w.minCoeff();
  cert.w_positive = cert.min_w > eps;
  cert.w_boundary = (w.array().abs() <= eps).any();

  double min_c = std::numeric_limits<double>::infinity();
  bool c_boundary = false;
  for_each_pair(static_cast<std::size_t>(n), [&](std::size_t i, std::size_t j) {
    const double c = -kdag(static_cast<Index>(i), static_cast<Index>(j));
    min_c = std::min(min_c, c);
    c_boundary = c_boundary || std::abs(c) <= eps;
  });
  cert.min_c = n > 1 ? min_c : 0.0;
  cert.c_positive = n == 1 || min_c > eps;
  cert.c_boundary = c_boundary;
  cert.verdict = cert.is_pd && cert.w_positive && cert.c_positive;

  // (i) sign pattern of Kdag
  bool negative_off = true;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j && !(kdag(i, j) < -eps)) negative_off = false;
    }
  }
  cert.characterizations.sign_pattern = negative_off;

  // (ii) M-matrix: nonnegative spectrum and nonpositive (here: negative)
  // off-diagonal entries
  Eigen::SelfAdjointEigenSolver<Matrix> es(kdag);
  const Vector& ev = es.eigenvalues();
  const double ev_scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const bool spectrum_ok = ev.minCoeff() >= -tol.pd * ev_scale;
  cert.characterizations.m_matrix = spectrum_ok && negative_off;

  // (iii) Laplacian of the complete graph with edge weights c_ij: zero row
  // sums, positive weights, and a one-dimensional kernel spanned by 1
  const double row_sum_err = (kdag * Vector::Ones(n)).cwiseAbs().maxCoeff();
  Index kernel_dim = 0;
  Index kernel_idx = 0;
  for (Index i = 0; i < n; ++i) {
    if (std::abs(ev(i)) <= tol.pd * ev_scale) {
      ++kernel_dim;
      kernel_idx = i;
    }
  }
  bool kernel_is_ones = false;
  if (kernel_dim == 1) {
    const double align = std::abs(es.eigenvectors().col(kernel_idx).sum()) /
                         std::sqrt(static_cast<double>(n));
    kernel_is_ones = align >= 1.0 - 1e-8;
  }
  bool weights_positive = true;
  for_each_pair(static_cast<std::size_t>(n), [&](std::size_t i, std::size_t j) {
    if (!(-kdag(static_cast<Index>(i), static_cast<Index>(j)) > eps)) weights_positive = false;
  });
  cert.characterizations.laplacian =
      weights_positive && row_sum_err <= 1e-9 * ev_scale && kernel_is_ones;

  // (iv) circumcenter strictly inside the simplex
  const Circumsphere cs = circumradius_equilibrium(z, tol);
  cert.characterizations.circumcenter_interior = (cs.barycentric.array() > eps).all();
  return cert;
}

/// Strongly positive definite: positive definite with w > 0 and c > 0.
inline SpdCertificate spd_certificate(const MetricSpace& space,
                                      const Tolerances& tol = {}) {
  return spd_certificate_from_similarity(similarity_matrix(space), tol);
}

/// Semi-algebraic description through Z^{-1} alone: 1^T Z^{-1} 1 > 0 and for
/// all i != j, y_i y_j > (1^T Z^{-1} 1) (Z^{-1})_ij and y_i y_j > 0 where
/// y = Z^{-1} 1.
inline bool spd_semialgebraic_check(const Matrix& z, const Tolerances& tol = {}) {
  if (classify_definiteness(z, tol) == Definiteness::Singular) {
    throw Error(ErrorCode::SingularZ, "similarity matrix is singular");
  }
  const Eigen::PartialPivLU<Matrix> lu(z);
  const Matrix zi = lu.inverse();
  const Vector y = zi * Vector::Ones(z.rows());
  const double total = y.sum();
  if (!(total > 0.0)) return false;
  bool ok = true;
  for_each_pair(static_cast<std::size_t>(z.rows()), [&](std::size_t a, std::size_t b) {
    const auto i = static_cast<Index>(a);
    const auto j = static_cast<Index>(b);
    const double prod = y(i) * y(j);
    if (!(prod > total * 0.5 * (zi(i, j) + zi(j, i))) || !(prod > 0.0)) ok = false;
  });
  return ok;
}

struct ScaleThreshold {
  double t_star = 0.0;
  // every scale at which the certificate was evaluated, in evaluation order
  std::vector<std::pair<double, bool>> trace;
};

/// Smallest scale t* <= t_max found by doubling/halving from t = 1 and
/// bisecting to 1e-6 relative precision, such that tX is strongly positive
/// definite at t* and at every point of a 32-per-decade grid up to t_max.
/// The grid only samples persistence; it does not prove it.
inline ScaleThreshold spd_scale_threshold(const MetricSpace& space, double t_max,
                                          const Tolerances& tol = {}) {
  if (!(t_max > 0.0)) {
    throw Error(ErrorCode::NonpositiveScale, "t_max must be positive");
  }
  ScaleThreshold out;
  auto is_spd = [&](double t) {
    const bool v = spd_certificate(scale(space, t), tol).verdict;
    out.trace.emplace_back(t, v);
    return v;
  };
  auto not_found = [&] {
    return Error(ErrorCode::ThresholdNotFound,
                 "no strongly positive definite scale up to t_max = " +
                     std::to_string(t_max));
  };

  double lo = 0.0;  // last scale known to fail (0: none found)
  double hi = 0.0;  // scale known to pass
  double t = std::min(1.0, t_max);
  if (is_spd(t)) {
    hi = t;
    for (int k = 0; k < 64; ++k) {
      t *= 0.5;
      if (!is_spd(t)) {
        lo = t;
        break;
      }
      hi = t;
    }
  } else {
    lo = t;
    for (;;) {
      t *= 2.0;
      if (t >= t_max) {
        if (lo < t_max && is_spd(t_max)) {
          hi = t_max;
          break;
        }
        throw not_found();
      }
      if (is_spd(t)) {
        hi = t;
        break;
      }
      lo = t;
    }
  }

  for (;;) {
    if (lo > 0.0) {
      while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (is_spd(mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    // sampled persistence on (hi, t_max]
    bool restarted = false;
    if (hi < t_max) {
      const auto grid = log_grid(hi, t_max, 32);
      for (std::size_t g = 1; g < grid.size(); ++g) {
        if (is_spd(grid[g])) continue;
        lo = grid[g];
        std::optional<double> next;
        for (std::size_t h = g + 1; h < grid.size(); ++h) {
          if (is_spd(grid[h])) {
            next = grid[h];
            break;
          }
          lo = grid[h];
        }
        if (!next) throw not_found();
        hi = *next;
        restarted = true;
        break;
      }
    }
    if (!restarted) break;
  }
  out.t_star = hi;
  return out;
}

// ---------------------------------------------------------------------------
// Submodularity of magnitude set functions
// ---------------------------------------------------------------------------

enum class SetFunctionKind { InverseMagnitude, ShiftedRemainder };

constexpr std::string_view to_string(SetFunctionKind k) {
  return k == SetFunctionKind::InverseMagnitude ? "inverse" : "shifted";
}

/// f(Y) - f(Y\y) >= f(Y\x) - f(Y\{x,y}); margin is the left minus the right.
struct SubmodularityViolation {
  std::uint64_t subset = 0;
  std::size_t x = 0;
  std::size_t y = 0;
  double margin = 0.0;
};

/// f(smaller) >= f(larger) for a covering pair smaller = larger \ {x}.
struct MonotonicityViolation {
  std::uint64_t smaller = 0;
  std::uint64_t larger = 0;
  double margin = 0.0;
};

/// One member of the F, G or H families. For F and G, (subset, x, y) label
/// the quadruple; for H, subset is the smaller set and `larger` the larger.
struct FamilyValue {
  std::uint64_t subset = 0;
  std::uint64_t larger = 0;
  std::size_t x = 0;
  std::size_t y = 0;
  double value = 0.0;
};

struct SetFunctionReport {
  SetFunctionKind kind = SetFunctionKind::InverseMagnitude;
  double alpha = 0.0;
  double t = 1.0;
  std::size_t n = 0;
  bool exhaustive = true;
  bool hypothesis_holds = true;
  std::vector<std::string> warnings;

  std::size_t quadruples_checked = 0;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  std::size_t monotonicity_violation_count = 0;
  std::vector<SubmodularityViolation> violations;  // capped, lexicographic
  std::vector<MonotonicityViolation> monotonicity_violations;
  std::vector<std::uint64_t> undefined_subsets;  // no magnitude

  // F (|Y| >= 3), G (|Y| = 2) and H (covering pairs) of the shifted
  // function; stored individually for n <= kStoreValuesUpTo
  std::vector<FamilyValue> f_values, g_values, h_values;
  double max_f = -std::numeric_limits<double>::infinity();
  double max_g = -std::numeric_limits<double>::infinity();
  double max_h = -std::numeric_limits<double>::infinity();

  // values of F and G at Z = I: f_targets[m] for m >= 3, and 1/2 + alpha
  std::vector<double> f_targets;
  double g_target = 0.0;

  bool submodular() const { return violation_count == 0 && undefined_subsets.empty(); }
  bool increasing() const {
    return monotonicity_violation_count == 0 && undefined_subsets.empty();
  }

  static constexpr std::size_t kMaxStoredViolations = 10000;
  static constexpr std::size_t kStoreValuesUpTo = 10;
};

inline constexpr std::size_t kExhaustiveLimit = 16;
inline constexpr std::size_t kMaskLimit = 62;

namespace detail {

// Values of one set function on subsets of a scaled space.
class SetFunction {
 public:
  SetFunction(const Matrix& z, SetFunctionKind kind, double alpha, const Tolerances& tol)
      : z_(z), kind_(kind), alpha_(alpha), tol_(tol) {}

  double operator()(std::uint64_t mask) const {
    if (mask == 0) return alpha_;
    const auto subset = SubsetSelector::from_mask(mask);
    const Matrix zy = gather(z_, subset);
    const auto m = static_cast<double>(subset.size());
    std::optional<Vector> w;
    Eigen::LLT<Matrix> llt(zy);
    if (llt.info() == Eigen::Success &&
        classify_definiteness(zy, tol_) == Definiteness::PositiveDefinite) {
      w = llt.solve(Vector::Ones(zy.rows()));
    } else {
      w = weighting(zy, tol_);
    }
    if (!w) return std::numeric_limits<double>::quiet_NaN();
    if (kind_ == SetFunctionKind::InverseMagnitude) return -1.0 / w->sum();
    return remainder_from_weighting(zy, *w) / (m * m) + (m - 1.0) / m;
  }

 private:
  const Matrix& z_;
  SetFunctionKind kind_;
  double alpha_;
  const Tolerances& tol_;
};

inline void sort_report(SetFunctionReport& r) {
  std::sort(r.violations.begin(), r.violations.end(), [](const auto& a, const auto& b) {
    return std::tie(a.subset, a.x, a.y) < std::tie(b.subset, b.x, b.y);
  });
  std::sort(r.monotonicity_violations.begin(), r.monotonicity_violations.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.larger, a.smaller) < std::tie(b.larger, b.smaller);
            });
  std::sort(r.undefined_subsets.begin(), r.undefined_subsets.end());
}

inline void record_quadruple(SetFunctionReport& r, std::uint64_t mask, std::size_t x,
                             std::size_t y, double fy, double fyx, double fyy,
                             double fyxy, bool store) {
  const double family = fy - fyx - fyy + fyxy;
  ++r.quadruples_checked;
  if (!(family < 0.0)) {
    ++r.violation_count;
    if (r.violations.size() < SetFunctionReport::kMaxStoredViolations) {
      r.violations.push_back({mask, x, y, (fy - fyy) - (fyx - fyxy)});
    }
  }
  if (r.kind != SetFunctionKind::ShiftedRemainder) return;
  if (std::popcount(mask) == 2) {
    r.max_g = std::max(r.max_g, family);
    if (store) r.g_values.push_back({mask, 0, x, y, family});
  } else {
    r.max_f = std::max(r.max_f, family);
    if (store) r.f_values.push_back({mask, 0, x, y, family});
  }
}

inline void record_cover(SetFunctionReport& r, std::uint64_t smaller, std::uint64_t larger,
                         std::size_t x, double f_small, double f_large, bool store) {
  const double h = f_small - f_large;
  ++r.pairs_checked;
  if (!(h < 0.0)) {
    ++r.monotonicity_violation_count;
    if (r.monotonicity_violations.size() < SetFunctionReport::kMaxStoredViolations) {
      r.monotonicity_violations.push_back({smaller, larger, h});
    }
  }
  if (r.kind != SetFunctionKind::ShiftedRemainder) return;
  r.max_h = std::max(r.max_h, h);
  if (store) r.h_values.push_back({smaller, larger, x, 0, h});
}

inline SetFunctionReport run_set_function(const MetricSpace& scaled, SetFunctionKind kind,
                                          double alpha, std::uint64_t seed,
                                          std::size_t samples, const Tolerances& tol) {
  const std::size_t n = scaled.size();
  if (n > kMaskLimit) {
    throw Error(ErrorCode::TooManyPoints,
                "subset enumeration supports at most " + std::to_string(kMaskLimit) +
                    " points");
  }
  SetFunctionReport r;
  r.kind = kind;
  r.alpha = alpha;
  r.n = n;
  r.exhaustive = n <= kExhaustiveLimit;
  const bool store = n <= SetFunctionReport::kStoreValuesUpTo;
  const Matrix z = similarity_matrix(scaled);
  const SetFunction f(z, kind, alpha, tol);

  if (r.exhaustive) {
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<double> values(count);
    parallel_for(count, [&](std::size_t mask) { values[mask] = f(mask); });
    for (std::uint64_t mask = 1; mask < count; ++mask) {
      if (std::isnan(values[mask])) r.undefined_subsets.push_back(mask);
    }
    for (std::uint64_t mask = 1; mask < count; ++mask) {
      for (std::size_t x = 0; x < n; ++x) {
        const std::uint64_t bx = std::uint64_t{1} << x;
        if (!(mask & bx)) continue;
        record_cover(r, mask & ~bx, mask, x, values[mask & ~bx], values[mask], store);
        for (std::size_t y = x + 1; y < n; ++y) {
          const std::uint64_t by = std::uint64_t{1} << y;
          if (!(mask & by)) continue;
          record_quadruple(r, mask, x, y, values[mask], values[mask & ~bx],
                           values[mask & ~by], values[mask & ~bx & ~by], store);
        }
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    std::map<std::uint64_t, double> memo;
    auto value = [&](std::uint64_t mask) {
      auto it = memo.find(mask);
      if (it != memo.end()) return it->second;
      const double v = f(mask);
      if (std::isnan(v)) r.undefined_subsets.push_back(mask);
      memo.emplace(mask, v);
      return v;
    };
    std::uniform_int_distribution<std::size_t> point(0, n - 1);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t x = point(rng);
      std::size_t y = point(rng);
      while (y == x) y = point(rng);
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (coin(rng)) mask |= std::uint64_t{1} << i;
      }
      const std::uint64_t bx = std::uint64_t{1} << x;
      const std::uint64_t by = std::uint64_t{1} << y;
      mask |= bx | by;
      const auto [lo, hi] = std::minmax(x, y);
      const std::uint64_t bl = std::uint64_t{1} << lo;
      const std::uint64_t bh = std::uint64_t{1} << hi;
      record_quadruple(r, mask, lo, hi, value(mask), value(mask & ~bl), value(mask & ~bh),
                       value(mask & ~bl & ~bh), false);
      record_cover(r, mask & ~bx, mask, x, value(mask & ~bx), value(mask), false);
    }
  }

  r.g_target = 0.5 + alpha;
  r.f_targets.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 3; m <= n; ++m) {
    const auto md = static_cast<double>(m);
    r.f_targets[m] = -2.0 / (md * (md - 1.0) * (md - 2.0));
  }
  sort_report(r);
  return r;
}

}  // namespace detail

/// f(Y) = -1/|Y| for nonempty Y, f(empty) = alpha, over all subsets (random
/// quadruples for more than 16 points). Strictly submodular and increasing
/// for strongly positive definite spaces when alpha < -3/2; a failed
/// hypothesis is reported as a warning, not thrown.
inline SetFunctionReport check_inverse_submodularity(const MetricSpace& space, double alpha,
                                                     std::uint64_t seed = 0,
                                                     std::size_t samples = 20000,
                                                     const Tolerances& tol = {}) {
  if (space.size() > kMaskLimit) {
    throw Error(ErrorCode::TooManyPoints, "too many points for subset enumeration");
  }
  SetFunctionReport r = detail::run_set_function(space, SetFunctionKind::InverseMagnitude,
                                                 alpha, seed, samples, tol);
  if (!spd_certificate(space, tol).verdict) {
    r.hypothesis_holds = false;
    r.warnings.push_back("NotStronglyPositiveDefinite: space is not strongly positive definite");
  }
  return r;
}

/// f(Y) = (m - |tY|)/m^2 + (m-1)/m for m = #Y >= 1, f(empty) = alpha,
/// evaluated on the scaled space tX together with the F, G, H families.
inline SetFunctionReport check_shifted_submodularity(const MetricSpace& space, double t,
                                                     double alpha, std::uint64_t seed = 0,
                                                     std::size_t samples = 20000,
                                                     const Tolerances& tol = {}) {
  if (space.size() > kMaskLimit) {
    throw Error(ErrorCode::TooManyPoints, "too many points for subset enumeration");
  }
  SetFunctionReport r = detail::run_set_function(scale(space, t),
                                                 SetFunctionKind::ShiftedRemainder, alpha,
                                                 seed, samples, tol);
  r.t = t;
  return r;
}

/// Largest grid scale at which the shifted function shows any violation,
/// i.e. the empirical onset of its submodular regime on that grid.
inline std::optional<double> shifted_violation_onset(const MetricSpace& space, double alpha,
                                                     const std::vector<double>& t_grid,
                                                     std::uint64_t seed = 0,
                                                     const Tolerances& tol = {}) {
  std::optional<double> last;
  for (double t : t_grid) {
    const auto r = check_shifted_submodularity(space, t, alpha, seed, 20000, tol);
    if (!r.submodular() || !r.increasing()) last = t;
  }
  return last;
}

}  // namespace magkit

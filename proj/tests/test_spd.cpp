#include "support.hpp"

using namespace magkit;

namespace {

void expect_all_characterizations(const SpdCertificate& c, bool value) {
  EXPECT_EQ(c.characterizations.sign_pattern, value);
  EXPECT_EQ(c.characterizations.m_matrix, value);
  EXPECT_EQ(c.characterizations.laplacian, value);
  EXPECT_EQ(c.characterizations.circumcenter_interior, value);
}

// A planar cloud that is positive definite at t = 1 but has a negative
// coefficient there.
std::optional<MetricSpace> find_obtuse_cloud(oracle::Rng& rng, std::size_t n) {
  for (int tries = 0; tries < 5000; ++tries) {
    const MetricSpace x = support::random_cloud(rng, n, 2, 3.0);
    const SpdCertificate c = spd_certificate(x);
    if (c.is_pd && !c.c_positive) return x;
  }
  return std::nullopt;
}

}  // namespace

TEST(SpdCertificate, DiscreteSpaces) {
  for (std::size_t n : {2u, 3u, 5u, 8u}) {
    const SpdCertificate c = spd_certificate(support::discrete(n));
    EXPECT_TRUE(c.verdict) << n;
    expect_all_characterizations(c, true);
    EXPECT_NEAR(c.min_c, 2.0 / static_cast<double>(n), 1e-12);
    EXPECT_NEAR(c.min_w, 1.0, 1e-12);
  }
}

TEST(SpdCertificate, EveryTwoPointSpace) {
  for (double d : {1e-4, 0.01, 0.5, 1.0, 5.0, 40.0}) {
    const MetricSpace x = support::two_point(d);
    const SpdCertificate c = spd_certificate(x);
    EXPECT_TRUE(c.verdict) << d;
    EXPECT_TRUE(c.characterizations_agree());
    EXPECT_NEAR(c.min_c, 1.0 / (1.0 - std::exp(-d)), 1e-8 / (1.0 - std::exp(-d)));
    EXPECT_TRUE(spd_semialgebraic_check(similarity_matrix(x)));
  }
}

TEST(SpdCertificate, TwoClusterSpaceIsConsistent) {
  const SpdCertificate c = spd_certificate(support::two_cluster());
  EXPECT_TRUE(c.characterizations_agree());
  EXPECT_EQ(c.verdict, spd_semialgebraic_check(similarity_matrix(support::two_cluster())));
}

TEST(SpdCertificate, ZeroWeightIsABoundaryCase) {
  Matrix z(3, 3);
  z << 1, 0.5, 0.75, 0.5, 1, 0.75, 0.75, 0.75, 1;
  const SpdCertificate c = spd_certificate_from_similarity(z);
  EXPECT_TRUE(c.is_pd);
  EXPECT_TRUE(c.w_boundary);
  EXPECT_FALSE(c.w_positive);
  EXPECT_FALSE(c.verdict);
  EXPECT_FALSE(c.characterizations.circumcenter_interior);
}

TEST(SpdCertificate, NotPositiveDefiniteFailsEverything) {
  const MetricSpace k32 = scale(from_distance_matrix(oracle::bipartite_metric(3, 2)), 0.2);
  const SpdCertificate c = spd_certificate(k32);
  EXPECT_FALSE(c.is_pd);
  EXPECT_FALSE(c.verdict);
  EXPECT_FALSE(spd_semialgebraic_check(similarity_matrix(k32)));
}

TEST(SpdCertificate, SingularSimilarityForSemialgebraicCheck) {
  const MetricSpace k32 = from_distance_matrix(oracle::bipartite_metric(3, 2));
  EXPECT_MAGKIT_ERROR(spd_semialgebraic_check(similarity_matrix(scale(k32, std::log(std::sqrt(2.0))))),
                      ErrorCode::SingularZ);
}

TEST(SpdCertificate, AllRoutesAgreeOnMixedInstances) {
  oracle::Rng rng(61);
  int spd = 0, not_spd = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = oracle::uniform_int(rng, 2, 8);
    const MetricSpace x =
        rep % 2 == 0
            ? scale(support::random_cloud(rng, n), oracle::uniform(rng, 0.2, 4.0))
            : from_distance_matrix(oracle::random_graph_metric(rng, n, 0.1, 3.0));
    const Matrix z = similarity_matrix(x);
    if (classify_definiteness(z) == Definiteness::Singular) continue;
    const SpdCertificate c = spd_certificate_from_similarity(z);
    if (c.w_boundary || c.c_boundary) continue;
    EXPECT_TRUE(c.characterizations_agree()) << rep;
    EXPECT_EQ(spd_semialgebraic_check(z), c.verdict) << rep;
    (c.verdict ? spd : not_spd)++;
  }
  EXPECT_GT(spd, 20);
  EXPECT_GT(not_spd, 20);
}

TEST(SpdCertificate, ClosedUnderSubspaces) {
  oracle::Rng rng(62);
  int checked = 0;
  for (int rep = 0; rep < 40 && checked < 8; ++rep) {
    const std::size_t n = oracle::uniform_int(rng, 3, 8);
    const MetricSpace x = scale(support::random_cloud(rng, n), oracle::uniform(rng, 0.5, 3.0));
    if (!spd_certificate(x).verdict) continue;
    ++checked;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      EXPECT_TRUE(spd_certificate(restrict(x, SubsetSelector::from_mask(mask))).verdict) << mask;
    }
    // one-point deletion keeps the coefficients positive
    const CoefficientData after = delete_point_coefficients(coefficients(x), 0);
    for_each_pair(n - 1, [&](std::size_t i, std::size_t j) { EXPECT_GT(after.c(i, j), 0.0); });
  }
  EXPECT_GE(checked, 8);
}

TEST(ScaleThreshold, DiscreteLikeSpace) {
  const auto r = spd_scale_threshold(support::discrete(4, 5.0), 1e4);
  EXPECT_LE(r.t_star, 1.0);
  EXPECT_FALSE(r.trace.empty());
}

TEST(ScaleThreshold, TwoClusterSpaceHasFiniteThreshold) {
  const MetricSpace x = support::two_cluster();
  const auto r = spd_scale_threshold(x, 1e4);
  EXPECT_GT(r.t_star, 0.0);
  EXPECT_TRUE(spd_certificate(scale(x, r.t_star)).verdict);
  EXPECT_TRUE(spd_certificate(scale(x, 2.0 * r.t_star)).verdict);
  EXPECT_TRUE(spd_certificate(scale(x, 10.0 * r.t_star)).verdict);
}

TEST(ScaleThreshold, ObtuseCloudNeedsLargerScale) {
  oracle::Rng rng(63);
  const auto x = find_obtuse_cloud(rng, 6);
  ASSERT_TRUE(x) << "no positive definite cloud with a negative coefficient found";
  const auto r = spd_scale_threshold(*x, 1e4);
  EXPECT_GT(r.t_star, 1.0);
  EXPECT_TRUE(spd_certificate(scale(*x, r.t_star)).verdict);
  // bisection precision: slightly below t* fails somewhere in the trace
  bool saw_failure_near = false;
  for (const auto& [t, ok] : r.trace) {
    if (!ok && t < r.t_star && t > r.t_star * (1.0 - 1e-5)) saw_failure_near = true;
  }
  EXPECT_TRUE(saw_failure_near);
  EXPECT_MAGKIT_ERROR(spd_scale_threshold(*x, 1.0), ErrorCode::ThresholdNotFound);
}

TEST(ScaleThreshold, RejectsNonpositiveMaximum) {
  EXPECT_MAGKIT_ERROR(spd_scale_threshold(support::two_point(1.0), 0.0),
                      ErrorCode::NonpositiveScale);
}

TEST(InverseSubmodularity, StronglyPositiveDefiniteSixPoints) {
  oracle::Rng rng(64);
  MetricSpace x = support::random_cloud(rng, 6);
  while (!spd_certificate(x).verdict) x = support::random_cloud(rng, 6);
  const SetFunctionReport r = check_inverse_submodularity(x, -2.0);
  EXPECT_TRUE(r.hypothesis_holds);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.quadruples_checked, 6u * 5u / 2u * 16u);
  EXPECT_EQ(r.pairs_checked, 6u * 32u);
  EXPECT_EQ(r.violation_count, 0u);
  EXPECT_EQ(r.monotonicity_violation_count, 0u);
  EXPECT_TRUE(r.submodular());
  EXPECT_TRUE(r.increasing());
}

TEST(InverseSubmodularity, TwoPointQuadruplesFailAboveMinusThreeHalves) {
  // a far pair makes |{x,y}| close to 2
  const MetricSpace x = support::discrete(4, 5.0);
  const SetFunctionReport r = check_inverse_submodularity(x, -1.4);
  ASSERT_GT(r.violation_count, 0u);
  for (const auto& v : r.violations) {
    EXPECT_EQ(std::popcount(v.subset), 2);
    EXPECT_GE(v.margin, 0.0);
  }
  EXPECT_TRUE(std::is_sorted(r.violations.begin(), r.violations.end(),
                             [](const auto& a, const auto& b) { return a.subset < b.subset; }));
  // between -3/2 and -1 the function is still increasing
  EXPECT_EQ(r.monotonicity_violation_count, 0u);
}

TEST(InverseSubmodularity, EqualityAtTheBoundaryCountsAsViolation) {
  const SetFunctionReport r = check_inverse_submodularity(support::discrete(3, 60.0), -1.5);
  EXPECT_GT(r.violation_count, 0u);
}

TEST(InverseSubmodularity, SingletonsAreMinusOne) {
  const Matrix z = similarity_matrix(support::small_example());
  const Tolerances tol;
  const detail::SetFunction f(z, SetFunctionKind::InverseMagnitude, -2.0, tol);
  for (std::uint64_t i = 0; i < 3; ++i) EXPECT_EQ(f(std::uint64_t{1} << i), -1.0);
  EXPECT_EQ(f(0), -2.0);
}

TEST(InverseSubmodularity, WarnsWhenHypothesisFails) {
  oracle::Rng rng(65);
  const auto x = find_obtuse_cloud(rng, 5);
  ASSERT_TRUE(x);
  const SetFunctionReport r = check_inverse_submodularity(*x, -2.0);
  EXPECT_FALSE(r.hypothesis_holds);
  ASSERT_FALSE(r.warnings.empty());
}

TEST(InverseSubmodularity, TooManyPoints) {
  EXPECT_MAGKIT_ERROR(check_inverse_submodularity(support::discrete(63), -2.0),
                      ErrorCode::TooManyPoints);
}

TEST(InverseSubmodularity, SampledModeIsDeterministic) {
  oracle::Rng rng(66);
  const MetricSpace x = support::random_cloud(rng, 18, 2, 10.0);
  const SetFunctionReport a = check_inverse_submodularity(x, -2.0, 9, 500);
  const SetFunctionReport b = check_inverse_submodularity(x, -2.0, 9, 500);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.quadruples_checked, 500u);
  EXPECT_EQ(a.violation_count, b.violation_count);
  EXPECT_EQ(a.violations.size(), b.violations.size());
}

TEST(ShiftedSubmodularity, FarApartCloudHasNoViolations) {
  oracle::Rng rng(67);
  const auto pts = oracle::random_points(rng, 6, 2, 0.0, 10.0, 1.0);
  const MetricSpace x = from_points_euclidean(pts);
  const SetFunctionReport r = check_shifted_submodularity(x, 30.0, -1.0);
  EXPECT_TRUE(r.submodular());
  EXPECT_TRUE(r.increasing());
  EXPECT_LT(r.max_f, 0.0);
  EXPECT_LT(r.max_g, 0.0);
  EXPECT_LT(r.max_h, 0.0);
  EXPECT_EQ(r.f_values.size() + r.g_values.size(), r.quadruples_checked);
  EXPECT_EQ(r.h_values.size(), r.pairs_checked);
}

TEST(ShiftedSubmodularity, DiscreteLimitValues) {
  oracle::Rng rng(68);
  const MetricSpace x = support::random_cloud(rng, 6);
  const double alpha = -1.0;
  const SetFunctionReport r = check_shifted_submodularity(x, 200.0 / x.min_distance(), alpha);
  EXPECT_NEAR(r.f_targets[4], -1.0 / 12.0, 1e-15);
  EXPECT_NEAR(r.g_target, -0.5, 1e-15);
  for (const auto& v : r.f_values) {
    EXPECT_NEAR(v.value, r.f_targets[static_cast<std::size_t>(std::popcount(v.subset))], 1e-9);
  }
  for (const auto& v : r.g_values) EXPECT_NEAR(v.value, r.g_target, 1e-9);
  for (const auto& v : r.h_values) {
    const auto m = static_cast<double>(std::popcount(v.subset));
    const auto mp = static_cast<double>(std::popcount(v.larger));
    const double target = m == 0 ? alpha : (mp - m) / (m * mp);
    EXPECT_NEAR(v.value, m == 0 ? target : -target, 1e-9);
  }
}

TEST(ShiftedSubmodularity, OnsetIsReportedOnTheGrid) {
  oracle::Rng rng(69);
  const MetricSpace x = support::random_cloud(rng, 5);
  const auto grid = log_grid(0.1, 100.0, 4);
  const auto onset = shifted_violation_onset(x, -1.0, grid);
  if (onset) {
    const auto r = check_shifted_submodularity(x, *onset, -1.0);
    EXPECT_FALSE(r.submodular() && r.increasing());
  }
  EXPECT_TRUE(check_shifted_submodularity(x, 100.0 / x.min_distance(), -1.0).submodular());
}

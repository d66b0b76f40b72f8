#include "support.hpp"

using namespace magkit;

namespace {

Matrix squared_edge_lengths(const Matrix& pts) {
  const Index n = pts.cols();
  Matrix sq(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) sq(i, j) = (pts.col(i) - pts.col(j)).squaredNorm();
  }
  return sq;
}

}  // namespace

TEST(CenteredSimilarity, SmallExampleMatchesExactRationals) {
  Matrix expected(3, 3);
  expected << 1.9, -0.35, -1.55, -0.35, 1.9, -1.55, -1.55, -1.55, 3.1;
  expected /= 9.0;
  const Matrix k = centered_similarity(similarity_matrix(support::small_example()));
  EXPECT_LE((k - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CenteredSimilarity, IdentityOnTwoPoints) {
  const Matrix k = centered_similarity(Matrix::Identity(2, 2));
  EXPECT_NEAR(k(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(k(0, 1), -0.25, 1e-15);
}

TEST(CenteredSimilarity, AgreesWithProjectionProductAndKillsOnes) {
  oracle::Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const MetricSpace x = support::random_cloud(rng, oracle::uniform_int(rng, 1, 10));
    const Matrix z = similarity_matrix(x);
    const Matrix k = centered_similarity(z);
    EXPECT_LE(oracle::max_abs_diff(oracle::centered(oracle::from_eigen(z)), k), 1e-14);
    EXPECT_LE((k * Vector::Ones(k.rows())).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Embedding, SmallExampleSquaredDistances) {
  const EmbeddingData e = similarity_embedding(support::small_example());
  const Matrix sq = squared_edge_lengths(e.sqrt_k);
  EXPECT_NEAR(sq(0, 1), 0.5, 1e-12);
  EXPECT_NEAR(sq(0, 2), 0.9, 1e-12);
  EXPECT_NEAR(sq(1, 2), 0.9, 1e-12);
  EXPECT_LE((e.sqrt_k.transpose() * e.sqrt_k - e.k).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Embedding, TwoPointsOnALine) {
  for (double d : {0.3, 1.0, 4.0}) {
    const EmbeddingData e = similarity_embedding(support::two_point(d));
    ASSERT_EQ(e.sqrt_k.rows(), 1);
    EXPECT_NEAR(std::abs(e.sqrt_k(0, 0) - e.sqrt_k(0, 1)), std::sqrt(1.0 - std::exp(-d)), 1e-12);
    EXPECT_NEAR(e.radius(), 0.5 * std::sqrt(1.0 - std::exp(-d)), 1e-12);
    EXPECT_NEAR(e.barycentric()(0), 0.5, 1e-12);
  }
}

TEST(Embedding, NearDiscreteLimitHasUnitEdges) {
  oracle::Rng rng(32);
  const MetricSpace x = support::random_cloud(rng, 6);
  const MetricSpace far = scale(x, 40.0 / x.min_distance());
  const Matrix sq = squared_edge_lengths(similarity_embedding(far).sqrt_k);
  for (Index i = 0; i < sq.rows(); ++i) {
    for (Index j = 0; j < sq.cols(); ++j) {
      if (i != j) EXPECT_NEAR(std::sqrt(sq(i, j)), 1.0, 1e-10);
    }
  }
}

TEST(Embedding, RequiresPositiveDefinite) {
  const MetricSpace k32 = from_distance_matrix(oracle::bipartite_metric(3, 2));
  EXPECT_MAGKIT_ERROR(similarity_embedding(scale(k32, 0.2)), ErrorCode::NotPositiveDefinite);
  EXPECT_MAGKIT_ERROR(magnitude_via_circumradius(scale(k32, 0.2)),
                      ErrorCode::NotPositiveDefinite);
}

TEST(Embedding, PropertiesOnRandomClouds) {
  oracle::Rng rng(33);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = oracle::uniform_int(rng, 2, 10);
    const MetricSpace x = scale(support::random_cloud(rng, n), oracle::uniform(rng, 0.3, 4.0));
    const Matrix z = similarity_matrix(x);
    const EmbeddingData e = similarity_embedding(x);
    // isometry onto 1 - z
    const Matrix sq = squared_edge_lengths(e.sqrt_k);
    EXPECT_LE((sq - (Matrix::Ones(z.rows(), z.cols()) - z)).cwiseAbs().maxCoeff(), 1e-10);
    // circumcenter equidistant from every vertex
    const Vector c = e.circumcenter();
    double lo = 1e300, hi = 0.0;
    for (Index i = 0; i < e.sqrt_k.cols(); ++i) {
      const double r = (e.sqrt_k.col(i) - c).norm();
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_LE(hi - lo, 1e-10);
    EXPECT_NEAR(hi, e.radius(), 1e-10);
    EXPECT_NEAR(e.barycentric().sum(), 1.0, 1e-12);
    // the two circumradius routes agree
    const double geo = circumradius_geometric(e.sqrt_k).radius;
    EXPECT_TRUE(oracle::relatively_close(geo, e.radius(), 1e-9));
    // p = w / |X| and 1 - 2R^2 = 1/|X|
    const double mag = oracle::magnitude(oracle::from_eigen(x.distances()));
    const auto w = oracle::weighting(oracle::from_eigen(x.distances()));
    for (Index i = 0; i < z.rows(); ++i) {
      EXPECT_NEAR(e.barycentric()(i), w[static_cast<std::size_t>(i)] / mag, 1e-10);
    }
    EXPECT_TRUE(oracle::relatively_close(magnitude_via_circumradius(x), mag, 1e-9));
    // restriction of the embedding is the embedding of the subspace
    const std::uint64_t mask = oracle::uniform_int(rng, 1, (std::size_t{1} << n) - 1);
    const auto s = SubsetSelector::from_mask(mask);
    const Matrix pts = gather(e.sqrt_k, SubsetSelector::all(n - 1), s);
    const Index m = pts.cols();
    const Matrix centered = pts.colwise() - pts.rowwise().mean();
    const Matrix gram = centered.transpose() * centered;
    const Matrix ky = centered_similarity(gather(z, s));
    EXPECT_LE((gram - ky).cwiseAbs().maxCoeff(), 1e-10) << "m = " << m;
  }
}

TEST(Circumsphere, IdentityIsTheRegularSimplex) {
  for (Index n : {2, 3, 5, 8}) {
    const Circumsphere cs = circumradius_equilibrium(Matrix::Identity(n, n));
    const double nd = static_cast<double>(n);
    EXPECT_NEAR(cs.radius_squared, (nd - 1.0) / (2.0 * nd), 1e-14);
    EXPECT_NEAR(cs.deficit, 0.0, 1e-15);
    for (Index i = 0; i < n; ++i) EXPECT_NEAR(cs.barycentric(i), 1.0 / nd, 1e-14);
  }
}

TEST(Circumsphere, SmallExampleRoutesAgree) {
  const EmbeddingData e = similarity_embedding(support::small_example());
  EXPECT_NEAR(circumradius_geometric(e.sqrt_k).radius, e.radius(), 1e-10);
  EXPECT_NEAR(magnitude_via_circumradius(support::small_example()), 155.0 / 74.0, 1e-10);
}

TEST(Circumsphere, GeometricClassicalCases) {
  Matrix seg(1, 2);
  seg << 0.0, 3.0;
  const auto s = circumradius_geometric(seg);
  EXPECT_NEAR(s.radius, 1.5, 1e-14);
  EXPECT_NEAR(s.center(0), 1.5, 1e-14);

  Matrix tri(2, 3);
  tri << 0.0, 1.0, 0.5, 0.0, 0.0, std::sqrt(3.0) / 2.0;
  EXPECT_NEAR(circumradius_geometric(tri).radius, 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(Circumsphere, DegenerateSimplexIsRejected) {
  Matrix collinear(2, 3);
  collinear << 0.0, 1.0, 2.0, 0.0, 0.0, 0.0;
  EXPECT_MAGKIT_ERROR(circumradius_geometric(collinear), ErrorCode::DegenerateSimplex);
}

TEST(SubspaceCharacterization, ExhaustiveOnEightPoints) {
  oracle::Rng rng(34);
  const MetricSpace x = support::random_cloud(rng, 8);
  const auto rep = verify_subspace_characterization(x, 1000);
  EXPECT_TRUE(rep.exhaustive);
  EXPECT_EQ(rep.subsets_checked, 255u);
  EXPECT_LE(rep.max_abs_deviation, 1e-9);
}

TEST(SubspaceCharacterization, PairsReduceToEdgeLengths) {
  oracle::Rng rng(35);
  const MetricSpace x = support::random_cloud(rng, 5);
  const EmbeddingData e = similarity_embedding(x);
  for_each_pair(5, [&](std::size_t i, std::size_t j) {
    const double sq = (e.sqrt_k.col(static_cast<Index>(i)) - e.sqrt_k.col(static_cast<Index>(j)))
                          .squaredNorm();
    EXPECT_NEAR(sq, 1.0 - std::exp(-x.distance(i, j)), 1e-12);
  });
}

TEST(SubspaceCharacterization, SampledModeIsReproducible) {
  oracle::Rng rng(36);
  const MetricSpace x = support::random_cloud(rng, 10);
  const auto a = verify_subspace_characterization(x, 100, 7);
  const auto b = verify_subspace_characterization(x, 100, 7);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.subsets_checked, 100u);
  EXPECT_EQ(a.worst_subset, b.worst_subset);
  EXPECT_EQ(a.max_abs_deviation, b.max_abs_deviation);
  EXPECT_LE(a.max_abs_deviation, 1e-9);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "svito/algebra_suite.hpp"
#include "svito/convex_set.hpp"

using namespace svito;

namespace {

ConvexSet iv(double lo, double hi) { return ConvexSet::interval(lo, hi); }

// Hull of pairwise sums of dense samples, the brute-force Minkowski oracle for boxes.
ConvexSet brute_force_box_sum(const Box& a, const Box& b, int per_axis) {
  const std::size_t n = a.lo.size();
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  for (std::size_t i = 0; i < n; ++i)
    for (int p = 0; p <= per_axis; ++p)
      for (int q = 0; q <= per_axis; ++q) {
        const double x = a.lo[i] + (a.hi[i] - a.lo[i]) * p / per_axis;
        const double y = b.lo[i] + (b.hi[i] - b.lo[i]) * q / per_axis;
        lo[i] = std::min(lo[i], x + y);
        hi[i] = std::max(hi[i], x + y);
      }
  return ConvexSet::box(lo, hi);
}

// Directed distance from a point cloud to a box, by projection.
double cloud_excess(const std::vector<std::array<double, 2>>& pts, const Box& b) {
  double worst = 0.0;
  for (const auto& p : pts) {
    double sq = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double c = std::clamp(p[i], b.lo[i], b.hi[i]);
      sq += (p[i] - c) * (p[i] - c);
    }
    worst = std::max(worst, std::sqrt(sq));
  }
  return worst;
}

}  // namespace

TEST(MinkowskiSum, IntervalEndpoints) {
  EXPECT_EQ(minkowski_sum(iv(0, 1), iv(2, 3)), iv(2, 4));
  const auto a = iv(-1.5, 2.25);
  EXPECT_EQ(minkowski_sum(a, ConvexSet::point(0)), a);
}

TEST(MinkowskiSum, BoxMatchesBruteForceHull) {
  const auto a = ConvexSet::box({0, -1}, {1, 0});
  const auto b = ConvexSet::box({1, 0}, {2, 2});
  const auto oracle = brute_force_box_sum(a.as_box(), b.as_box(), 40);
  EXPECT_EQ(oracle, ConvexSet::box({1, -1}, {3, 2}));
  EXPECT_LE(hausdorff_distance(minkowski_sum(a, b), oracle), 1e-12);
}

TEST(MinkowskiSum, CommutativeAndAssociative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 200; ++t) {
    auto rnd = [&] {
      const double a = u(rng), b = u(rng);
      return iv(std::min(a, b), std::max(a, b));
    };
    const auto a = rnd(), b = rnd(), c = rnd();
    EXPECT_EQ(minkowski_sum(a, b), minkowski_sum(b, a));
    EXPECT_LE(hausdorff_distance(minkowski_sum(minkowski_sum(a, b), c), minkowski_sum(a, minkowski_sum(b, c))), 1e-12);
  }
}

TEST(MinkowskiSum, MismatchIsStructural) {
  EXPECT_THROW(minkowski_sum(iv(0, 1), ConvexSet::box({0, 0}, {1, 1})), StructuralError);
  EXPECT_THROW(minkowski_sum(ConvexSet::box({0}, {1}), ConvexSet::box({0, 0}, {1, 1})), StructuralError);
  const auto g8 = DirectionGrid::uniform_circle(8), g6 = DirectionGrid::uniform_circle(6);
  const std::vector<double> pt{0.0, 0.0};
  EXPECT_THROW(minkowski_sum(ConvexSet::support_of_points(g8, pt), ConvexSet::support_of_points(g6, pt)), StructuralError);
}

TEST(ScalarMul, Intervals) {
  EXPECT_EQ(scalar_mul(2, iv(-1, 3)), iv(-2, 6));
  EXPECT_EQ(scalar_mul(-1, iv(0, 1)), iv(-1, 0));
  EXPECT_EQ(scalar_mul(0, iv(-4, 7)), ConvexSet::point(0));
  EXPECT_EQ(format_set(scalar_mul(0, iv(-4, 7))), "[0,0]");
}

TEST(ScalarMul, NegativeNeedsSymmetricGrid) {
  const std::vector<double> tri{0, 0, 1, 0, 0, 1};
  const auto sym = ConvexSet::support_of_points(DirectionGrid::uniform_circle(8), tri);
  const auto flipped = scalar_mul(-1, sym);
  const std::vector<double> neg{0, 0, -1, 0, 0, -1};
  EXPECT_LE(hausdorff_distance(flipped, ConvexSet::support_of_points(DirectionGrid::uniform_circle(8), neg)), 1e-12);

  const auto odd = ConvexSet::support_of_points(DirectionGrid::uniform_circle(5), tri);
  EXPECT_NO_THROW(scalar_mul(2.0, odd));
  EXPECT_THROW(scalar_mul(-1.0, odd), UnsupportedOperation);
}

TEST(Hukuhara, IntervalExamples) {
  const auto r = hukuhara_diff(iv(0, 3), iv(1, 2));
  ASSERT_TRUE(r.exists());
  EXPECT_EQ(r.value(), iv(-1, 1));
  EXPECT_EQ(minkowski_sum(iv(1, 2), r.value()), iv(0, 3));
  EXPECT_LE(r.residual, kExistenceTol);

  const auto a = iv(-2.5, 4);
  EXPECT_EQ(hukuhara_diff(a, a).value(), ConvexSet::point(0));

  const auto none = hukuhara_diff(iv(0, 1), iv(0, 2));
  EXPECT_FALSE(none.exists());
  ASSERT_TRUE(none.witness.has_value());
  EXPECT_DOUBLE_EQ(none.witness->deficit, 1.0);
  EXPECT_THROW(none.value(), DiagnosticFailure);
}

TEST(Hukuhara, WitnessAdmitsNoTranslate) {
  // Exhaustive check over fine translates for every failing lattice pair.
  for (int al = -4; al <= 4; ++al)
    for (int aw = 0; aw <= 4; ++aw)
      for (int bl = -4; bl <= 4; ++bl)
        for (int bw = 0; bw <= 4; ++bw) {
          const auto a = iv(al * 0.5, al * 0.5 + aw * 0.5), b = iv(bl * 0.5, bl * 0.5 + bw * 0.5);
          const auto r = hukuhara_diff(a, b);
          EXPECT_EQ(r.exists(), aw >= bw);
          if (r.exists()) continue;
          const double w = r.witness->extreme_point[0];
          for (int q = -400; q <= 400; ++q) {
            const double x = q / 40.0;
            const bool fits = x + b.as_interval().lo >= a.as_interval().lo && x + b.as_interval().hi <= a.as_interval().hi;
            const bool covers = w >= x + b.as_interval().lo && w <= x + b.as_interval().hi;
            EXPECT_FALSE(fits && covers);
          }
        }
}

TEST(Hukuhara, BoxComponentwise) {
  const auto a = ConvexSet::box({0, 0}, {3, 2}), b = ConvexSet::box({1, 0}, {2, 1});
  EXPECT_EQ(hukuhara_diff(a, b).value(), ConvexSet::box({-1, 0}, {1, 1}));
  const auto fail = hukuhara_diff(b, a);
  EXPECT_FALSE(fail.exists());
  EXPECT_NEAR(fail.witness->deficit, 2.0, 1e-15);
}

TEST(Hukuhara, SupportSampledRecoversSummand) {
  const auto grid = DirectionGrid::uniform_circle(12);
  const std::vector<double> tri{0, 0, 2, 0, 0, 1};
  const std::vector<double> sq{-1, -1, 1, -1, 1, 1, -1, 1};
  const auto b = ConvexSet::support_of_points(grid, tri), c = ConvexSet::support_of_points(grid, sq);
  const auto a = minkowski_sum(b, c);
  const auto r = hukuhara_diff(a, b);
  ASSERT_TRUE(r.exists());
  EXPECT_LE(hausdorff_distance(r.value(), c), 1e-9);
  EXPECT_LE(hausdorff_distance(minkowski_sum(b, r.value()), a), 1e-9);
  // A triangle is not a square plus anything.
  EXPECT_FALSE(hukuhara_diff(b, c).exists());
  EXPECT_FALSE(hukuhara_diff(c, b).exists());
}

TEST(Hukuhara, NearlyEqualWidthsCollapseToMidpoint) {
  const auto a = iv(0.0, 1.0), b = iv(0.0, 1.0 + 1e-12);
  const auto r = hukuhara_diff(a, b);
  ASSERT_TRUE(r.exists());
  EXPECT_LE(r.residual, 1e-9);
  EXPECT_EQ(r.value().as_interval().lo, r.value().as_interval().hi);
}

TEST(Hausdorff, Examples) {
  EXPECT_EQ(hausdorff_distance(iv(0, 1), iv(0, 2)), 1.0);
  EXPECT_EQ(hausdorff_distance(iv(-3, 5), iv(-3, 5)), 0.0);
}

TEST(Hausdorff, BoxMatchesPointCloudOracle) {
  // Dense samples of A against exact projection onto B, both directions.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> alo(2), ahi(2), blo(2), bhi(2);
    for (int i = 0; i < 2; ++i) {
      alo[i] = u(rng), ahi[i] = alo[i] + std::abs(u(rng));
      blo[i] = u(rng), bhi[i] = blo[i] + std::abs(u(rng));
    }
    const auto a = ConvexSet::box(alo, ahi), b = ConvexSet::box(blo, bhi);
    auto cloud = [](const Box& x) {
      std::vector<std::array<double, 2>> pts;
      for (int p = 0; p <= 60; ++p)
        for (int q = 0; q <= 60; ++q)
          pts.push_back({x.lo[0] + (x.hi[0] - x.lo[0]) * p / 60.0, x.lo[1] + (x.hi[1] - x.lo[1]) * q / 60.0});
      return pts;
    };
    const double oracle = std::max(cloud_excess(cloud(a.as_box()), b.as_box()), cloud_excess(cloud(b.as_box()), a.as_box()));
    // Corners are sampled exactly and the farthest point of a box from a convex set is a corner.
    EXPECT_NEAR(hausdorff_distance(a, b), oracle, 1e-12);
  }
}

TEST(Hausdorff, MetricAxiomsOnBoxes) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int t = 0; t < 500; ++t) {
    auto rnd = [&] {
      std::vector<double> lo(3), hi(3);
      for (int i = 0; i < 3; ++i) lo[i] = u(rng), hi[i] = lo[i] + std::abs(u(rng));
      return ConvexSet::box(lo, hi);
    };
    const auto a = rnd(), b = rnd(), c = rnd();
    EXPECT_EQ(hausdorff_distance(a, b), hausdorff_distance(b, a));
    EXPECT_LE(hausdorff_distance(a, c), hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
  }
}

TEST(Hausdorff, EqualsNormOfDifference) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 1000; ++t) {
    const double blo = u(rng), bw = std::abs(u(rng)), clo = u(rng), cw = std::abs(u(rng));
    const auto b = iv(blo, blo + bw), a = minkowski_sum(b, iv(clo, clo + cw));
    EXPECT_NEAR(hausdorff_distance(a, b), set_norm(hukuhara_diff(a, b).value()), 1e-12);
  }
}

TEST(SetNorm, Examples) {
  EXPECT_EQ(set_norm(iv(-2, 1)), 2.0);
  EXPECT_EQ(set_norm(ConvexSet::point(0)), 0.0);
  EXPECT_EQ(set_norm(minkowski_sum(iv(1, 2), iv(3, 4))), 6.0);
  EXPECT_LE(set_norm(minkowski_sum(iv(1, 2), iv(3, 4))), set_norm(iv(1, 2)) + set_norm(iv(3, 4)));
  EXPECT_DOUBLE_EQ(set_norm(ConvexSet::box({-3, 0}, {1, 4})), 5.0);
}

TEST(Translation, Examples) {
  const auto c = is_translation(iv(1, 2), iv(0, 1));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ((*c)[0], 1.0);
  EXPECT_FALSE(is_translation(iv(0, 2), iv(0, 1)).has_value());
  EXPECT_TRUE(hukuhara_diff(iv(0, 2), iv(0, 1)).exists());
  EXPECT_FALSE(hukuhara_diff(iv(0, 1), iv(0, 2)).exists());
  const auto zero = is_translation(iv(-1, 4), iv(-1, 4));
  ASSERT_TRUE(zero.has_value());
  EXPECT_EQ((*zero)[0], 0.0);
}

TEST(Literals, RoundTrip) {
  EXPECT_EQ(parse_set("[0,1]"), iv(0, 1));
  EXPECT_EQ(parse_set(" [ -0.5 , 2 ] "), iv(-0.5, 2));
  EXPECT_EQ(parse_set("[0,1]x[-1,0]"), ConvexSet::box({0, -1}, {1, 0}));
  for (const char* text : {"[0.1,0.30000000000000004]", "[1e-300,2]x[3,4]x[-5,-5]"})
    EXPECT_EQ(format_set(parse_set(text)), text);
  EXPECT_THROW(parse_set("[1,0]"), UsageError);
  EXPECT_THROW(parse_set("[0,1"), UsageError);
  EXPECT_THROW(parse_set("[0;1]"), UsageError);
  EXPECT_THROW(parse_set("[0,1]y[0,1]"), UsageError);
}

TEST(SquareImage, SignChangeMapsThroughZero) {
  const auto s = square_image({-1, 2});
  EXPECT_EQ(s.lo, 0.0);
  EXPECT_EQ(s.hi, 4.0);
  const auto n = square_image({-3, -2});
  EXPECT_EQ(n.lo, 4.0);
  EXPECT_EQ(n.hi, 9.0);
}

TEST(AlgebraSuite, AllIdentitiesHoldOnSmallRun) {
  const auto report = run_algebra_suite(2000, 500, 99);
  for (const auto& p : report.properties) EXPECT_EQ(p.failures, 0u) << p.name << " worst " << p.worst;
  EXPECT_TRUE(report.passed());
}

TEST(AlgebraSuite, ErosionOracleAgrees) {
  const auto r = run_erosion_agreement(400, 5);
  EXPECT_EQ(r.interval_agree, r.interval_pairs);
  EXPECT_EQ(r.box_agree, r.box_pairs);
  EXPECT_EQ(r.witness_ok, r.witness_checks);
  EXPECT_GT(r.witness_checks, 0u);
}

TEST(Structure, InvalidSetsRejected) {
  EXPECT_THROW(ConvexSet::interval(1, 0), StructuralError);
  EXPECT_THROW(ConvexSet::box({0, 1}, {1, 0}), StructuralError);
  EXPECT_THROW(ConvexSet::support(DirectionGrid::uniform_circle(4), {-1, -1, -1, -1}), StructuralError);
  EXPECT_THROW(DirectionGrid(2, {1, 0, 0, 1}), StructuralError);  // not positively spanning
  EXPECT_THROW(DirectionGrid(3, {1, 0, 0}), UnsupportedOperation);
}

#include <gtest/gtest.h>

#include <sstream>

#include "svito/ito_formula.hpp"

using namespace svito;

namespace {

SetValuedProcess constant(double lo, double hi) { return SetValuedProcess::constant(ConvexSet::interval(lo, hi)); }

SetItoProcess process(double x0, double flo, double fhi, double glo, double ghi) {
  return {x0, constant(flo, fhi), constant(glo, ghi)};
}

}  // namespace

TEST(Transforms, PartialsMatchFiniteDifferences) {
  for (const auto& phi : {TransformSpec::identity(), TransformSpec::square(), TransformSpec::translate(-0.7), TransformSpec::time_times_x()})
    EXPECT_LE(partials_mismatch(phi), 1e-6) << phi.name;
}

TEST(Transforms, WrongPartialIsCaught) {
  auto phi = TransformSpec::square();
  phi.dxx = [](double, double) { return 1.0; };
  EXPECT_GT(partials_mismatch(phi), 0.1);
}

TEST(Transforms, Images) {
  const Interval x{-1, 2};
  const auto sq = transform_image(TransformSpec::square(), 1.0, x);
  EXPECT_EQ(sq.lo, 0.0);
  EXPECT_EQ(sq.hi, 4.0);
  const auto id = transform_image(TransformSpec::identity(), 1.0, x);
  EXPECT_EQ(id.lo, -1.0);
  EXPECT_EQ(id.hi, 2.0);
  const auto tr = transform_image(TransformSpec::translate(0.5), 1.0, x);
  EXPECT_EQ(tr.lo, -0.5);
  EXPECT_EQ(tr.hi, 2.5);
  // Sampled image of an undeclared transform.
  auto cube = TransformSpec::identity();
  cube.value = [](double, double v) { return v * v * v - v; };
  cube.image = nullptr;
  const auto c = transform_image(cube, 0.0, Interval{-1, 1});
  EXPECT_NEAR(c.hi, 2 / (3 * std::sqrt(3.0)), 1e-4);
  EXPECT_NEAR(c.lo, -2 / (3 * std::sqrt(3.0)), 1e-4);
}

TEST(Transforms, ParseNames) {
  EXPECT_EQ(parse_transform("square").name, "square");
  EXPECT_EQ(parse_transform("translate:2").value(0, 1), 3.0);
  EXPECT_THROW(parse_transform("cube"), UsageError);
}

TEST(SimulateSetIto, ZeroCoefficientsStayAtStart) {
  const auto b = generate_brownian(TimeGrid(1.0, 16), 5, 1, 1);
  const auto x = simulate_set_ito(process(0.3, 0, 0, 0, 0), b, 4);
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t k = 0; k <= 16; ++k) {
      EXPECT_EQ(x(p, k).lo, 0.3);
      EXPECT_EQ(x(p, k).hi, 0.3);
    }
}

TEST(SimulateSetIto, DriftOnlyHullIsExact) {
  const auto b = generate_brownian(TimeGrid(1.0, 50), 5, 1, 1);
  const auto x = simulate_set_ito(process(0, 0, 0, 0, 1), b, 6);
  for (std::size_t p = 0; p < 5; ++p) {
    EXPECT_NEAR(x(p, 50).lo, 0.0, 1e-12);
    EXPECT_NEAR(x(p, 50).hi, 1.0, 1e-12);
  }
}

TEST(SimulateSetIto, UnitDiffusionTracksBrownianMotion) {
  const auto b = generate_brownian(TimeGrid(1.0, 32), 6, 1, 4);
  const auto x = simulate_set_ito(process(0, 1, 1, 0, 0), b, 4);
  for (std::size_t p = 0; p < 6; ++p)
    for (std::size_t k = 0; k <= 32; ++k) {
      EXPECT_NEAR(x(p, k).lo, b.W(p, k), 1e-12);
      EXPECT_EQ(x(p, k).lo, x(p, k).hi);
    }
}

TEST(SimulateSetIto, RejectsBoxes) {
  const auto b = generate_brownian(TimeGrid(1.0, 4), 2, 1, 1);
  SetItoProcess proc{0, SetValuedProcess::constant(ConvexSet::box({0, 0}, {1, 1})), constant(0, 0)};
  EXPECT_THROW(simulate_set_ito(proc, b, 4), UnsupportedOperation);
}

TEST(ItoFormula, IdentityIsExactAtTheDiscreteLevel) {
  const auto b = generate_brownian(TimeGrid(1.0, 64), 50, 1, 2);
  const auto v = verify_ito_formula(TransformSpec::identity(), process(0.2, 0.5, 1, -1, 1), b);
  EXPECT_LE(v.statistic, 1e-12);
  for (const auto& s : v.nodes) EXPECT_LE(s.max_hausdorff, 1e-12);
  EXPECT_TRUE(v.report.passed);
}

TEST(ItoFormula, IdentityRhsReproducesSimulation) {
  const auto b = generate_brownian(TimeGrid(1.0, 32), 10, 1, 2);
  const auto proc = process(0.0, 0.5, 1, 0, 1);
  const auto x = simulate_set_ito(proc, b, 6);
  const auto r = ito_rhs(TransformSpec::identity(), proc, b, 6);
  for (std::size_t p = 0; p < 10; ++p)
    for (std::size_t k = 0; k <= 32; ++k) EXPECT_LE(interval_distance(x(p, k), r(p, k)), 1e-12);
}

TEST(ItoFormula, TranslationLhsIsShiftedSet) {
  const auto b = generate_brownian(TimeGrid(1.0, 16), 4, 1, 2);
  const auto x = simulate_set_ito(process(0, 0.5, 1, 0, 0), b, 4);
  const auto lhs = ito_lhs(TransformSpec::translate(2.0), x, b.grid());
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t k = 0; k <= 16; ++k) {
      EXPECT_DOUBLE_EQ(lhs(p, k).lo, x(p, k).lo + 2.0);
      EXPECT_DOUBLE_EQ(lhs(p, k).hi, x(p, k).hi + 2.0);
    }
}

TEST(ItoFormula, SquareSingletonMatchesClassicalOracle) {
  // Independent classical pipeline: x = x0 + sigma W, rhs = x0^2 + 2 sigma sum x dW + sigma^2 t.
  const double sigma = 0.8, x0 = 0.3;
  const TimeGrid g(1.0, 128);
  const auto b = generate_brownian(g, 200, 1, 17);
  const auto r = ito_rhs(TransformSpec::square(), process(x0, sigma, sigma, 0, 0), b, 4);
  const auto v = verify_ito_formula(TransformSpec::square(), process(x0, sigma, sigma, 0, 0), b);
  for (std::size_t p = 0; p < 200; ++p) {
    double rhs = x0 * x0;
    for (std::size_t k = 0; k < 128; ++k) rhs += 2 * sigma * (x0 + sigma * b.W(p, k)) * b.dW(p, k) + sigma * sigma * g.dt();
    const double lhs = std::pow(x0 + sigma * b.W(p, 128), 2);
    EXPECT_NEAR(r(p, 128).lo, rhs, 1e-12);
    EXPECT_EQ(r(p, 128).lo, r(p, 128).hi);
    EXPECT_NEAR(v.terminal[p], std::abs(lhs - rhs), 1e-12);
  }
  EXPECT_TRUE(v.report.passed);
}

TEST(ItoFormula, TimeTimesXWithDriftInterval) {
  // g = [0, 1], f = 0: rhs per constant selection c is 2c sum t_k dt = c (t^2 - t dt).
  const TimeGrid g(1.0, 64);
  const auto b = generate_brownian(g, 5, 1, 3);
  const auto r = ito_rhs(TransformSpec::time_times_x(), process(0, 0, 0, 0, 1), b, 6);
  for (std::size_t k = 0; k <= 64; ++k) {
    const double t = g.t(k);
    EXPECT_NEAR(r(0, k).lo, 0.0, 1e-12);
    EXPECT_NEAR(r(0, k).hi, t * t - t * g.dt(), 1e-12);
  }
  const auto v = verify_ito_formula(TransformSpec::time_times_x(), process(0, 0, 0, 0, 1), b);
  EXPECT_TRUE(v.report.passed);
  EXPECT_NEAR(v.statistic, g.dt(), 1e-12);
}

TEST(ItoFormula, IntervalDiffusionWithinThreshold) {
  const auto b = generate_brownian(TimeGrid(1.0, 256), 200, 1, 5);
  const auto v = verify_ito_formula(TransformSpec::square(), process(0, 0.5, 1, 0, 0), b);
  EXPECT_TRUE(v.report.passed) << v.statistic << " vs " << v.threshold;
  EXPECT_EQ(v.report.metric("pairs"), 8.0);
}

TEST(ItoFormula, ErrorShrinksWithRefinement) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    double prev = INFINITY;
    for (std::size_t N : {64u, 256u, 1024u}) {
      const auto b = generate_brownian(TimeGrid(1.0, N), 100, 1, seed);
      const double s = verify_ito_formula(TransformSpec::square(), process(0, 0.5, 1, 0, 0), b).statistic;
      EXPECT_LT(s, prev) << "seed " << seed << " N " << N;
      prev = s;
    }
  }
}

TEST(ItoFormula, CsvLayout) {
  const auto b = generate_brownian(TimeGrid(1.0, 4), 3, 1, 1);
  const auto v = verify_ito_formula(TransformSpec::identity(), process(0, 1, 1, 0, 0), b);
  std::ostringstream out;
  write_ito_csv(out, v);
  const auto text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "node,max_hausdorff,threshold,pass,rms_hausdorff");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
}

TEST(SquareInclusion, ZeroNoiseIsEquality) {
  const auto b = generate_brownian(TimeGrid(1.0, 32), 100, 1, 1);
  const SquareProblem prob{"zero", constant(0, 1), constant(0, 0)};
  const auto r = verify_square_inclusion(prob, b);
  EXPECT_TRUE(r.report.passed);
  EXPECT_EQ(r.band, 0.0);
  for (std::size_t p = 0; p < 100; ++p)
    for (std::size_t k = 0; k <= 32; ++k) {
      EXPECT_NEAR(r.lhs(p, k).lo, 0.0, 1e-15);
      EXPECT_NEAR(r.lhs(p, k).hi, 1.0, 1e-15);
      EXPECT_EQ(interval_distance(r.lhs(p, k), r.rhs(p, k)), 0.0);
    }
}

TEST(SquareInclusion, SingletonMatchesClassicalBackwardIdentity) {
  // X_t = a - z (W_T - W_t); oracle for the gap LHS - RHS = z^2 (T - t) - sum z^2 dW^2.
  const double a = 0.4, z = 0.7;
  const TimeGrid g(1.0, 64);
  const auto b = generate_brownian(g, 500, 1, 2);
  const SquareProblem prob{"singleton", constant(a, a), constant(z, z)};
  const auto r = verify_square_inclusion(prob, b);
  for (std::size_t p = 0; p < 500; p += 50)
    for (std::size_t k = 0; k <= 64; k += 8) {
      EXPECT_NEAR(r.x(p, k).lo, a - z * (b.W(p, 64) - b.W(p, k)), 1e-12);
      double sq = 0.0;
      for (std::size_t m = k; m < 64; ++m) sq += b.dW(p, m) * b.dW(p, m);
      EXPECT_NEAR(r.lhs(p, k).lo - r.rhs(p, k).lo, z * z * (g.horizon() - g.t(k)) - z * z * sq, 1e-12);
    }
  EXPECT_TRUE(r.report.passed);
  EXPECT_NEAR(r.band, z * z * std::sqrt(2 * g.dt()), 0.02);
}

TEST(SquareInclusion, IntervalTerminalUnitNoise) {
  const auto b = generate_brownian(TimeGrid(1.0, 64), 2000, 1, 3);
  const SquareProblem prob{"unit-noise", constant(0, 1), constant(1, 1)};
  const auto r = verify_square_inclusion(prob, b);
  EXPECT_TRUE(r.report.passed) << r.pass_fraction;
  EXPECT_GE(r.pass_fraction, 0.999);
}

TEST(SquareInclusion, VerdictIsMonotoneInEps) {
  const auto b = generate_brownian(TimeGrid(1.0, 32), 300, 1, 4);
  const SquareProblem prob{"unit-noise", constant(0, 1), constant(1, 1)};
  const auto r = verify_square_inclusion(prob, b);
  double prev = 0.0;
  for (double e : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0}) {
    const double f = r.fraction_within(e);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(SquareInclusion, MissingDifferenceIsStructural) {
  const auto b = generate_brownian(TimeGrid(1.0, 16), 10, 1, 4);
  const SquareProblem prob{"wide-noise", constant(0, 0), constant(0, 1)};
  EXPECT_THROW(verify_square_inclusion(prob, b), StructuralError);
}

TEST(SquareInclusion, LinearDriverStaysWithinBand) {
  const auto b = generate_brownian(TimeGrid(1.0, 64), 1000, 1, 6);
  SquareProblem prob{"linear-driver", constant(0, 1), constant(0.5, 0.5)};
  prob.driver = [](double, double x, double z) { return 0.2 * x + 0.1 * z; };
  const auto r = verify_square_inclusion(prob, b);
  EXPECT_TRUE(r.report.passed) << r.pass_fraction;
}

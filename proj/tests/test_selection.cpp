#include <gtest/gtest.h>

#include <sstream>

#include "svito/integrals.hpp"
#include "svito/selection.hpp"

using namespace svito;

namespace {

const TimeGrid kGrid(1.0, 32);

SetValuedProcess growing_interval() {
  return SetValuedProcess::deterministic([](double t) { return ConvexSet::interval(0.0, t); }, ConvexSet::interval(0, 0));
}

}  // namespace

TEST(Selections, ConstantIntervalEndpoints) {
  const auto b = generate_brownian(kGrid, 5, 1, 1);
  const auto fam = build_selections(SetValuedProcess::constant(ConvexSet::interval(0, 1)), b, 2, Recipe::Extreme, 3);
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t k = 0; k < kGrid.nodes(); ++k) {
      EXPECT_EQ(fam.value(0, p, k), 0.0);
      EXPECT_EQ(fam.value(1, p, k), 1.0);
    }
}

TEST(Selections, SingletonForcesEverySelection) {
  const auto b = generate_brownian(kGrid, 4, 1, 1);
  for (Recipe r : {Recipe::Extreme, Recipe::Support, Recipe::Mix}) {
    const auto fam = build_selections(SetValuedProcess::constant(ConvexSet::point(2.5)), b, 9, r, 4);
    for (std::size_t j = 0; j < 9; ++j)
      for (std::size_t k = 0; k < kGrid.nodes(); ++k) EXPECT_EQ(fam.value(j, 3, k), 2.5);
  }
}

TEST(Selections, MembershipAuditOnGrowingInterval) {
  const auto b = generate_brownian(kGrid, 20, 1, 2);
  const auto f = growing_interval();
  const auto fam = build_selections(f, b, 5, Recipe::Mix, 6);
  std::ostringstream csv;
  EXPECT_EQ(audit_membership(f, fam, b, 0.0, &csv), 0u);
  const auto text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "selection,step,path,value,member?");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5 * 33 * 20);
  EXPECT_EQ(text.find("false"), std::string::npos);
}

TEST(Selections, MembershipForStateDependentBoxes) {
  const TimeGrid g(1.0, 16);
  const auto b = generate_brownian(g, 30, 2, 8);
  const auto f = SetValuedProcess::state_dependent(
      [](double t, std::span<const double> w) {
        return ConvexSet::box({w[0] - 1, -t}, {w[0] + 1 + t, std::abs(w[1])});
      },
      ConvexSet::box({0, 0}, {0, 0}));
  for (Recipe r : {Recipe::Extreme, Recipe::Support, Recipe::Mix}) {
    const std::size_t K = minimal_selection_count(f.prototype(), r) + 6;
    const auto fam = build_selections(f, b, K, r, 12);
    EXPECT_EQ(audit_membership(f, fam, b, 1e-12), 0u) << to_string(r);
  }
}

TEST(Selections, MembershipForSupportSampledPolygons) {
  const TimeGrid g(1.0, 8);
  const auto b = generate_brownian(g, 10, 1, 8);
  const auto grid = DirectionGrid::uniform_circle(8);
  const auto f = SetValuedProcess::state_dependent(
      [grid](double t, std::span<const double> w) {
        const std::vector<double> tri{w[0], 0, w[0] + 1 + t, 0, w[0], 1};
        return ConvexSet::support_of_points(grid, tri);
      },
      ConvexSet::support_of_points(grid, std::vector<double>{0, 0}));
  const auto fam = build_selections(f, b, 14, Recipe::Mix, 1);
  EXPECT_EQ(audit_membership(f, fam, b, 1e-9), 0u);
}

TEST(Selections, BelowRecipeMinimumIsRejected) {
  const auto b = generate_brownian(kGrid, 2, 1, 1);
  EXPECT_THROW(build_selections(SetValuedProcess::constant(ConvexSet::interval(0, 1)), b, 1, Recipe::Extreme, 1), UsageError);
  const auto box = SetValuedProcess::constant(ConvexSet::box({0, 0, 0}, {1, 1, 1}));
  EXPECT_THROW(build_selections(box, b, 7, Recipe::Extreme, 1), UsageError);
  EXPECT_NO_THROW(build_selections(box, b, 8, Recipe::Extreme, 1));
  EXPECT_THROW(build_selections(box, b, 5, Recipe::Support, 1), UsageError);
}

TEST(Selections, AdaptedUnderIncrementSurgery) {
  const TimeGrid g(1.0, 16);
  auto b = generate_brownian(g, 3, 1, 21);
  const auto f = SetValuedProcess::state_dependent(
      [](double, std::span<const double> w) { return ConvexSet::interval(w[0] - 1, w[0] + 1); }, ConvexSet::point(0));
  const auto before = build_selections(f, b, 12, Recipe::Mix, 5);
  auto modified = b;
  modified.set_increment(1, 9, 0, -4.0);
  const auto after = build_selections(f, modified, 12, Recipe::Mix, 5);
  for (std::size_t j = 0; j < 12; ++j)
    for (std::size_t k = 0; k <= 9; ++k) EXPECT_EQ(after.value(j, 1, k), before.value(j, 1, k));
}

TEST(SelectionIntegrals, EndpointsOfUnitInterval) {
  const auto b = generate_brownian(kGrid, 6, 1, 1);
  const auto fam = build_selections(SetValuedProcess::constant(ConvexSet::interval(0, 1)), b, 2, Recipe::Extreme, 1);
  const auto dt = selection_integrals(fam, b, IntegralKind::Dt);
  const auto dw = selection_integrals(fam, b, IntegralKind::DW);
  for (std::size_t p = 0; p < 6; ++p) {
    EXPECT_EQ(dt[p], 0.0);
    EXPECT_NEAR(dt[6 + p], 1.0, 1e-14);
    EXPECT_EQ(dw[p], 0.0);
    EXPECT_EQ(dw[6 + p], b.W(p, 32));
  }
}

TEST(SelectionIntegrals, MixturesStayInsideRiemannBounds) {
  const auto b = generate_brownian(kGrid, 50, 1, 3);
  const double a = -0.5, c = 2.0;
  const auto fam = build_selections(SetValuedProcess::constant(ConvexSet::interval(a, c)), b, 20, Recipe::Mix, 9);
  for (double v : selection_integrals(fam, b, IntegralKind::Dt)) {
    EXPECT_GE(v, a - 1e-12);
    EXPECT_LE(v, c + 1e-12);
  }
}

TEST(SelectionIntegrals, EndpointDominanceForDeterministicIntegrand) {
  // For F(t) = [t - 1, 2t], min/max over the family equal the endpoint integrals exactly.
  const auto b = generate_brownian(kGrid, 20, 1, 4);
  const auto f = SetValuedProcess::deterministic([](double t) { return ConvexSet::interval(t - 1, 2 * t); }, ConvexSet::point(0));
  const auto fam = build_selections(f, b, 24, Recipe::Extreme, 2);
  const auto ints = selection_integrals(fam, b, IntegralKind::Dt);
  double lo_oracle = 0, hi_oracle = 0;
  for (std::size_t k = 0; k < 32; ++k) lo_oracle += kGrid.t(k) - 1, hi_oracle += 2 * kGrid.t(k);
  lo_oracle *= kGrid.dt(), hi_oracle *= kGrid.dt();
  for (std::size_t p = 0; p < 20; ++p) {
    const auto hull = path_hull(f.prototype(), ints, 24, 20, p).as_interval();
    EXPECT_NEAR(hull.lo, lo_oracle, 1e-12);
    EXPECT_NEAR(hull.hi, hi_oracle, 1e-12);
  }
}

TEST(SelectionIntegrals, HullsGrowWithK) {
  const auto b = generate_brownian(kGrid, 40, 1, 5);
  const auto f = SetValuedProcess::constant(ConvexSet::interval(-1, 1));
  std::vector<ConvexSet> prev;
  for (std::size_t K : {2u, 4u, 8u, 16u, 32u}) {
    const auto r = set_integral(f, b, 0, 1, IntegralKind::DW, K, Recipe::Mix, 77);
    if (!prev.empty()) {
      for (std::size_t p = 0; p < 40; ++p) EXPECT_TRUE(includes(r.per_path[p], prev[p], 0.0));
    }
    prev = r.per_path;
  }
}

TEST(SelectionIntegrals, DefaultCounts) {
  EXPECT_EQ(default_selection_count(SetValuedProcess::constant(ConvexSet::interval(0, 1))), 2u);
  EXPECT_EQ(default_selection_count(growing_interval()), 2u);
  const auto state = SetValuedProcess::state_dependent([](double, std::span<const double> w) { return ConvexSet::interval(w[0], w[0]); },
                                                       ConvexSet::point(0));
  EXPECT_EQ(default_selection_count(state), 32u);
}

TEST(Recipes, ParseNames) {
  EXPECT_EQ(parse_recipe("extreme"), Recipe::Extreme);
  EXPECT_EQ(parse_recipe("support"), Recipe::Support);
  EXPECT_EQ(parse_recipe("mix"), Recipe::Mix);
  EXPECT_THROW(parse_recipe("random"), UsageError);
}

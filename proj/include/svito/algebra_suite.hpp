#pragma once

// Randomized property suite for the Hukuhara/Minkowski algebra and the
// brute-force erosion oracle. Shared by the CLI and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "svito/convex_set.hpp"
#include "svito/random.hpp"

namespace svito {

struct PropertyTally {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed error statistic

  void record(bool ok, double err) {
    ++trials;
    if (!ok) ++failures;
    if (std::isfinite(err)) worst = std::max(worst, err);
    else worst = INFINITY;
  }
};

struct AlgebraReport {
  std::vector<PropertyTally> properties;

  bool passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyTally& p) { return p.failures == 0 && p.trials > 0; });
  }
  PropertyTally& tally(const std::string& name) {
    for (auto& p : properties)
      if (p.name == name) return p;
    properties.push_back({name});
    return properties.back();
  }
};

namespace detail {

/// Deterministic source of random sets.
class SetSampler {
 public:
  SetSampler(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * counter_uniform(seed_, stream_, counter_++); }

  ConvexSet interval(double spread = 10.0) {
    const double a = uniform(-spread, spread), w = uniform(0.0, spread);
    return ConvexSet::interval(a, a + w);
  }
  ConvexSet box(std::size_t n, double spread = 10.0) {
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = uniform(-spread, spread);
      hi[i] = lo[i] + uniform(0.0, spread);
    }
    return ConvexSet::box(std::move(lo), std::move(hi));
  }
  ConvexSet like(const ConvexSet& proto) { return proto.kind() == SetKind::Interval ? interval() : box(proto.dim()); }
  ConvexSet point_like(const ConvexSet& proto) {
    if (proto.kind() == SetKind::Interval) return ConvexSet::point(uniform(-10, 10));
    std::vector<double> c(proto.dim());
    for (auto& v : c) v = uniform(-10, 10);
    return ConvexSet::box_point(std::move(c));
  }
  std::size_t dimension(std::size_t max_dim) {
    return 1 + static_cast<std::size_t>(uniform(0.0, static_cast<double>(max_dim)) * 0.999999);
  }

 private:
  std::uint64_t seed_, stream_, counter_ = 0;
};

}  // namespace detail

/// One randomized trial of every identity on sets shaped like `proto`.
inline void algebra_trial(AlgebraReport& report, detail::SetSampler& s, const ConvexSet& proto, double tol) {
  auto diff = [](const ConvexSet& a, const ConvexSet& b) { return hukuhara_diff(a, b).difference; };
  auto check_eq = [&](const std::string& name, const std::optional<ConvexSet>& lhs, const std::optional<ConvexSet>& rhs) {
    if (!lhs || !rhs) {
      report.tally(name).record(false, INFINITY);
      return;
    }
    const double err = hausdorff_distance(*lhs, *rhs);
    report.tally(name).record(err <= tol, err);
  };
  const ConvexSet zero = ConvexSet::zero_like(proto);

  // (i) A ⊖ A = {0}, A ⊖ {0} = A
  {
    const auto a = s.like(proto);
    check_eq("L2.1(i) A-A={0}", diff(a, a), zero);
    check_eq("L2.1(i) A-{0}=A", diff(a, zero), a);
  }
  // (ii) (A1+B1) ⊖ (A2+B2) = (A1 ⊖ A2) + (B1 ⊖ B2)
  {
    const auto a2 = s.like(proto), b2 = s.like(proto);
    const auto a1 = minkowski_sum(a2, s.like(proto)), b1 = minkowski_sum(b2, s.like(proto));
    const auto d1 = diff(a1, a2), d2 = diff(b1, b2);
    check_eq("L2.1(ii)", diff(minkowski_sum(a1, b1), minkowski_sum(a2, b2)),
             d1 && d2 ? std::optional(minkowski_sum(*d1, *d2)) : std::nullopt);
  }
  // (iii), (iv): B1 = B2 + D and A1 = B2 + E so every difference exists
  {
    const auto b2 = s.like(proto);
    const auto b1 = minkowski_sum(b2, s.like(proto)), a1 = minkowski_sum(b2, s.like(proto));
    const auto lhs = diff(minkowski_sum(a1, b1), b2);
    const auto b_diff = diff(b1, b2), a_diff = diff(a1, b2);
    const auto mid = b_diff ? std::optional(minkowski_sum(a1, *b_diff)) : std::nullopt;
    const auto right = a_diff ? std::optional(minkowski_sum(*a_diff, b1)) : std::nullopt;
    check_eq("L2.1(iii) (A1+B1)-B2=A1+(B1-B2)", lhs, mid);
    check_eq("L2.1(iii) (A1+B1)-B2=(A1-B2)+B1", lhs, right);
    check_eq("L2.1(iv)", mid, right);
  }
  // (v) A = B + (A ⊖ B)
  {
    const auto b = s.like(proto);
    const auto a = minkowski_sum(b, s.like(proto));
    const auto d = diff(a, b);
    check_eq("L2.1(v)", a, d ? std::optional(minkowski_sum(b, *d)) : std::nullopt);
  }
  // Lemma 2.2 (i): A ⊖ C exists => (A+B) ⊖ C exists (and equals M + B)
  {
    const auto c = s.like(proto), m = s.like(proto), b = s.like(proto);
    const auto a = minkowski_sum(c, m);
    check_eq("L2.2(i)", diff(minkowski_sum(a, b), c), minkowski_sum(m, b));
  }
  // Lemma 2.2 (ii): A ⊖ B = (A ⊖ C) + (C ⊖ B)
  {
    const auto b = s.like(proto);
    const auto c = minkowski_sum(b, s.like(proto));
    const auto a = minkowski_sum(c, s.like(proto));
    const auto ac = diff(a, c), cb = diff(c, b);
    check_eq("L2.2(ii)", diff(a, b), ac && cb ? std::optional(minkowski_sum(*ac, *cb)) : std::nullopt);
  }
  // Cancellation: h(A+C, B+C) = h(A, B); equal sums force equal summands.
  {
    const auto a = s.like(proto), c = s.like(proto);
    const bool same = s.uniform(0, 1) < 0.5;
    const auto b = same ? hukuhara_diff(minkowski_sum(a, c), c).value() : s.like(proto);
    const double sums = hausdorff_distance(minkowski_sum(a, c), minkowski_sum(b, c));
    const double parts = hausdorff_distance(a, b);
    const double err = std::abs(sums - parts);
    report.tally("cancellation").record(err <= tol && (sums > tol || parts <= tol), err);
  }
  // Lemma 2.4 (ii): h(A, B) = ||A ⊖ B||
  {
    const auto b = s.like(proto);
    const auto a = minkowski_sum(b, s.like(proto));
    const auto d = diff(a, b);
    const double err = d ? std::abs(hausdorff_distance(a, b) - set_norm(*d)) : INFINITY;
    report.tally("L2.4(ii)").record(err <= tol, err);
  }
  // Lemma 2.4 (iii): both differences exist iff A is a translate of B.
  {
    const auto b = s.like(proto), shift = s.point_like(proto);
    const auto a = minkowski_sum(b, shift);
    const auto c = is_translation(a, b);
    double err = INFINITY;
    if (c) {
      const auto expect = shift.vertices();
      err = 0.0;
      for (std::size_t i = 0; i < c->size(); ++i) err = std::max(err, std::abs((*c)[i] - expect[i]));
    }
    report.tally("L2.4(iii) translate").record(err <= tol, err);

    const auto fat = minkowski_sum(b, s.like(proto));  // strictly wider with probability 1
    const bool both = hukuhara_diff(fat, b).exists() && hukuhara_diff(b, fat).exists();
    const bool translate = is_translation(fat, b).has_value();
    report.tally("L2.4(iii) non-translate").record(both == translate && !translate, both ? 1.0 : 0.0);
  }
  // Norm axioms on the same carrier.
  {
    const auto a = s.like(proto), b = s.like(proto);
    const double alpha = s.uniform(-5, 5);
    const double scale_err = std::abs(set_norm(scalar_mul(alpha, a)) - std::abs(alpha) * set_norm(a));
    const double tri = set_norm(minkowski_sum(a, b)) - set_norm(a) - set_norm(b);
    const bool zero_ok = set_norm(zero) == 0.0 && set_norm(a) > 0.0;
    const double err = std::max(scale_err, std::max(tri, 0.0));
    report.tally("norm axioms").record(err <= tol * (1.0 + std::abs(alpha) * set_norm(a)) && zero_ok, err);
  }
}

/// Interval and box trials (box dimension 1..max_box_dim).
inline AlgebraReport run_algebra_suite(std::size_t interval_trials, std::size_t box_trials, std::uint64_t seed,
                                       double tol = 1e-12, std::size_t max_box_dim = 4) {
  AlgebraReport report;
  const auto proto_interval = ConvexSet::point(0.0);
  for (std::size_t t = 0; t < interval_trials; ++t) {
    detail::SetSampler s(seed, t);
    algebra_trial(report, s, proto_interval, tol);
  }
  for (std::size_t t = 0; t < box_trials; ++t) {
    detail::SetSampler s(seed, (std::uint64_t{1} << 40) + t);
    const std::size_t n = s.dimension(max_box_dim);
    algebra_trial(report, s, ConvexSet::box_point(std::vector<double>(n, 0.0)), tol);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Erosion oracle: enumerate lattice translates x and test x + B ⊆ A pointwise.
// ---------------------------------------------------------------------------

struct ErosionAgreement {
  std::size_t interval_pairs = 0, interval_agree = 0;
  std::size_t box_pairs = 0, box_agree = 0;
  std::size_t witness_checks = 0, witness_ok = 0;

  bool passed() const {
    return interval_agree == interval_pairs && box_agree == box_pairs && witness_ok == witness_checks;
  }
};

namespace detail {

/// Endpoints on the lattice (1/4) Z inside [-3, 3]; equal widths are forced a
/// quarter of the time so the boundary case is exercised.
inline std::pair<double, double> lattice_interval(SetSampler& s, std::optional<double> width = std::nullopt) {
  auto snap = [](double x) { return std::round(x * 4.0) / 4.0; };
  const double w = width ? *width : snap(s.uniform(0.0, 3.0));
  const double lo = snap(s.uniform(-3.0, 3.0 - w));
  return {lo, lo + w};
}

/// Points of B sampled on its own lattice (spacing 1/8, endpoints included).
inline std::vector<double> dense_points(double lo, double hi) {
  std::vector<double> out;
  for (double x = lo; x < hi; x += 0.125) out.push_back(x);
  out.push_back(hi);
  return out;
}

/// Oracle existence for intervals: the set of lattice x with x + B ⊆ A is
/// nonempty and B + [min x, max x] reconstitutes A.
inline bool oracle_interval_exists(std::pair<double, double> a, std::pair<double, double> b,
                                   std::vector<double>* translates = nullptr) {
  const auto pts = dense_points(b.first, b.second);
  double xmin = INFINITY, xmax = -INFINITY;
  for (int q = -96; q <= 96; ++q) {
    const double x = q / 16.0;
    bool inside = true;
    for (double p : pts)
      if (x + p < a.first || x + p > a.second) {
        inside = false;
        break;
      }
    if (inside) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      if (translates) translates->push_back(x);
    }
  }
  if (xmin > xmax) return false;
  return xmin + b.first == a.first && xmax + b.second == a.second;
}

}  // namespace detail

inline ErosionAgreement run_erosion_agreement(std::size_t pairs, std::uint64_t seed) {
  ErosionAgreement out;
  for (std::size_t t = 0; t < pairs; ++t) {
    detail::SetSampler s(seed ^ 0xe105ULL, t);
    const bool equal_width = s.uniform(0, 1) < 0.25;
    if (t % 2 == 0) {
      const auto a = detail::lattice_interval(s);
      const auto b = detail::lattice_interval(s, equal_width ? std::optional(a.second - a.first) : std::nullopt);
      std::vector<double> translates;
      const bool oracle = detail::oracle_interval_exists(a, b, &translates);
      const auto r = hukuhara_diff(ConvexSet::interval(a.first, a.second), ConvexSet::interval(b.first, b.second));
      ++out.interval_pairs;
      if (r.exists() == oracle) ++out.interval_agree;
      if (!r.exists()) {
        // Witness: no lattice translate x carries the witness point into x + B with x + B ⊆ A.
        ++out.witness_checks;
        const bool have = r.witness.has_value() && r.witness->extreme_point.size() == 1;
        bool reached = false;
        if (have)
          for (double x : translates) reached |= (r.witness->extreme_point[0] >= x + b.first && r.witness->extreme_point[0] <= x + b.second);
        if (have && !reached && r.witness->deficit > 0) ++out.witness_ok;
      }
    } else {
      std::pair<double, double> a[2], b[2];
      for (int i = 0; i < 2; ++i) {
        a[i] = detail::lattice_interval(s);
        b[i] = detail::lattice_interval(s, equal_width ? std::optional(a[i].second - a[i].first) : std::nullopt);
      }
      // Brute force over the 2-D lattice of translates against the product
      // lattice of B; membership of a product point splits by axis.
      const auto p0 = detail::dense_points(b[0].first, b[0].second), p1 = detail::dense_points(b[1].first, b[1].second);
      auto axis_ok = [&](int i, const std::vector<double>& pts, double x) {
        for (double u : pts)
          if (x + u < a[i].first || x + u > a[i].second) return false;
        return true;
      };
      bool ok0[97], ok1[97];
      for (int q = -48; q <= 48; ++q) {
        ok0[q + 48] = axis_ok(0, p0, q / 8.0);
        ok1[q + 48] = axis_ok(1, p1, q / 8.0);
      }
      double xmin[2] = {INFINITY, INFINITY}, xmax[2] = {-INFINITY, -INFINITY};
      for (int q0 = -48; q0 <= 48; ++q0)
        for (int q1 = -48; q1 <= 48; ++q1) {
          if (!ok0[q0 + 48] || !ok1[q1 + 48]) continue;
          const double x0 = q0 / 8.0, x1 = q1 / 8.0;
          xmin[0] = std::min(xmin[0], x0), xmax[0] = std::max(xmax[0], x0);
          xmin[1] = std::min(xmin[1], x1), xmax[1] = std::max(xmax[1], x1);
        }
      bool oracle = xmin[0] <= xmax[0];
      for (int i = 0; i < 2 && oracle; ++i)
        oracle = xmin[i] + b[i].first == a[i].first && xmax[i] + b[i].second == a[i].second;
      const auto r = hukuhara_diff(ConvexSet::box({a[0].first, a[1].first}, {a[0].second, a[1].second}),
                                   ConvexSet::box({b[0].first, b[1].first}, {b[0].second, b[1].second}));
      ++out.box_pairs;
      if (r.exists() == oracle) ++out.box_agree;
    }
  }
  return out;
}

}  // namespace svito

#pragma once

// Set-valued integrals int F dt and int G dW as per-path convex hulls of
// selection integrals, plus the additivity, splitting, isometry and
// integral-equality checks built on them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "svito/convex_set.hpp"
#include "svito/report.hpp"
#include "svito/selection.hpp"
#include "svito/stochastic.hpp"

namespace svito {

inline constexpr double kHullTol = 1e-8;

struct SetIntegralResult {
  std::vector<ConvexSet> per_path;
  std::size_t selections = 0;
  Recipe recipe = Recipe::Extreme;
  std::uint64_t seed = 0;
  IntegralKind kind = IntegralKind::Dt;
  std::size_t first_node = 0, last_node = 0;
};

/// Node indices of a window [s, t]; both ends must be grid nodes.
inline std::pair<std::size_t, std::size_t> window_nodes(const TimeGrid& grid, double s, double t) {
  const std::size_t k0 = grid.node_of(s), k1 = grid.node_of(t);
  if (k0 > k1) throw StructuralError("integration window [s, t] has s > t");
  return {k0, k1};
}

/// Hull of the selection integrals of one path; `ints` is laid out [sel][path][coord].
inline ConvexSet path_hull(const ConvexSet& prototype, const std::vector<double>& ints, std::size_t count, std::size_t paths,
                           std::size_t p) {
  const std::size_t n = prototype.dim();
  if (prototype.kind() == SetKind::Interval) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t j = 0; j < count; ++j) {
      const double v = ints[j * paths + p];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return ConvexSet::interval(lo, hi);
  }
  std::vector<double> pts(count * n);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = 0; i < n; ++i) pts[j * n + i] = ints[(j * paths + p) * n + i];
  return hull_of_points(prototype, pts);
}

/// The window indicator 1_(s,t] multiplies each increment (t_k, t_{k+1}], so
/// the sums run over steps k in [node(s), node(t)).
inline SetIntegralResult set_integral(const SetValuedProcess& f, const BrownianBundle& bundle, double s, double t,
                                      IntegralKind kind, std::size_t selections, Recipe recipe, std::uint64_t seed) {
  const auto [k0, k1] = window_nodes(bundle.grid(), s, t);
  const auto family = build_selections(f, bundle, selections, recipe, seed);
  const auto ints = selection_integrals(family, bundle, kind, k0, k1);
  SetIntegralResult out{{}, selections, recipe, seed, kind, k0, k1};
  out.per_path.reserve(bundle.paths());
  for (std::size_t p = 0; p < bundle.paths(); ++p) out.per_path.push_back(path_hull(f.prototype(), ints, selections, bundle.paths(), p));
  return out;
}

/// Hull of {a_i + b_j} over all index pairs of two selection-integral lists
/// for one path: the integrals of the family pasted from both.
inline ConvexSet pairwise_sum_hull(const ConvexSet& prototype, const std::vector<double>& a, std::size_t ka,
                                   const std::vector<double>& b, std::size_t kb, std::size_t paths, std::size_t p) {
  const std::size_t n = prototype.dim();
  std::vector<double> pts;
  pts.reserve(ka * kb * n);
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j)
      for (std::size_t c = 0; c < n; ++c) pts.push_back(a[(i * paths + p) * n + c] + b[(j * paths + p) * n + c]);
  return hull_of_points(prototype, pts);
}

// ---------------------------------------------------------------------------
// Splitting: int_0^T = int_0^t + int_t^T, and int_t^T = int_0^T ⊖ int_0^t.
// ---------------------------------------------------------------------------

/// For each split node, the full-window family is the one pasted at t from
/// the left and right pieces (selections stay adapted under pasting at a fixed
/// time), so both identities are exact up to rounding. The unpasted family's
/// hull is only included in left + right; that inclusion is checked too.
inline CheckReport splitting_check(const SetValuedProcess& f, const BrownianBundle& bundle, IntegralKind kind,
                                   std::size_t selections, Recipe recipe, std::uint64_t seed,
                                   const std::vector<std::size_t>& split_nodes, double tol = kHullTol) {
  CheckReport report;
  report.name = std::string("splitting-") + to_string(kind);
  const auto family = build_selections(f, bundle, selections, recipe, seed);
  const std::size_t N = bundle.steps(), paths = bundle.paths(), n = f.dim();
  const auto full = selection_integrals(family, bundle, kind, 0, N);
  double worst_sum = 0, worst_diff = 0, worst_plain = 0, worst_additive = 0;
  for (std::size_t m : split_nodes) {
    if (m > N) throw StructuralError("split node beyond the horizon");
    const auto left = selection_integrals(family, bundle, kind, 0, m);
    const auto right = selection_integrals(family, bundle, kind, m, N);
    ReportRow worst_row{"split-sum", m, 0, std::nullopt, std::nullopt, 0.0};
    for (std::size_t p = 0; p < paths; ++p) {
      for (std::size_t idx = 0; idx < selections * n; ++idx) {
        const std::size_t j = idx / n, c = idx % n;
        const std::size_t at = (j * paths + p) * n + c;
        worst_additive = std::max(worst_additive, std::abs(full[at] - left[at] - right[at]));
      }
      const auto hl = path_hull(f.prototype(), left, selections, paths, p);
      const auto hr = path_hull(f.prototype(), right, selections, paths, p);
      const auto sum = minkowski_sum(hl, hr);
      const auto pasted = pairwise_sum_hull(f.prototype(), left, selections, right, selections, paths, p);
      const double d_sum = hausdorff_distance(pasted, sum);
      const auto rest = hukuhara_diff(pasted, hl);
      const double d_diff = rest.exists() ? hausdorff_distance(rest.value(), hr) : INFINITY;
      const double plain = excess(path_hull(f.prototype(), full, selections, paths, p), sum);
      worst_plain = std::max(worst_plain, plain);
      worst_diff = std::max(worst_diff, d_diff);
      if (d_sum >= worst_sum) {
        worst_sum = d_sum;
        worst_row = {"split-sum", m, bundle.first_path() + p, pasted, sum, d_sum};
      }
    }
    report.rows.push_back(worst_row);
  }
  report.set("max_hausdorff_full_vs_sum", worst_sum);
  report.set("max_hausdorff_right_vs_full_minus_left", worst_diff);
  report.set("max_excess_unpasted_full", worst_plain);
  report.set("max_selection_additivity_error", worst_additive);
  report.set("tolerance", tol);
  report.passed = worst_sum <= tol && worst_diff <= tol && worst_plain <= tol && worst_additive <= tol;
  report.verdict = report.passed ? "pass" : "fail";
  return report;
}

// ---------------------------------------------------------------------------
// Additivity: int (F1 + F2) = int F1 + int F2, int (F1 ⊖ F2) = int F1 ⊖ int F2.
// ---------------------------------------------------------------------------

/// Integrals of the pairwise-sum family {phi_i + psi_j} of two families,
/// integrated as single integrands: out[(i*kb + j)][path][coord].
inline std::vector<double> sum_family_integrals(const SelectionFamily& a, const SelectionFamily& b, const BrownianBundle& bundle,
                                                IntegralKind kind) {
  const std::size_t paths = bundle.paths(), n = a.dim(), N = bundle.steps();
  const std::size_t count = a.count() * b.count();
  std::vector<double> out(count * paths * n);
  const double dt = bundle.grid().dt();
  parallel_for(paths, [&](std::size_t p) {
    for (std::size_t i = 0; i < a.count(); ++i)
      for (std::size_t j = 0; j < b.count(); ++j)
        for (std::size_t c = 0; c < n; ++c) {
          double acc = 0.0;
          if (kind == IntegralKind::Dt) {
            for (std::size_t k = 0; k < N; ++k) acc += a.value(i, p, k, c) + b.value(j, p, k, c);
            acc *= dt;
          } else {
            const std::size_t comp = driving_component(c, n, bundle.dims());
            for (std::size_t k = 0; k < N; ++k) acc += (a.value(i, p, k, c) + b.value(j, p, k, c)) * bundle.dW(p, k, comp);
          }
          out[((i * b.count() + j) * paths + p) * n + c] = acc;
        }
  });
  return out;
}

/// Nodewise Hukuhara difference process; DiagnosticFailure if it fails anywhere on the bundle.
inline SetValuedProcess difference_process(const SetValuedProcess& f1, const SetValuedProcess& f2, const BrownianBundle& bundle) {
  const auto& grid = bundle.grid();
  const std::size_t paths = f1.is_deterministic() && f2.is_deterministic() ? 1 : bundle.paths();
  for (std::size_t p = 0; p < paths; ++p)
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      const auto r = hukuhara_diff(f1.at(grid.t(k), bundle.W_at(p, k)), f2.at(grid.t(k), bundle.W_at(p, k)));
      if (!r.exists())
        throw DiagnosticFailure("F1 ⊖ F2 does not exist at node " + std::to_string(k) + ", path " +
                                std::to_string(bundle.first_path() + p) + ": " + r.witness->reason);
    }
  auto rule = [f1, f2](double t, std::span<const double> w) { return hukuhara_diff(f1.at(t, w), f2.at(t, w)).value(); };
  if (f1.is_deterministic() && f2.is_deterministic())
    return SetValuedProcess::deterministic([rule](double t) { return rule(t, {}); }, rule(0.0, {}));
  return SetValuedProcess::state_dependent(rule, rule(0.0, bundle.W_at(0, 0)));
}

inline CheckReport verify_additivity(const SetValuedProcess& f1, const SetValuedProcess& f2, const BrownianBundle& bundle,
                                     IntegralKind kind, std::size_t selections, Recipe recipe, std::uint64_t seed,
                                     bool difference_clause, double tol = kHullTol) {
  CheckReport report;
  report.name = std::string("additivity-") + to_string(kind);
  const std::size_t paths = bundle.paths();
  const auto fam1 = build_selections(f1, bundle, selections, recipe, seed);
  const auto fam2 = build_selections(f2, bundle, selections, recipe, seed ^ 0xadd2ULL);
  const auto i1 = selection_integrals(fam1, bundle, kind);
  const auto i2 = selection_integrals(fam2, bundle, kind);
  const auto isum = sum_family_integrals(fam1, fam2, bundle, kind);
  const auto proto = minkowski_sum(f1.prototype(), f2.prototype());
  double worst = 0.0;
  ReportRow worst_row{"sum", bundle.steps(), 0, std::nullopt, std::nullopt, 0.0};
  for (std::size_t p = 0; p < paths; ++p) {
    const auto lhs = path_hull(proto, isum, selections * selections, paths, p);
    const auto rhs = minkowski_sum(path_hull(f1.prototype(), i1, selections, paths, p), path_hull(f2.prototype(), i2, selections, paths, p));
    const double d = hausdorff_distance(lhs, rhs);
    if (d >= worst) {
      worst = d;
      worst_row = {"sum", bundle.steps(), bundle.first_path() + p, lhs, rhs, d};
    }
  }
  report.rows.push_back(worst_row);
  report.set("max_hausdorff_sum", worst);
  bool ok = worst <= tol;

  if (difference_clause) {
    // F1 = F2 + D with D = F1 ⊖ F2 nodewise; {psi_j + delta_i} is a family of
    // F1 and int F1 ⊖ int F2 must reproduce int D.
    const auto d = difference_process(f1, f2, bundle);
    const auto famd = build_selections(d, bundle, selections, recipe, seed ^ 0xd1ffULL);
    const auto id = selection_integrals(famd, bundle, kind);
    const auto i1_pasted = sum_family_integrals(fam2, famd, bundle, kind);
    double worst_diff = 0.0;
    ReportRow diff_row{"difference", bundle.steps(), 0, std::nullopt, std::nullopt, 0.0};
    for (std::size_t p = 0; p < paths; ++p) {
      const auto big = path_hull(f1.prototype(), i1_pasted, selections * selections, paths, p);
      const auto small = path_hull(f2.prototype(), i2, selections, paths, p);
      const auto lhs = path_hull(d.prototype(), id, selections, paths, p);
      const auto r = hukuhara_diff(big, small);
      const double dist = r.exists() ? hausdorff_distance(lhs, r.value()) : INFINITY;
      if (dist >= worst_diff) {
        worst_diff = dist;
        diff_row = {"difference", bundle.steps(), bundle.first_path() + p, lhs, r.difference, dist};
      }
    }
    report.rows.push_back(diff_row);
    report.set("max_hausdorff_difference", worst_diff);
    ok = ok && worst_diff <= tol;
  }
  report.set("tolerance", tol);
  report.passed = ok;
  report.verdict = ok ? "pass" : "fail";
  return report;
}

// ---------------------------------------------------------------------------
// Set-valued isometry: hull_j E[(int phi_j dW)^2] vs hull_j E[int phi_j^2 dt].
// ---------------------------------------------------------------------------

struct IsometryOptions {
  std::size_t paths = 100000;
  std::size_t selections = 16;
  Recipe recipe = Recipe::Extreme;
  std::uint64_t seed = 1;
  std::size_t chunk = 4096;
  double floor = 0.02;     // absolute floor of the pass threshold
  double z = 5.0;          // band multiplier
};

/// One-dimensional integrands only (f^2 is the elementwise square image).
inline CheckReport setvalued_isometry_check(const SetValuedProcess& f, const TimeGrid& grid, const IsometryOptions& opt) {
  if (f.dim() != 1 || f.prototype().kind() != SetKind::Interval)
    throw UnsupportedOperation("set-valued isometry check is implemented for interval integrands");
  const std::size_t K = opt.selections;
  std::vector<MomentAccumulator> ito(K), ito_sq(K), quad(K), gap(K);
  for (std::size_t first = 0; first < opt.paths; first += opt.chunk) {
    const std::size_t count = std::min(opt.chunk, opt.paths - first);
    const auto bundle = generate_brownian(grid, count, 1, opt.seed, first);
    const auto family = build_selections(f, bundle, K, opt.recipe, opt.seed);
    const auto ints = selection_integrals(family, bundle, IntegralKind::DW);
    for (std::size_t j = 0; j < K; ++j)
      for (std::size_t p = 0; p < count; ++p) {
        double q = 0.0;
        for (std::size_t k = 0; k < grid.steps(); ++k) q += family.value(j, p, k) * family.value(j, p, k);
        q *= grid.dt();
        const double I = ints[j * count + p];
        ito[j].add(I);
        ito_sq[j].add(I * I);
        quad[j].add(q);
        gap[j].add(I * I - q);
      }
  }
  double lhs_lo = INFINITY, lhs_hi = -INFINITY, rhs_lo = INFINITY, rhs_hi = -INFINITY, mean_lo = INFINITY, mean_hi = -INFINITY;
  double band = 0.0, mean_band = 0.0;
  for (std::size_t j = 0; j < K; ++j) {
    lhs_lo = std::min(lhs_lo, ito_sq[j].mean()), lhs_hi = std::max(lhs_hi, ito_sq[j].mean());
    rhs_lo = std::min(rhs_lo, quad[j].mean()), rhs_hi = std::max(rhs_hi, quad[j].mean());
    mean_lo = std::min(mean_lo, ito[j].mean()), mean_hi = std::max(mean_hi, ito[j].mean());
    band = std::max(band, gap[j].standard_error());
    mean_band = std::max(mean_band, ito[j].standard_error());
  }
  const auto lhs = ConvexSet::interval(lhs_lo, lhs_hi), rhs = ConvexSet::interval(rhs_lo, rhs_hi);
  const auto mean_hull = ConvexSet::interval(mean_lo, mean_hi);
  const double dist = hausdorff_distance(lhs, rhs);
  const double threshold = std::max(opt.floor, opt.z * band);
  const double mean_norm = set_norm(mean_hull);

  CheckReport report;
  report.name = "isometry";
  report.rows.push_back({"isometry", grid.steps(), opt.paths, lhs, rhs, dist});
  report.rows.push_back({"zero-mean", grid.steps(), opt.paths, mean_hull, ConvexSet::point(0.0), mean_norm});
  report.set("hausdorff", dist);
  report.set("threshold", threshold);
  report.set("mc_band", band);
  report.set("lhs_lo", lhs_lo);
  report.set("lhs_hi", lhs_hi);
  report.set("rhs_lo", rhs_lo);
  report.set("rhs_hi", rhs_hi);
  report.set("mean_hull_norm", mean_norm);
  report.set("mean_band", opt.z * mean_band);
  report.passed = dist <= threshold && mean_norm <= opt.z * mean_band;
  report.verdict = report.passed ? "pass" : "fail";
  return report;
}

// ---------------------------------------------------------------------------
// Integral equality => integrand equality, as a numerical contrapositive.
// ---------------------------------------------------------------------------

enum class EqualityVerdict { Indistinguishable, Distinguishable, Violation };

inline const char* to_string(EqualityVerdict v) {
  switch (v) {
    case EqualityVerdict::Indistinguishable: return "indistinguishable";
    case EqualityVerdict::Distinguishable: return "distinguishable";
    case EqualityVerdict::Violation: return "violation";
  }
  return "?";
}

/// Per-path hulls of int_0^{t_k} F dW for every node: out[path * nodes + k].
inline std::vector<ConvexSet> cumulative_integral_hulls(const SetValuedProcess& f, const BrownianBundle& bundle, IntegralKind kind,
                                                        std::size_t selections, Recipe recipe, std::uint64_t seed) {
  const auto family = build_selections(f, bundle, selections, recipe, seed);
  const auto& grid = bundle.grid();
  const std::size_t paths = bundle.paths(), n = f.dim(), nodes = grid.nodes();
  std::vector<ConvexSet> out(paths * nodes, ConvexSet::zero_like(f.prototype()));
  parallel_for(paths, [&](std::size_t p) {
    std::vector<double> acc(selections * n, 0.0), pts(selections * n);
    for (std::size_t k = 0; k < nodes; ++k) {
      out[p * nodes + k] = hull_of_points(f.prototype(), acc);
      if (k == grid.steps()) break;
      for (std::size_t j = 0; j < selections; ++j)
        for (std::size_t c = 0; c < n; ++c) {
          const double v = family.value(j, p, k, c);
          acc[j * n + c] += kind == IntegralKind::Dt ? v * grid.dt() : v * bundle.dW(p, k, driving_component(c, n, bundle.dims()));
        }
    }
  });
  return out;
}

struct EqualityOptions {
  std::size_t selections = 2;
  Recipe recipe = Recipe::Extreme;
  std::uint64_t seed_x = 1, seed_y = 2;
  double eps_int = -1.0;  // negative: kHullTol + z * MC band of the per-path integral distance
  double z = 5.0;
};

inline CheckReport integral_equality_diagnostic(const SetValuedProcess& x, const SetValuedProcess& y, const BrownianBundle& bundle,
                                                const EqualityOptions& opt = {}) {
  require_compatible(x.prototype(), y.prototype(), "integral_equality_diagnostic");
  const auto& grid = bundle.grid();
  const std::size_t paths = bundle.paths(), nodes = grid.nodes();
  const auto ix = cumulative_integral_hulls(x, bundle, IntegralKind::DW, opt.selections, opt.recipe, opt.seed_x);
  const auto iy = cumulative_integral_hulls(y, bundle, IntegralKind::DW, opt.selections, opt.recipe, opt.seed_y);
  double int_dist = 0.0, proc_dist = 0.0, band = 0.0;
  std::size_t int_node = 0, proc_node = 0;
  std::vector<double> per_path(paths);
  for (std::size_t k = 0; k < nodes; ++k) {
    for (std::size_t p = 0; p < paths; ++p) per_path[p] = hausdorff_distance(ix[p * nodes + k], iy[p * nodes + k]);
    const auto st = sample_stats(per_path);
    if (st.mean >= int_dist) int_dist = st.mean, int_node = k;
    band = std::max(band, st.standard_error());
    double proc = 0.0;
    for (std::size_t p = 0; p < paths; ++p)
      proc += hausdorff_distance(x.at(grid.t(k), bundle.W_at(p, k)), y.at(grid.t(k), bundle.W_at(p, k)));
    proc /= static_cast<double>(paths);
    if (proc >= proc_dist) proc_dist = proc, proc_node = k;
  }
  const double eps_int = opt.eps_int > 0 ? opt.eps_int : kHullTol + opt.z * band;
  // A constant shift c gives E h(int X dW, int Y dW) = c E|W_T| = c sqrt(2T/pi).
  const double eps_proc = 2.0 * eps_int * std::sqrt(std::numbers::pi / (2.0 * grid.horizon()));
  EqualityVerdict verdict = EqualityVerdict::Distinguishable;
  if (int_dist <= eps_int) verdict = proc_dist <= eps_proc ? EqualityVerdict::Indistinguishable : EqualityVerdict::Violation;

  CheckReport report;
  report.name = "integral-equality";
  // Path-averaged distances: the rows carry no single pair of sets.
  report.rows.push_back({"integral-mean", int_node, paths, std::nullopt, std::nullopt, int_dist});
  report.rows.push_back({"process-mean", proc_node, paths, std::nullopt, std::nullopt, proc_dist});
  report.set("integral_distance", int_dist);
  report.set("process_distance", proc_dist);
  report.set("eps_int", eps_int);
  report.set("eps_proc", eps_proc);
  report.passed = verdict != EqualityVerdict::Violation;
  report.verdict = to_string(verdict);
  return report;
}

}  // namespace svito

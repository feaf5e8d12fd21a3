#pragma once

// Scalar set-valued Ito processes X_t = x0 + int f dW + int g ds and the
// transformation identity phi(t, X_t) = phi(0, x0) + int phi_x f dW + int (...) ds.
//
// Both sides are hulls over the same selection pairs (f^{d1}, g^{d2}): the
// comparison isolates the formula from the selection sampling. Each pair is a
// single-valued Euler path, so the per-pair discrepancy is the classical
// Euler/Ito discretization error and the hull distance is bounded by its max.

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svito/integrals.hpp"
#include "svito/report.hpp"
#include "svito/selection.hpp"

namespace svito {

/// Interval-valued path on a grid, stored [path][node].
class SetPath {
 public:
  SetPath() = default;
  SetPath(std::size_t paths, std::size_t nodes) : paths_(paths), nodes_(nodes), v_(paths * nodes) {}

  std::size_t paths() const noexcept { return paths_; }
  std::size_t nodes() const noexcept { return nodes_; }
  Interval& operator()(std::size_t p, std::size_t k) { return v_[p * nodes_ + k]; }
  const Interval& operator()(std::size_t p, std::size_t k) const { return v_[p * nodes_ + k]; }
  ConvexSet set(std::size_t p, std::size_t k) const { return ConvexSet::interval(v_[p * nodes_ + k].lo, v_[p * nodes_ + k].hi); }

 private:
  std::size_t paths_ = 0, nodes_ = 0;
  std::vector<Interval> v_;
};

inline double interval_distance(const Interval& a, const Interval& b) { return std::max(std::abs(a.lo - b.lo), std::abs(a.hi - b.hi)); }

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

struct TransformSpec {
  using Fn = std::function<double(double, double)>;
  std::string name;
  Fn value, dt, dx, dxx;
  /// Exact image of an interval at time t; when empty the image is sampled.
  std::function<Interval(double, const Interval&)> image;
  /// sup |d2 phi/dx2|, used by the pass threshold. NaN for uncalibrated transforms.
  double curvature = NAN;
  bool calibrated = false;

  static TransformSpec identity() {
    return {"identity", [](double, double x) { return x; }, [](double, double) { return 0.0; },
            [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
            [](double, const Interval& x) { return x; }, 0.0, true};
  }
  static TransformSpec square() {
    return {"square", [](double, double x) { return x * x; }, [](double, double) { return 0.0; },
            [](double, double x) { return 2.0 * x; }, [](double, double) { return 2.0; },
            [](double, const Interval& x) { return square_image(x); }, 2.0, true};
  }
  static TransformSpec translate(double c) {
    return {"translate", [c](double, double x) { return x + c; }, [](double, double) { return 0.0; },
            [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
            [c](double, const Interval& x) { return Interval{x.lo + c, x.hi + c}; }, 0.0, true};
  }
  /// phi(t, x) = t x.
  static TransformSpec time_times_x() {
    return {"time-x", [](double t, double x) { return t * x; }, [](double, double x) { return x; },
            [](double t, double) { return t; }, [](double, double) { return 0.0; },
            [](double t, const Interval& x) { return Interval{t * x.lo, t * x.hi}; }, 0.0, true};
  }
};

/// identity | square | time-x | translate:<c>
inline TransformSpec parse_transform(const std::string& name) {
  if (name == "identity") return TransformSpec::identity();
  if (name == "square") return TransformSpec::square();
  if (name == "time-x") return TransformSpec::time_times_x();
  if (name.rfind("translate:", 0) == 0) return TransformSpec::translate(parse_double(name.substr(10)));
  throw UsageError("unknown transform '" + name + "' (expected identity, square, time-x or translate:<c>)");
}

/// Largest relative mismatch between declared partials and central differences.
inline double partials_mismatch(const TransformSpec& phi) {
  double worst = 0.0;
  auto rel = [&](double declared, double fd) { worst = std::max(worst, std::abs(declared - fd) / std::max(1.0, std::abs(declared))); };
  for (double t : {0.0, 0.3, 0.7, 1.0})
    for (double x : {-2.0, -0.5, 0.0, 0.4, 1.7}) {
      const double hx = 1e-4 * std::max(1.0, std::abs(x)), hxx = 1e-3 * std::max(1.0, std::abs(x)), ht = 1e-4;
      rel(phi.dx(t, x), (phi.value(t, x + hx) - phi.value(t, x - hx)) / (2 * hx));
      rel(phi.dxx(t, x), (phi.value(t, x + hxx) - 2 * phi.value(t, x) + phi.value(t, x - hxx)) / (hxx * hxx));
      rel(phi.dt(t, x), (phi.value(t + ht, x) - phi.value(t - ht, x)) / (2 * ht));
    }
  return worst;
}

/// phi(t, X) for an interval X: exact when the transform declares an image,
/// otherwise the hull of phi over 257 evenly spaced points.
inline Interval transform_image(const TransformSpec& phi, double t, const Interval& x) {
  if (phi.image) return phi.image(t, x);
  Interval out{INFINITY, -INFINITY};
  for (int i = 0; i <= 256; ++i) {
    const double v = phi.value(t, x.lo + (x.hi - x.lo) * i / 256.0);
    out.lo = std::min(out.lo, v), out.hi = std::max(out.hi, v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward simulation
// ---------------------------------------------------------------------------

struct SetItoProcess {
  double x0 = 0.0;
  SetValuedProcess f;  // diffusion
  SetValuedProcess g;  // drift
};

struct SetItoRun {
  SetPath x;    // hull over pairs of the Euler paths
  SetPath lhs;  // hull over pairs of phi(t, x^{d1 d2})
  SetPath rhs;  // hull over pairs of the accumulated Ito-formula right side
  std::size_t pairs = 0;
  double sup_f = 0.0, sup_g = 0.0;  // sup of the coefficient norms seen
};

namespace detail {

inline bool is_point_constant(const SetValuedProcess& f) {
  return f.is_constant() && f.prototype().kind() == SetKind::Interval && f.prototype().as_interval().width() == 0.0;
}

inline void require_scalar(const SetValuedProcess& f, const char* what) {
  if (f.dim() != 1 || f.prototype().kind() != SetKind::Interval)
    throw UnsupportedOperation(std::string(what) + ": only scalar interval coefficients are supported");
}

/// Selection count actually used: a constant singleton has one distinct selection.
inline std::size_t effective_count(const SetValuedProcess& f, std::size_t K, Recipe recipe) {
  if (is_point_constant(f)) return 1;
  const std::size_t minimum = minimal_selection_count(f.prototype(), recipe);
  if (K < minimum) throw UsageError("selection count " + std::to_string(K) + " is below the recipe minimum " + std::to_string(minimum));
  return K;
}

/// values[j * nodes + k] of selections of f along path p.
inline void path_selections(const SetValuedProcess& f, const SelectionRule& rule, std::size_t count, const BrownianBundle& b,
                            std::size_t p, std::vector<double>& values, double& sup_norm) {
  const auto& grid = b.grid();
  const std::size_t nodes = grid.nodes();
  values.assign(count * nodes, 0.0);
  double out = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const auto w = b.W_at(p, k);
    const ConvexSet set = f.at(grid.t(k), w);
    sup_norm = std::max(sup_norm, set_norm(set));
    for (std::size_t j = 0; j < count; ++j) {
      rule.evaluate(j, set, grid.t(k), w, std::span<double>(&out, 1));
      values[j * nodes + k] = out;
    }
  }
}

inline void widen(Interval& hull, double v) {
  hull.lo = std::min(hull.lo, v);
  hull.hi = std::max(hull.hi, v);
}

}  // namespace detail

/// Simulates all K_f x K_g selection pairs per path. With `phi` set, also
/// accumulates both sides of the transformation identity along each pair.
inline SetItoRun run_set_ito(const SetItoProcess& proc, const TransformSpec* phi, const BrownianBundle& bundle, std::size_t K,
                             Recipe recipe = Recipe::Mix, std::uint64_t seed = 1) {
  detail::require_scalar(proc.f, "set-valued Ito process");
  detail::require_scalar(proc.g, "set-valued Ito process");
  if (bundle.dims() != 1) throw StructuralError("set-valued Ito process: scalar processes need a one-dimensional Brownian motion");
  const auto& grid = bundle.grid();
  const std::size_t nodes = grid.nodes(), paths = bundle.paths();
  const std::size_t kf = detail::effective_count(proc.f, K, recipe), kg = detail::effective_count(proc.g, K, recipe);
  SelectionRule rf(proc.f.prototype(), recipe, seed, grid.horizon()), rg(proc.g.prototype(), recipe, seed ^ 0x9a11ULL, grid.horizon());
  rf.prepare(kf);
  rg.prepare(kg);

  SetItoRun run{SetPath(paths, nodes), SetPath(paths, nodes), SetPath(paths, nodes), kf * kg, 0.0, 0.0};
  std::vector<double> sup_f(paths, 0.0), sup_g(paths, 0.0);
  const double dt = grid.dt();
  parallel_for(paths, [&](std::size_t p) {
    std::vector<double> fv, gv;
    detail::path_selections(proc.f, rf, kf, bundle, p, fv, sup_f[p]);
    detail::path_selections(proc.g, rg, kg, bundle, p, gv, sup_g[p]);
    for (std::size_t k = 0; k < nodes; ++k) {
      run.x(p, k) = {INFINITY, -INFINITY};
      if (phi) run.lhs(p, k) = run.rhs(p, k) = {INFINITY, -INFINITY};
    }
    for (std::size_t d1 = 0; d1 < kf; ++d1)
      for (std::size_t d2 = 0; d2 < kg; ++d2) {
        const double* fs = &fv[d1 * nodes];
        const double* gs = &gv[d2 * nodes];
        double x = proc.x0, r = phi ? phi->value(0.0, proc.x0) : 0.0;
        for (std::size_t k = 0;; ++k) {
          const double t = grid.t(k);
          detail::widen(run.x(p, k), x);
          if (phi) {
            detail::widen(run.lhs(p, k), phi->value(t, x));
            detail::widen(run.rhs(p, k), r);
          }
          if (k == grid.steps()) break;
          const double dw = bundle.dW(p, k);
          if (phi) {
            const double px = phi->dx(t, x);
            r += px * fs[k] * dw + (phi->dt(t, x) + px * gs[k] + 0.5 * phi->dxx(t, x) * fs[k] * fs[k]) * dt;
          }
          x += fs[k] * dw + gs[k] * dt;
        }
      }
  });
  for (std::size_t p = 0; p < paths; ++p) run.sup_f = std::max(run.sup_f, sup_f[p]), run.sup_g = std::max(run.sup_g, sup_g[p]);
  return run;
}

inline SetPath simulate_set_ito(const SetItoProcess& proc, const BrownianBundle& bundle, std::size_t K, Recipe recipe = Recipe::Mix,
                                std::uint64_t seed = 1) {
  return run_set_ito(proc, nullptr, bundle, K, recipe, seed).x;
}

/// phi(t, X_t) applied set by set.
inline SetPath ito_lhs(const TransformSpec& phi, const SetPath& x, const TimeGrid& grid) {
  SetPath out(x.paths(), x.nodes());
  for (std::size_t p = 0; p < x.paths(); ++p)
    for (std::size_t k = 0; k < x.nodes(); ++k) out(p, k) = transform_image(phi, grid.t(k), x(p, k));
  return out;
}

inline SetPath ito_rhs(const TransformSpec& phi, const SetItoProcess& proc, const BrownianBundle& bundle, std::size_t K,
                       Recipe recipe = Recipe::Mix, std::uint64_t seed = 1) {
  return run_set_ito(proc, &phi, bundle, K, recipe, seed).rhs;
}

// ---------------------------------------------------------------------------
// Verification of the transformation identity
// ---------------------------------------------------------------------------

struct ItoOptions {
  std::size_t selections = 8;
  Recipe recipe = Recipe::Mix;
  std::uint64_t seed = 1;
  double a = 1.5;   // discretization coefficient; singleton theory gives 1/sqrt(2)
  double b = 10.0;  // hull tolerance multiplier
};

struct ItoNodeStat {
  std::size_t node = 0;
  double max_hausdorff = 0.0;  // over paths
  double rms_hausdorff = 0.0;  // root mean square over paths
};

struct ItoVerification {
  CheckReport report;
  std::vector<ItoNodeStat> nodes;
  std::vector<double> terminal;  // per-path distance at T
  double threshold = 0.0;
  double statistic = 0.0;  // max over nodes of the RMS distance
};

/// threshold = a sqrt(dt) kappa + b eps_hull with
/// kappa = (sup|f|^2 + sup|g|^2) sqrt(T) max(1, sup|phi''|).
inline ItoVerification verify_ito_formula(const TransformSpec& phi, const SetItoProcess& proc, const BrownianBundle& bundle,
                                          const ItoOptions& opt = {}) {
  const auto run = run_set_ito(proc, &phi, bundle, opt.selections, opt.recipe, opt.seed);
  const auto& grid = bundle.grid();
  const std::size_t paths = bundle.paths();
  ItoVerification out;
  double curvature = phi.curvature;
  if (!phi.calibrated || !std::isfinite(curvature)) {
    // Uncalibrated: estimate sup |phi''| over the simulated range.
    curvature = 0.0;
    for (std::size_t p = 0; p < paths; ++p)
      for (std::size_t k = 0; k < grid.nodes(); k += std::max<std::size_t>(1, grid.steps() / 16)) {
        curvature = std::max(curvature, std::abs(phi.dxx(grid.t(k), run.x(p, k).lo)));
        curvature = std::max(curvature, std::abs(phi.dxx(grid.t(k), run.x(p, k).hi)));
      }
  }
  const double kappa = (run.sup_f * run.sup_f + run.sup_g * run.sup_g) * std::sqrt(grid.horizon()) * std::max(1.0, curvature);
  out.threshold = opt.a * std::sqrt(grid.dt()) * kappa + opt.b * kHullTol;
  out.terminal.resize(paths);
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    ItoNodeStat s{k, 0.0, 0.0};
    for (std::size_t p = 0; p < paths; ++p) {
      const double h = interval_distance(run.lhs(p, k), run.rhs(p, k));
      s.max_hausdorff = std::max(s.max_hausdorff, h);
      s.rms_hausdorff += h * h;
      if (k == grid.steps()) out.terminal[p] = h;
    }
    s.rms_hausdorff = std::sqrt(s.rms_hausdorff / static_cast<double>(paths));
    out.statistic = std::max(out.statistic, s.rms_hausdorff);
    out.nodes.push_back(s);
  }
  auto& r = out.report;
  r.name = "ito-formula";
  const std::size_t N = grid.steps();
  r.rows.push_back({"ito", N, 0, run.lhs.set(0, N), run.rhs.set(0, N), interval_distance(run.lhs(0, N), run.rhs(0, N))});
  r.set("statistic", out.statistic);
  r.set("threshold", out.threshold);
  r.set("max_hausdorff", std::max_element(out.nodes.begin(), out.nodes.end(), [](auto& a, auto& b) {
                           return a.max_hausdorff < b.max_hausdorff;
                         })->max_hausdorff);
  r.set("pairs", static_cast<double>(run.pairs));
  r.set("partials_mismatch", partials_mismatch(phi));
  r.passed = out.statistic <= out.threshold;
  r.verdict = !phi.calibrated ? "uncalibrated" : r.passed ? "pass" : "fail";
  return out;
}

inline void write_ito_csv(std::ostream& out, const ItoVerification& v) {
  out << "node,max_hausdorff,threshold,pass,rms_hausdorff\n";
  for (const auto& s : v.nodes)
    out << s.node << ',' << format_double(s.max_hausdorff) << ',' << format_double(v.threshold) << ','
        << (s.rms_hausdorff <= v.threshold ? "true" : "false") << ',' << format_double(s.rms_hausdorff) << '\n';
}

// ---------------------------------------------------------------------------
// Squared-process inclusion for the backward form
//   X(t) = x_T + int_t^T f(s, X, Z) ds (-) int_t^T Z dW:
//   X^2 + int Z^2 ds  subset of  x_T^2 + 2 int X f ds - 2 int X Z dW.
// ---------------------------------------------------------------------------

struct SquareProblem {
  std::string name;
  SetValuedProcess terminal;  // x_T = terminal(T, W_T)
  SetValuedProcess z;
  /// Single-valued driver evaluated along each selection pair: f(t, x, z).
  std::function<double(double, double, double)> driver = [](double, double, double) { return 0.0; };
};

struct InclusionOptions {
  std::size_t selections = 8;
  Recipe recipe = Recipe::Mix;
  std::uint64_t seed = 1;
  double z = 5.0;
  double fraction = 0.999;
  double eps = -1.0;  // < 0: z * band + hull tolerance
};

struct InclusionResult {
  CheckReport report;
  SetPath x, lhs, rhs;
  std::vector<double> worst_excess;  // per path, max over nodes
  double band = 0.0, eps = 0.0, pass_fraction = 0.0;
  double mean_gap = 0.0;  // max over nodes of the mean Hausdorff gap LHS vs RHS

  /// Fraction of paths whose excess stays within e at every node.
  double fraction_within(double e) const {
    std::size_t ok = 0;
    for (double v : worst_excess) ok += v <= e;
    return worst_excess.empty() ? 1.0 : static_cast<double>(ok) / static_cast<double>(worst_excess.size());
  }
};

inline InclusionResult verify_square_inclusion(const SquareProblem& prob, const BrownianBundle& bundle, const InclusionOptions& opt = {}) {
  detail::require_scalar(prob.terminal, "square inclusion");
  detail::require_scalar(prob.z, "square inclusion");
  if (bundle.dims() != 1) throw StructuralError("square inclusion: needs a one-dimensional Brownian motion");
  const auto& grid = bundle.grid();
  const std::size_t nodes = grid.nodes(), N = grid.steps(), paths = bundle.paths();
  const double dt = grid.dt(), T = grid.horizon();
  const std::size_t kx = detail::effective_count(prob.terminal, opt.selections, opt.recipe);
  const std::size_t kz = detail::effective_count(prob.z, opt.selections, opt.recipe);
  SelectionRule rx(prob.terminal.prototype(), opt.recipe, opt.seed, T), rz(prob.z.prototype(), opt.recipe, opt.seed ^ 0x2bULL, T);
  rx.prepare(kx);
  rz.prepare(kz);

  InclusionResult res{{}, SetPath(paths, nodes), SetPath(paths, nodes), SetPath(paths, nodes), std::vector<double>(paths, 0.0)};
  // Matched discrepancy LHS_sel - RHS_sel per node, pooled over paths and pairs (per-path partial sums, merged in order).
  std::vector<double> gap_sum(paths * nodes, 0.0), gap_sq(paths * nodes, 0.0), hgap(paths * nodes, 0.0);
  std::vector<int> missing(paths, -1);

  parallel_for(paths, [&](std::size_t p) {
    const ConvexSet xt = prob.terminal.at(T, bundle.W_at(p, N));
    std::vector<double> xi(kx);
    for (std::size_t i = 0; i < kx; ++i) rx.evaluate(i, xt, T, bundle.W_at(p, N), std::span<double>(&xi[i], 1));
    std::vector<double> zv;
    double unused = 0.0;
    detail::path_selections(prob.z, rz, kz, bundle, p, zv, unused);

    std::vector<Interval> lhs(nodes, {INFINITY, -INFINITY}), rhs = lhs, drift = lhs, noise = lhs, xs = lhs;
    std::vector<double> x(nodes);
    for (std::size_t i = 0; i < kx; ++i)
      for (std::size_t j = 0; j < kz; ++j) {
        const double* zs = &zv[j * nodes];
        x[N] = xi[i];
        double zsq = 0.0, fx = 0.0, xz = 0.0, fsum = 0.0, zdw = 0.0;
        auto record = [&](std::size_t k) {
          const double l = x[k] * x[k] + zsq, r = xi[i] * xi[i] + 2 * fx - 2 * xz;
          detail::widen(lhs[k], l);
          detail::widen(rhs[k], r);
          detail::widen(drift[k], xi[i] + fsum);
          detail::widen(noise[k], zdw);
          detail::widen(xs[k], x[k]);
          gap_sum[p * nodes + k] += l - r;
          gap_sq[p * nodes + k] += (l - r) * (l - r);
        };
        record(N);
        for (std::size_t k = N; k-- > 0;) {
          const double t = grid.t(k), dw = bundle.dW(p, k);
          const double f = prob.driver(t, x[k + 1], zs[k]);
          x[k] = x[k + 1] + f * dt - zs[k] * dw;
          zsq += zs[k] * zs[k] * dt;
          fsum += f * dt;
          zdw += zs[k] * dw;
          fx += x[k] * f * dt;
          xz += x[k] * zs[k] * dw;
          record(k);
        }
      }
    for (std::size_t k = 0; k < nodes; ++k) {
      // X(t_k) as the Hukuhara difference of the two hulls; its existence is a property of the input problem.
      const auto diff = hukuhara_diff(ConvexSet::interval(drift[k].lo, drift[k].hi), ConvexSet::interval(noise[k].lo, noise[k].hi));
      if (!diff.exists() && missing[p] < 0) missing[p] = static_cast<int>(k);
      res.x(p, k) = xs[k];
      res.lhs(p, k) = lhs[k];
      res.rhs(p, k) = rhs[k];
      const double ex = std::max({0.0, rhs[k].lo - lhs[k].lo, lhs[k].hi - rhs[k].hi});
      res.worst_excess[p] = std::max(res.worst_excess[p], ex);
      hgap[p * nodes + k] = interval_distance(lhs[k], rhs[k]);
    }
  });
  for (std::size_t p = 0; p < paths; ++p)
    if (missing[p] >= 0)
      throw StructuralError("square inclusion '" + prob.name + "': x_T + int f ds (-) int Z dW does not exist at node " +
                            std::to_string(missing[p]) + " of path " + std::to_string(p));

  const double per_node = static_cast<double>(paths * kx * kz);
  for (std::size_t k = 0; k < nodes; ++k) {
    double s = 0.0, sq = 0.0, h = 0.0;
    for (std::size_t p = 0; p < paths; ++p) s += gap_sum[p * nodes + k], sq += gap_sq[p * nodes + k], h += hgap[p * nodes + k];
    const double mean = s / per_node;
    const double var = per_node > 1 ? std::max(0.0, (sq - per_node * mean * mean) / (per_node - 1)) : 0.0;
    res.band = std::max(res.band, std::sqrt(var));
    res.mean_gap = std::max(res.mean_gap, h / static_cast<double>(paths));
  }
  res.eps = opt.eps >= 0 ? opt.eps : opt.z * res.band + kHullTol;
  res.pass_fraction = res.fraction_within(res.eps);

  auto& r = res.report;
  r.name = "square-inclusion";
  r.rows.push_back({prob.name, 0, 0, res.lhs.set(0, 0), res.rhs.set(0, 0), interval_distance(res.lhs(0, 0), res.rhs(0, 0))});
  r.set("band", res.band);
  r.set("eps", res.eps);
  r.set("pass_fraction", res.pass_fraction);
  r.set("mean_gap", res.mean_gap);
  r.set("pairs", static_cast<double>(kx * kz));
  r.passed = res.pass_fraction >= opt.fraction;
  r.verdict = r.passed ? "pass" : "fail";
  return res;
}

}  // namespace svito

#pragma once

// Picard iteration for the scalar set-valued BSDE
//   Y_t = xi + int_t^T f(s, Y_s, Z_s) ds (-) int_t^T Z_s dW_s
// with interval carriers. Each iterate is
//   X^p(t_k) = E[xi + sum_{j>=k} f(t_j, X^{p-1}, Z^{p-1}) dt | F_k]
// computed endpointwise as (midpoint, radius) regressions, and Z^p is the
// integrand of the martingale E[. | F_t], recovered by increment regression.

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "svito/integrals.hpp"
#include "svito/ito_formula.hpp"
#include "svito/regression.hpp"

namespace svito {

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

/// xi = {g(W_T)} + [alpha, beta].
struct TerminalSpec {
  std::string generator = "zero";  // zero | identity | square | sin | call
  double alpha = 0.0, beta = 0.0;
  double strike = 0.0;  // call only

  double g(double w) const {
    if (generator == "zero") return 0.0;
    if (generator == "identity") return w;
    if (generator == "square") return w * w;
    if (generator == "sin") return std::sin(w);
    if (generator == "call") return std::max(w - strike, 0.0);
    throw UsageError("unknown terminal generator '" + generator + "'");
  }
  Interval at(double w) const { return {g(w) + alpha, g(w) + beta}; }
  void validate() const {
    g(0.0);
    if (!(alpha <= beta)) throw UsageError("terminal interval needs alpha <= beta");
  }
};

enum class DriverArity { None, ZOnly, YZ };

inline const char* to_string(DriverArity a) {
  switch (a) {
    case DriverArity::None: return "none";
    case DriverArity::ZOnly: return "z";
    case DriverArity::YZ: return "yz";
  }
  return "?";
}

/// f(t, Y, Z) = a Y + b Z + [c1, c2]; the zero and constant forms fix a = b = 0.
struct DriverSpec {
  std::string form = "zero";  // zero | constant | linear
  double a = 0.0, b = 0.0, c1 = 0.0, c2 = 0.0;
  double lipschitz = NAN;  // declared constant c; NaN means max(|a|, |b|)

  DriverArity arity() const {
    if (a != 0.0) return DriverArity::YZ;
    if (b != 0.0) return DriverArity::ZOnly;
    return DriverArity::None;
  }
  double constant_c() const { return std::isnan(lipschitz) ? std::max(std::abs(a), std::abs(b)) : lipschitz; }

  Interval operator()(double, const Interval& y, const Interval& z) const {
    auto scale = [](double s, const Interval& x) { return s >= 0 ? Interval{s * x.lo, s * x.hi} : Interval{s * x.hi, s * x.lo}; };
    const Interval ay = scale(a, y), bz = scale(b, z);
    return {ay.lo + bz.lo + c1, ay.hi + bz.hi + c2};
  }

  void validate() const {
    if (form != "zero" && form != "constant" && form != "linear") throw UsageError("unknown driver form '" + form + "'");
    if (form != "linear" && (a != 0.0 || b != 0.0)) throw UsageError("driver coefficients a, b need the linear form");
    if (form == "zero" && (c1 != 0.0 || c2 != 0.0)) throw UsageError("the zero driver takes no constants");
    if (!(c1 <= c2)) throw UsageError("driver constant interval needs c1 <= c2");
    if (!std::isnan(lipschitz) && lipschitz < std::max(std::abs(a), std::abs(b)))
      throw UsageError("declared Lipschitz constant is below max(|a|, |b|)");
  }
};

struct SVBSDEProblem {
  TerminalSpec xi;
  DriverSpec driver;
  double T = 1.0;
};

/// Audits the driver on random pairs with existing differences: the output
/// difference must exist and be c-Lipschitz. Returns the violation count.
inline std::size_t audit_driver(const DriverSpec& f, std::size_t pairs, std::uint64_t seed, double tol = 1e-12) {
  const double c = f.constant_c();
  std::size_t bad = 0;
  auto u = [&](std::uint64_t i, std::uint64_t j) { return 4.0 * counter_uniform(seed, 0xa0d17ULL + i, j) - 2.0; };
  for (std::size_t i = 0; i < pairs; ++i) {
    const Interval b{u(i, 0), u(i, 0) + std::abs(u(i, 1))}, d{u(i, 2), u(i, 2) + std::abs(u(i, 3))};
    const Interval ca{u(i, 4), u(i, 4) + std::abs(u(i, 5))}, cc{u(i, 6), u(i, 6) + std::abs(u(i, 7))};
    const Interval a{b.lo + ca.lo, b.hi + ca.hi}, zc{d.lo + cc.lo, d.hi + cc.hi};
    const double t = 0.5 * (u(i, 8) + 2.0);
    const Interval fa = f(t, a, zc), fb = f(t, b, d);
    const auto diff = hukuhara_diff(ConvexSet::interval(fa.lo, fa.hi), ConvexSet::interval(fb.lo, fb.hi));
    const double bound = c * (set_norm(ConvexSet::interval(ca.lo, ca.hi)) + set_norm(ConvexSet::interval(cc.lo, cc.hi)));
    if (!diff.exists() || set_norm(diff.value()) > bound + tol) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Conditional expectation and martingale representation
// ---------------------------------------------------------------------------

/// E[A | F_k] per path, endpointwise through (midpoint, radius >= 0).
inline std::vector<Interval> conditional_expectation_set(std::span<const Interval> a, const DiscreteFiltration& filt, std::size_t k) {
  const std::size_t M = a.size();
  std::vector<double> mid(M), rad(M);
  for (std::size_t p = 0; p < M; ++p) mid[p] = a[p].mid(), rad[p] = a[p].radius();
  const auto m = filt.expect(k, mid), r = filt.expect(k, rad);
  std::vector<Interval> out(M);
  for (std::size_t p = 0; p < M; ++p) {
    const double rr = std::max(r[p], 0.0);
    out[p] = {m[p] - rr, m[p] + rr};
  }
  return out;
}

namespace detail {

/// Z_k as the dW_k-loading of the centered increment M_{k+1} - E_k M_{k+1}, for midpoint and radius.
inline std::vector<Interval> representation_step(const DiscreteFiltration& filt, std::size_t k, std::span<const Interval> next) {
  const std::size_t M = next.size();
  std::vector<double> mid(M), rad(M);
  for (std::size_t p = 0; p < M; ++p) mid[p] = next[p].mid(), rad[p] = next[p].radius();
  const auto em = filt.expect(k, mid), er = filt.expect(k, rad);
  for (std::size_t p = 0; p < M; ++p) mid[p] -= em[p], rad[p] -= er[p];
  const auto zm = filt.loading(k, mid), zr = filt.loading(k, rad);
  std::vector<Interval> z(M);
  for (std::size_t p = 0; p < M; ++p) z[p] = {zm[p] - std::abs(zr[p]), zm[p] + std::abs(zr[p])};
  return z;
}

inline void column(const SetPath& s, std::size_t k, std::vector<Interval>& out) {
  out.resize(s.paths());
  for (std::size_t p = 0; p < s.paths(); ++p) out[p] = s(p, k);
}

}  // namespace detail

/// Z from a discrete set martingale M (paths x nodes). Z at the last node is NaN.
inline SetPath martingale_representation_extract(const SetPath& m, const DiscreteFiltration& filt, double tol = 0.05) {
  const auto& grid = filt.bundle().grid();
  const std::size_t M = m.paths(), N = grid.steps();
  SetPath z(M, grid.nodes());
  std::vector<Interval> next, cur;
  double worst = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    detail::column(m, k + 1, next);
    detail::column(m, k, cur);
    const auto e = conditional_expectation_set(next, filt, k);
    double sq = 0.0;
    for (std::size_t p = 0; p < M; ++p) sq += std::pow(interval_distance(e[p], cur[p]), 2);
    worst = std::max(worst, std::sqrt(sq / static_cast<double>(M)));
    const auto zk = detail::representation_step(filt, k, next);
    for (std::size_t p = 0; p < M; ++p) z(p, k) = zk[p];
  }
  for (std::size_t p = 0; p < M; ++p) z(p, N) = {NAN, NAN};
  if (worst > tol)
    throw DiagnosticFailure("martingale representation: input is not a discrete martingale (gap " + format_double(worst) +
                            " > " + format_double(tol) + ")");
  return z;
}

// ---------------------------------------------------------------------------
// Picard iteration
// ---------------------------------------------------------------------------

struct Initialization {
  enum class Kind { Zero, Constant, Brownian } kind = Kind::Zero;
  double value = 0.0;  // Constant: X^0 = {value}

  static Initialization parse(const std::string& text) {
    if (text == "zero") return {};
    if (text == "brownian") return {Kind::Brownian, 0.0};
    if (text.rfind("constant:", 0) == 0) return {Kind::Constant, parse_double(text.substr(9))};
    throw UsageError("unknown initialization '" + text + "' (expected zero, constant:<c> or brownian)");
  }
  std::string name() const {
    switch (kind) {
      case Kind::Zero: return "zero";
      case Kind::Constant: return "constant:" + format_double(value);
      case Kind::Brownian: return "brownian";
    }
    return "?";
  }
};

struct SolverOptions {
  std::size_t max_iter = 30;
  double tol = 1e-6;  // converged when max(u_p, v_p) <= tol^2
  std::size_t selections = 2;  // Z-selections in the fixed-point residual
  Recipe recipe = Recipe::Mix;
  std::uint64_t selection_seed = 1;
  Initialization init;
  double existence_tol = 10 * kHullTol;
  double residual_tol = 0.25;
  double martingale_tol = 0.05;
  std::size_t audit_pairs = 2000;
};

struct PicardIterate {
  std::size_t iter = 0;
  double u = 0.0, v = 0.0;
  double ratio_u = NAN, ratio_v = NAN;
  double envelope = NAN;  // theoretical bound on u_p for p >= 2
};

struct PicardReport {
  std::vector<PicardIterate> iterations;
  SetPath y, z;
  bool converged = false;
  std::string verdict;  // converged | not-converged | existence-failure
  std::string failure;
  DriverArity arity = DriverArity::None;
  double c = 0.0, c_bar = 0.0, c1 = 0.0, c2 = 0.0;
  double residual = 0.0;        // max over nodes of the RMS fixed-point residual
  double martingale_gap = 0.0;  // RMS of E[I_T | F_s] - I_s at s = T/2
  bool telescoping_ok = true;
  double telescoping_slack = INFINITY;  // min over checks of bound - measured
  bool ridge_fallback = false;
};

/// Envelope on u_p (p >= 2) from the contraction argument matching the driver's arity.
inline double picard_envelope(DriverArity arity, std::size_t p, double c, double T, double c_bar, double c1, double c2) {
  if (p < 2) return NAN;
  const double q = static_cast<double>(p - 1);  // u_{q+1}
  if (arity != DriverArity::YZ) return std::pow(2.0, -q) * c_bar * std::exp(2 * c * c * T);
  double sum = 0.0, term = 1.0;
  const double e = std::exp(4 * c * c * T);
  for (std::size_t k = 1; k + 1 <= p; ++k) {
    term *= e / static_cast<double>(k);
    sum += term;
  }
  return T * (c1 + c2) / std::pow(2.0, q - 1) * sum;
}

namespace detail {

inline void initialize(const Initialization& init, const BrownianBundle& b, SetPath& x, SetPath& z) {
  for (std::size_t p = 0; p < b.paths(); ++p)
    for (std::size_t k = 0; k < b.grid().nodes(); ++k) {
      double xv = 0.0, zv = 0.0;
      if (init.kind == Initialization::Kind::Constant) xv = init.value;
      if (init.kind == Initialization::Kind::Brownian) xv = b.W(p, k), zv = 1.0;
      x(p, k) = {xv, xv};
      z(p, k) = k == b.grid().steps() ? Interval{NAN, NAN} : Interval{zv, zv};
    }
}

/// E int ||a (-) b||^2 ds over nodes [0, N); the difference must exist within tol.
struct DistanceResult {
  double value = 0.0;
  bool exists = true;
  std::size_t path = 0, node = 0;
};

inline DistanceResult squared_distance(const SetPath& a, const SetPath& b, double dt, std::size_t steps, double tol) {
  DistanceResult r;
  for (std::size_t p = 0; p < a.paths(); ++p)
    for (std::size_t k = 0; k < steps; ++k) {
      const Interval &x = a(p, k), &y = b(p, k);
      if (x.width() < y.width() - tol && r.exists) r = {r.value, false, p, k};
      const double d = interval_distance(x, y);
      r.value += d * d * dt;
    }
  r.value /= static_cast<double>(a.paths());
  return r;
}

}  // namespace detail

/// One Picard sweep: (X^{p-1}, Z^{p-1}) -> (X^p, Z^p).
inline void picard_step(const SetPath& xprev, const SetPath& zprev, const SVBSDEProblem& prob, const DiscreteFiltration& filt,
                        SetPath& x, SetPath& z) {
  const auto& b = filt.bundle();
  const auto& grid = b.grid();
  const std::size_t M = b.paths(), N = grid.steps();
  const double dt = grid.dt();
  std::vector<Interval> acc(M), next(M);
  for (std::size_t p = 0; p < M; ++p) {
    acc[p] = prob.xi.at(b.W(p, N));
    x(p, N) = acc[p];
    z(p, N) = {NAN, NAN};
    next[p] = acc[p];
  }
  for (std::size_t k = N; k-- > 0;) {
    const double t = grid.t(k);
    // Tower property: E_k[xi + sum_{j>=k} f dt] = E_k[X_{k+1} + f_k dt]. Regressing the
    // one-step target keeps the residual O(sqrt(dt)), which Z inherits through 1/dt.
    for (std::size_t p = 0; p < M; ++p) {
      const Interval f = prob.driver(t, xprev(p, k), zprev(p, k));
      acc[p] = {next[p].lo + f.lo * dt, next[p].hi + f.hi * dt};
    }
    const auto xk = conditional_expectation_set(acc, filt, k);
    const auto zk = detail::representation_step(filt, k, next);
    for (std::size_t p = 0; p < M; ++p) x(p, k) = xk[p], z(p, k) = zk[p];
    next = xk;
  }
}

namespace detail {

/// max over nodes of the RMS over paths of h(Y_k + int_k^T Z dW, xi + int_k^T f ds).
inline double fixed_point_residual(const SVBSDEProblem& prob, const SetPath& y, const SetPath& z, const BrownianBundle& b,
                                   const SolverOptions& opt) {
  const auto& grid = b.grid();
  const std::size_t M = b.paths(), N = grid.steps(), K = std::max<std::size_t>(opt.selections, 2);
  const double dt = grid.dt();
  SelectionRule rule(ConvexSet::interval(0, 0), opt.recipe, opt.selection_seed, grid.horizon());
  rule.prepare(K);
  std::vector<double> sq(grid.nodes() * M, 0.0);
  parallel_for(M, [&](std::size_t p) {
    Interval drift = prob.xi.at(b.W(p, N));
    std::vector<double> ints(K, 0.0);
    for (std::size_t k = N + 1; k-- > 0;) {
      if (k < N) {
        const Interval f = prob.driver(grid.t(k), y(p, k), z(p, k));
        drift.lo += f.lo * dt, drift.hi += f.hi * dt;
        const ConvexSet zs = ConvexSet::interval(z(p, k).lo, z(p, k).hi);
        for (std::size_t j = 0; j < K; ++j) {
          double v = 0.0;
          rule.evaluate(j, zs, grid.t(k), b.W_at(p, k), std::span<double>(&v, 1));
          ints[j] += v * b.dW(p, k);
        }
      }
      Interval noise{INFINITY, -INFINITY};
      for (double v : ints) noise.lo = std::min(noise.lo, v), noise.hi = std::max(noise.hi, v);
      const Interval lhs{y(p, k).lo + noise.lo, y(p, k).hi + noise.hi};
      sq[k * M + p] = std::pow(interval_distance(lhs, drift), 2);
    }
  });
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    double s = 0.0;
    for (std::size_t p = 0; p < M; ++p) s += sq[k * M + p];
    worst = std::max(worst, std::sqrt(s / static_cast<double>(M)));
  }
  return worst;
}

/// RMS of E[I_T | F_s] - I_s with I the endpoint-selection integrals of Z, s = T/2.
inline double martingale_gap(const SetPath& z, const DiscreteFiltration& filt) {
  const auto& b = filt.bundle();
  const std::size_t M = b.paths(), N = b.grid().steps(), s = N / 2;
  std::vector<Interval> at_s(M), at_T(M);
  for (std::size_t p = 0; p < M; ++p) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      if (k == s) at_s[p] = {std::min(lo, hi), std::max(lo, hi)};
      lo += z(p, k).lo * b.dW(p, k);
      hi += z(p, k).hi * b.dW(p, k);
    }
    at_T[p] = {std::min(lo, hi), std::max(lo, hi)};
  }
  const auto e = conditional_expectation_set(at_T, filt, s);
  double sq = 0.0;
  for (std::size_t p = 0; p < M; ++p) sq += std::pow(interval_distance(e[p], at_s[p]), 2);
  return std::sqrt(sq / static_cast<double>(M));
}

}  // namespace detail

inline PicardReport solve_svbsde(const SVBSDEProblem& prob, const DiscreteFiltration& filt, const SolverOptions& opt = {}) {
  prob.xi.validate();
  prob.driver.validate();
  if (!(opt.tol > 0)) throw UsageError("solver tolerance must be positive");
  const auto& b = filt.bundle();
  const auto& grid = b.grid();
  if (std::abs(grid.horizon() - prob.T) > 1e-12) throw StructuralError("BSDE horizon does not match the time grid");
  if (const auto bad = audit_driver(prob.driver, opt.audit_pairs, opt.selection_seed))
    throw DiagnosticFailure("driver fails the difference/Lipschitz audit on " + std::to_string(bad) + " sampled pairs");

  const std::size_t M = b.paths(), nodes = grid.nodes(), N = grid.steps();
  const double dt = grid.dt();
  PicardReport rep;
  rep.arity = prob.driver.arity();
  rep.c = prob.driver.constant_c();
  rep.ridge_fallback = filt.ridge_fallback();

  SetPath x0(M, nodes), z0(M, nodes), x1, z1, xprev(M, nodes), zprev(M, nodes), x(M, nodes), z(M, nodes);
  detail::initialize(opt.init, b, x0, z0);
  xprev = x0, zprev = z0;
  double tele_x = 0.0, tele_z = 0.0, tele_x1 = 0.0, tele_z1 = 0.0;
  auto norm_s = [&](const SetPath& a, const SetPath& c) {
    return std::sqrt(detail::squared_distance(a, c, dt, N, INFINITY).value);
  };

  for (std::size_t p = 1; p <= opt.max_iter; ++p) {
    picard_step(xprev, zprev, prob, filt, x, z);
    const auto du = detail::squared_distance(x, xprev, dt, N, opt.existence_tol);
    const auto dv = detail::squared_distance(z, zprev, dt, N, opt.existence_tol);
    if (!du.exists || !dv.exists) {
      const auto& bad = !du.exists ? du : dv;
      rep.verdict = "existence-failure";
      rep.failure = std::string(!du.exists ? "X" : "Z") + "^" + std::to_string(p) + " (-) " + (!du.exists ? "X" : "Z") + "^" +
                    std::to_string(p - 1) + " does not exist at node " + std::to_string(bad.node) + " of path " +
                    std::to_string(bad.path) + "; the grid may be too coarse, try doubling N";
      break;
    }
    PicardIterate it{p, du.value, dv.value};
    if (p == 1) {
      rep.c_bar = rep.c1 = dv.value;
      rep.c2 = du.value;
      x1 = x, z1 = z;
    } else {
      const auto& last = rep.iterations.back();
      it.ratio_u = last.u > 0 ? du.value / last.u : 0.0;
      it.ratio_v = last.v > 0 ? dv.value / last.v : 0.0;
    }
    it.envelope = picard_envelope(rep.arity, p, rep.c, prob.T, rep.c_bar, rep.c1, rep.c2);
    rep.iterations.push_back(it);

    // Telescoping of Hukuhara chains from X^0 and X^1 (Minkowski inequality in the L2 norm).
    tele_x += std::sqrt(du.value), tele_z += std::sqrt(dv.value);
    if (p >= 2) tele_x1 += std::sqrt(du.value), tele_z1 += std::sqrt(dv.value);
    const double slack_tol = 1e-9 * (1.0 + tele_x + tele_z);
    double slack = std::min(tele_x - norm_s(x, x0), tele_z - norm_s(z, z0));
    if (p >= 2) slack = std::min({slack, tele_x1 - norm_s(x, x1), tele_z1 - norm_s(z, z1)});
    rep.telescoping_slack = std::min(rep.telescoping_slack, slack);
    if (slack < -slack_tol) rep.telescoping_ok = false;

    std::swap(x, xprev);
    std::swap(z, zprev);
    if (std::max(du.value, dv.value) <= opt.tol * opt.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.y = std::move(xprev);
  rep.z = std::move(zprev);
  if (rep.verdict.empty()) rep.verdict = rep.converged ? "converged" : "not-converged";
  rep.residual = detail::fixed_point_residual(prob, rep.y, rep.z, b, opt);
  rep.martingale_gap = detail::martingale_gap(rep.z, filt);
  return rep;
}

// ---------------------------------------------------------------------------
// Uniqueness probe
// ---------------------------------------------------------------------------

struct UniquenessReport {
  std::vector<std::string> inits;
  std::vector<PicardReport> runs;
  double max_y = 0.0, max_z = 0.0;  // pairwise sup-node RMS distances
  std::string verdict;              // pass | fail | inconclusive
  bool passed() const { return verdict == "pass"; }
};

/// sup over nodes of the RMS over paths of the interval distance; NaN nodes are skipped.
inline double sup_node_rms(const SetPath& a, const SetPath& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.nodes(); ++k) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < a.paths(); ++p) {
      const double d = interval_distance(a(p, k), b(p, k));
      if (std::isnan(d)) continue;
      s += d * d;
      ++n;
    }
    if (n) worst = std::max(worst, std::sqrt(s / static_cast<double>(n)));
  }
  return worst;
}

inline UniquenessReport uniqueness_probe(const SVBSDEProblem& prob, const DiscreteFiltration& filt,
                                         const std::vector<Initialization>& inits, SolverOptions opt = {}, double factor = 2.0) {
  if (inits.size() < 2) throw UsageError("uniqueness probe needs at least two initializations");
  UniquenessReport rep;
  bool all_converged = true;
  for (const auto& init : inits) {
    opt.init = init;
    rep.inits.push_back(init.name());
    rep.runs.push_back(solve_svbsde(prob, filt, opt));
    all_converged = all_converged && rep.runs.back().converged;
  }
  for (std::size_t i = 0; i < rep.runs.size(); ++i)
    for (std::size_t j = i + 1; j < rep.runs.size(); ++j) {
      rep.max_y = std::max(rep.max_y, sup_node_rms(rep.runs[i].y, rep.runs[j].y));
      rep.max_z = std::max(rep.max_z, sup_node_rms(rep.runs[i].z, rep.runs[j].z));
    }
  if (!all_converged)
    rep.verdict = "inconclusive";
  else
    rep.verdict = std::max(rep.max_y, rep.max_z) <= factor * opt.tol ? "pass" : "fail";
  return rep;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_picard_csv(std::ostream& out, const PicardReport& r) {
  out << "iter,u_p,v_p,ratio_u,ratio_v,envelope\n";
  for (const auto& it : r.iterations)
    out << it.iter << ',' << format_double(it.u) << ',' << format_double(it.v) << ',' << format_double(it.ratio_u) << ','
        << format_double(it.ratio_v) << ',' << format_double(it.envelope) << '\n';
}

inline void write_solution_csv(std::ostream& out, const PicardReport& r, std::size_t max_paths = SIZE_MAX) {
  out << "node,path,y_lo,y_hi,z_lo,z_hi\n";
  const std::size_t paths = std::min(max_paths, r.y.paths());
  for (std::size_t k = 0; k < r.y.nodes(); ++k)
    for (std::size_t p = 0; p < paths; ++p)
      out << k << ',' << p << ',' << format_double(r.y(p, k).lo) << ',' << format_double(r.y(p, k).hi) << ','
          << format_double(r.z(p, k).lo) << ',' << format_double(r.z(p, k).hi) << '\n';
}

}  // namespace svito

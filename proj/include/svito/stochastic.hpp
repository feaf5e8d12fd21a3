#pragma once

// Time grids, Brownian bundles and left-point (Ito) / Riemann integration of
// scalar adapted paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "svito/errors.hpp"
#include "svito/parallel.hpp"
#include "svito/random.hpp"

namespace svito {

class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw UsageError("time grid: horizon must be positive and finite");
    if (steps == 0) throw UsageError("time grid: step count must be at least 1");
  }

  double horizon() const noexcept { return horizon_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t nodes() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
  /// t_k = kT/N, with t_N = T exactly.
  double t(std::size_t k) const noexcept {
    return k == steps_ ? horizon_ : horizon_ * static_cast<double>(k) / static_cast<double>(steps_);
  }

  /// Node index of time s, or StructuralError when s is not a grid node.
  std::size_t node_of(double s) const {
    const double x = s / horizon_ * static_cast<double>(steps_);
    const double r = std::round(x);
    if (r < 0 || r > static_cast<double>(steps_) || std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x)))
      throw StructuralError("time " + std::to_string(s) + " is not a grid node");
    return static_cast<std::size_t>(r);
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.horizon_ == b.horizon_ && a.steps_ == b.steps_;
  }

 private:
  double horizon_;
  std::size_t steps_;
};

/// Increments dW[path][step][dim] and running values W[path][node][dim] for a
/// contiguous block of global path indices [first_path, first_path + paths).
class BrownianBundle {
 public:
  BrownianBundle(TimeGrid grid, std::size_t first_path, std::size_t paths, std::size_t dims, std::uint64_t seed)
      : grid_(grid), first_path_(first_path), paths_(paths), dims_(dims), seed_(seed),
        dw_(paths * grid.steps() * dims), w_(paths * grid.nodes() * dims) {}

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t first_path() const noexcept { return first_path_; }
  std::size_t paths() const noexcept { return paths_; }
  std::size_t dims() const noexcept { return dims_; }
  std::size_t steps() const noexcept { return grid_.steps(); }
  std::uint64_t seed() const noexcept { return seed_; }

  double dW(std::size_t p, std::size_t k, std::size_t d = 0) const { return dw_[(p * steps() + k) * dims_ + d]; }
  double W(std::size_t p, std::size_t k, std::size_t d = 0) const { return w_[(p * grid_.nodes() + k) * dims_ + d]; }
  /// W at node k of path p, all dimensions.
  std::span<const double> W_at(std::size_t p, std::size_t k) const {
    return {w_.data() + (p * grid_.nodes() + k) * dims_, dims_};
  }

  /// Replaces one increment and rebuilds the running sums of that path.
  void set_increment(std::size_t p, std::size_t k, std::size_t d, double value) {
    dw_[(p * steps() + k) * dims_ + d] = value;
    rebuild_path(p);
  }

  void rebuild_path(std::size_t p) {
    for (std::size_t d = 0; d < dims_; ++d) {
      double acc = 0.0;
      w_[(p * grid_.nodes()) * dims_ + d] = 0.0;
      for (std::size_t k = 0; k < steps(); ++k) {
        acc += dw_[(p * steps() + k) * dims_ + d];
        w_[(p * grid_.nodes() + k + 1) * dims_ + d] = acc;
      }
    }
  }

  std::vector<double>& raw_increments() noexcept { return dw_; }

 private:
  TimeGrid grid_;
  std::size_t first_path_, paths_, dims_;
  std::uint64_t seed_;
  std::vector<double> dw_, w_;
};

/// Bundle of paths [first_path, first_path + paths); path i depends only on (seed, i).
inline BrownianBundle generate_brownian(const TimeGrid& grid, std::size_t paths, std::size_t dims, std::uint64_t seed,
                                        std::size_t first_path = 0) {
  if (paths == 0) throw UsageError("path count must be at least 1");
  if (dims == 0) throw UsageError("Brownian dimension must be at least 1");
  BrownianBundle bundle(grid, first_path, paths, dims, seed);
  const double scale = std::sqrt(grid.dt());
  auto& dw = bundle.raw_increments();
  parallel_for(paths, [&](std::size_t p) {
    const std::uint64_t stream = first_path + p;
    for (std::size_t k = 0; k < grid.steps(); ++k)
      for (std::size_t d = 0; d < dims; ++d)
        dw[(p * grid.steps() + k) * dims + d] = scale * counter_normal(seed, stream, k * dims + d);
    bundle.rebuild_path(p);
  });
  return bundle;
}

/// Scalar adapted path values x[path][node], node = 0..N.
class ScalarPath {
 public:
  ScalarPath(std::size_t paths, std::size_t nodes, double fill = 0.0) : paths_(paths), nodes_(nodes), x_(paths * nodes, fill) {}

  std::size_t paths() const noexcept { return paths_; }
  std::size_t nodes() const noexcept { return nodes_; }
  double& operator()(std::size_t p, std::size_t k) { return x_[p * nodes_ + k]; }
  double operator()(std::size_t p, std::size_t k) const { return x_[p * nodes_ + k]; }
  std::span<const double> row(std::size_t p) const { return {x_.data() + p * nodes_, nodes_}; }

 private:
  std::size_t paths_, nodes_;
  std::vector<double> x_;
};

/// Path built left to right from rule(t_k, W_{t_k}), so x(t_k) only sees
/// increments before node k.
inline ScalarPath adapted_path(const BrownianBundle& bundle,
                               const std::function<double(double, std::span<const double>)>& rule) {
  const auto& grid = bundle.grid();
  ScalarPath out(bundle.paths(), grid.nodes());
  parallel_for(bundle.paths(), [&](std::size_t p) {
    for (std::size_t k = 0; k < grid.nodes(); ++k) out(p, k) = rule(grid.t(k), bundle.W_at(p, k));
  });
  return out;
}

inline void require_matching(const ScalarPath& phi, const BrownianBundle& bundle) {
  if (phi.paths() != bundle.paths() || phi.nodes() != bundle.grid().nodes())
    throw StructuralError("path values do not match the Brownian bundle's grid or path count");
}

/// sum_{k in [k0, k1)} phi(t_k) dW_k for one path.
inline double ito_sum(std::span<const double> phi, const BrownianBundle& bundle, std::size_t p, std::size_t dim,
                      std::size_t k0, std::size_t k1) {
  double acc = 0.0;
  for (std::size_t k = k0; k < k1; ++k) acc += phi[k] * bundle.dW(p, k, dim);
  return acc;
}

/// sum_{k in [k0, k1)} psi(t_k) dt for one path.
inline double riemann_sum(std::span<const double> psi, double dt, std::size_t k0, std::size_t k1) {
  double acc = 0.0;
  for (std::size_t k = k0; k < k1; ++k) acc += psi[k];
  return acc * dt;
}

/// Left-point Ito integral over [t_{k0}, t_{k1}] per path (whole horizon by default).
inline std::vector<double> ito_integral(const ScalarPath& phi, const BrownianBundle& bundle, std::size_t dim = 0,
                                        std::size_t k0 = 0, std::size_t k1 = static_cast<std::size_t>(-1)) {
  require_matching(phi, bundle);
  if (dim >= bundle.dims()) throw StructuralError("Brownian component out of range");
  k1 = std::min(k1, bundle.steps());
  std::vector<double> out(phi.paths());
  parallel_for(phi.paths(), [&](std::size_t p) { out[p] = ito_sum(phi.row(p), bundle, p, dim, k0, k1); });
  return out;
}

inline std::vector<double> lebesgue_integral(const ScalarPath& psi, const TimeGrid& grid, std::size_t k0 = 0,
                                             std::size_t k1 = static_cast<std::size_t>(-1)) {
  if (psi.nodes() != grid.nodes()) throw StructuralError("path values do not match the time grid");
  k1 = std::min(k1, grid.steps());
  std::vector<double> out(psi.paths());
  for (std::size_t p = 0; p < psi.paths(); ++p) out[p] = riemann_sum(psi.row(p), grid.dt(), k0, k1);
  return out;
}

// ---------------------------------------------------------------------------
// Sample statistics with a fixed summation order.
// ---------------------------------------------------------------------------

struct SampleStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;

  double standard_error() const noexcept { return count ? stddev / std::sqrt(static_cast<double>(count)) : 0.0; }
};

/// Mean and sample standard deviation, two-pass in index order.
inline SampleStats sample_stats(std::span<const double> x) {
  SampleStats s;
  s.count = x.size();
  if (x.empty()) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  double sq = 0.0;
  for (double v : x) sq += (v - s.mean) * (v - s.mean);
  s.stddev = x.size() > 1 ? std::sqrt(sq / static_cast<double>(x.size() - 1)) : 0.0;
  return s;
}

/// Running sums for chunked statistics (merged in chunk order).
struct MomentAccumulator {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) noexcept {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
  double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }
  double stddev() const noexcept {
    if (count < 2) return 0.0;
    const double n = static_cast<double>(count);
    return std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)));
  }
  double standard_error() const noexcept { return count ? stddev() / std::sqrt(static_cast<double>(count)) : 0.0; }
};

/// Classical isometry E[I^2] = E[int phi^2 dt] for an adapted integrand
/// phi(t, W_t), estimated over M paths generated in chunks.
struct ClassicalIsometry {
  MomentAccumulator ito;         // I
  MomentAccumulator gap;         // I^2 - int phi^2 dt, per path
  MomentAccumulator ito_sq;      // I^2
  MomentAccumulator quadratic;   // int phi^2 dt

  bool passed(double z = 5.0) const {
    return std::abs(gap.mean()) <= z * gap.standard_error() && std::abs(ito.mean()) <= z * ito.standard_error();
  }
};

inline ClassicalIsometry classical_isometry(const TimeGrid& grid, std::size_t paths, std::uint64_t seed,
                                            const std::function<double(double, std::span<const double>)>& phi,
                                            std::size_t chunk = 8192) {
  ClassicalIsometry out;
  for (std::size_t first = 0; first < paths; first += chunk) {
    const std::size_t count = std::min(chunk, paths - first);
    const auto bundle = generate_brownian(grid, count, 1, seed, first);
    const auto values = adapted_path(bundle, phi);
    const auto ito = ito_integral(values, bundle);
    ScalarPath squares(count, grid.nodes());
    for (std::size_t p = 0; p < count; ++p)
      for (std::size_t k = 0; k < grid.nodes(); ++k) squares(p, k) = values(p, k) * values(p, k);
    const auto quad = lebesgue_integral(squares, grid);
    for (std::size_t p = 0; p < count; ++p) {
      out.ito.add(ito[p]);
      out.ito_sq.add(ito[p] * ito[p]);
      out.quadratic.add(quad[p]);
      out.gap.add(ito[p] * ito[p] - quad[p]);
    }
  }
  return out;
}

}  // namespace svito

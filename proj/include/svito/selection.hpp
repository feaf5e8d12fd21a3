#pragma once

// Set-valued processes on a time grid and finite adapted selection families.
//
// A family is a list of single-valued processes phi_j with phi_j(t_k, path) in
// F(t_k, path). Selection j depends only on (seed, j), so the family for K is
// a prefix of the family for any K' > K and hulls grow monotonically in K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svito/convex_set.hpp"
#include "svito/stochastic.hpp"
#include "svito/text.hpp"

namespace svito {

class SetValuedProcess {
 public:
  using Rule = std::function<ConvexSet(double, std::span<const double>)>;

  static SetValuedProcess constant(ConvexSet value) {
    SetValuedProcess f(value, Variation::Constant);
    f.rule_ = [value](double, std::span<const double>) { return value; };
    return f;
  }
  static SetValuedProcess deterministic(std::function<ConvexSet(double)> fn, ConvexSet prototype) {
    SetValuedProcess f(std::move(prototype), Variation::Deterministic);
    f.rule_ = [fn = std::move(fn)](double t, std::span<const double>) { return fn(t); };
    return f;
  }
  /// F(t_k, path) = rule(t_k, W_{t_k}(path)).
  static SetValuedProcess state_dependent(Rule rule, ConvexSet prototype) {
    SetValuedProcess f(std::move(prototype), Variation::State);
    f.rule_ = std::move(rule);
    return f;
  }

  /// Nodewise Minkowski sum.
  friend SetValuedProcess operator+(const SetValuedProcess& a, const SetValuedProcess& b) {
    require_compatible(a.prototype_, b.prototype_, "process sum");
    SetValuedProcess f(minkowski_sum(a.prototype_, b.prototype_), std::max(a.variation_, b.variation_));
    f.rule_ = [ra = a.rule_, rb = b.rule_](double t, std::span<const double> w) { return minkowski_sum(ra(t, w), rb(t, w)); };
    return f;
  }

  ConvexSet at(double t, std::span<const double> w) const {
    ConvexSet out = rule_(t, w);
    if (variation_ != Variation::Constant) require_compatible(prototype_, out, "set-valued process");
    return out;
  }

  const ConvexSet& prototype() const noexcept { return prototype_; }
  std::size_t dim() const noexcept { return prototype_.dim(); }
  bool is_constant() const noexcept { return variation_ == Variation::Constant; }
  bool is_deterministic() const noexcept { return variation_ != Variation::State; }

 private:
  enum class Variation { Constant = 0, Deterministic = 1, State = 2 };
  SetValuedProcess(ConvexSet prototype, Variation v) : prototype_(std::move(prototype)), variation_(v) {}

  ConvexSet prototype_;
  Variation variation_;
  Rule rule_;
};

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

enum class Recipe { Extreme, Support, Mix };

inline const char* to_string(Recipe r) {
  switch (r) {
    case Recipe::Extreme: return "extreme";
    case Recipe::Support: return "support";
    case Recipe::Mix: return "mix";
  }
  return "?";
}

inline Recipe parse_recipe(std::string_view name) {
  if (name == "extreme") return Recipe::Extreme;
  if (name == "support") return Recipe::Support;
  if (name == "mix") return Recipe::Mix;
  throw UsageError("unknown recipe '" + std::string(name) + "' (expected extreme, support or mix)");
}

/// Number of fixed base selections a recipe needs for this carrier.
inline std::size_t minimal_selection_count(const ConvexSet& prototype, Recipe recipe) {
  switch (prototype.kind()) {
    case SetKind::Interval: return 2;
    case SetKind::Box: {
      const std::size_t n = prototype.dim();
      if (recipe == Recipe::Extreme) return std::size_t{1} << n;
      if (recipe == Recipe::Support) return 2 * n;
      return 2;
    }
    case SetKind::SupportSampled: return prototype.as_support().grid->size();
  }
  return 2;
}

inline constexpr std::size_t kDefaultSelectionsExact = 2;
inline constexpr std::size_t kDefaultSelections = 32;

/// Default K: both endpoints suffice for deterministic interval integrands.
inline std::size_t default_selection_count(const SetValuedProcess& f) {
  if (f.prototype().kind() == SetKind::Interval && f.is_deterministic()) return kDefaultSelectionsExact;
  return kDefaultSelections;
}

namespace detail {

/// Coefficients of an adapted switching/mixing rule lambda(t, W) in [0, 1].
struct MixRule {
  double a = 0, b = 0, c = 0;

  static MixRule make(std::uint64_t seed, std::uint64_t selection, std::uint64_t coord, double horizon) {
    const std::uint64_t stream = hash_words(0x5e1ec7ULL + selection, coord);
    const double u1 = counter_uniform(seed, stream, 0), u2 = counter_uniform(seed, stream, 1),
                 u3 = counter_uniform(seed, stream, 2);
    return {(6.0 * u1 - 3.0) / std::sqrt(horizon), (4.0 * u2 - 2.0) / horizon, 2.0 * u3 - 1.0};
  }
  double weight(Recipe recipe, double t, double w) const {
    const double s = a * w + b * t + c;
    if (recipe == Recipe::Extreme) return s > 0 ? 1.0 : 0.0;
    return 0.5 + 0.5 * std::tanh(2.0 * s);
  }
};

}  // namespace detail

/// Evaluates selection j of a family at one node, given the set F(t, path).
/// Writes dim() coordinates into `out`.
class SelectionRule {
 public:
  SelectionRule(const ConvexSet& prototype, Recipe recipe, std::uint64_t seed, double horizon)
      : kind_(prototype.kind()), dim_(prototype.dim()), recipe_(recipe), seed_(seed), horizon_(horizon),
        base_(minimal_selection_count(prototype, recipe)) {}

  /// Precomputes the mixing rules of selections [0, count) for hot loops.
  void prepare(std::size_t count) {
    cache_.clear();
    cache_count_ = count;
    for (std::size_t j = 0; j < count; ++j)
      for (std::size_t i = 0; i < dim_; ++i) cache_.push_back(detail::MixRule::make(seed_, j, i, horizon_));
  }

  std::size_t base_count() const noexcept { return base_; }
  std::size_t dim() const noexcept { return dim_; }
  Recipe recipe() const noexcept { return recipe_; }

  /// lambda of selection j (j >= 2) for interval carriers: value = lo + lambda (hi - lo).
  double interval_weight(std::size_t j, double t, double w) const {
    if (j == 0) return 0.0;
    if (j == 1) return 1.0;
    return rule(j, 0).weight(recipe_, t, w);
  }

  void evaluate(std::size_t j, const ConvexSet& set, double t, std::span<const double> w, std::span<double> out) const {
    switch (kind_) {
      case SetKind::Interval: {
        const auto& iv = set.as_interval();
        const double lambda = interval_weight(j, t, w.empty() ? 0.0 : w[0]);
        out[0] = lambda == 1.0 ? iv.hi : iv.lo + lambda * (iv.hi - iv.lo);
        return;
      }
      case SetKind::Box: {
        const auto& b = set.as_box();
        if (j < base_) {
          box_base(j, b, out);
          return;
        }
        for (std::size_t i = 0; i < dim_; ++i) {
          const double wi = w.empty() ? 0.0 : w[i % w.size()];
          const double lambda = rule(j, i).weight(recipe_, t, wi);
          out[i] = lambda == 1.0 ? b.hi[i] : b.lo[i] + lambda * (b.hi[i] - b.lo[i]);
        }
        return;
      }
      case SetKind::SupportSampled: {
        const auto v = set.vertices();
        const std::size_t nv = v.size() / dim_;
        const auto& s = set.as_support();
        auto exposed = [&](std::size_t dir) {
          const auto d = s.grid->direction(dir);
          std::size_t best = 0;
          double best_dot = -INFINITY;
          for (std::size_t q = 0; q < nv; ++q) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) dot += v[q * dim_ + i] * d[i];
            if (dot > best_dot) {
              best_dot = dot;
              best = q;
            }
          }
          return best;
        };
        if (j < base_) {
          const std::size_t q = exposed(j);
          for (std::size_t i = 0; i < dim_; ++i) out[i] = v[q * dim_ + i];
          return;
        }
        // Mixture of two exposed points; both endpoints are in the set, so is the mix.
        const std::uint64_t pick = hash_words(seed_ ^ 0xd1ec7ULL, j);
        const std::size_t qa = exposed(pick % base_), qb = exposed((pick / base_) % base_);
        const double lambda = rule(j, 0).weight(recipe_, t, w.empty() ? 0.0 : w[0]);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = v[qa * dim_ + i] + lambda * (v[qb * dim_ + i] - v[qa * dim_ + i]);
        return;
      }
    }
  }

 private:
  detail::MixRule rule(std::size_t j, std::size_t coord) const {
    if (j < cache_count_) return cache_[j * dim_ + coord];
    return detail::MixRule::make(seed_, j, coord, horizon_);
  }

  void box_base(std::size_t j, const Box& b, std::span<double> out) const {
    if (recipe_ == Recipe::Extreme) {
      for (std::size_t i = 0; i < dim_; ++i) out[i] = (j >> i) & 1U ? b.hi[i] : b.lo[i];
    } else if (recipe_ == Recipe::Support) {
      // Face centres: support points for +e_i (j = 2i) and -e_i (j = 2i + 1).
      for (std::size_t i = 0; i < dim_; ++i) out[i] = 0.5 * (b.lo[i] + b.hi[i]);
      const std::size_t axis = j / 2;
      out[axis] = j % 2 == 0 ? b.hi[axis] : b.lo[axis];
    } else {
      for (std::size_t i = 0; i < dim_; ++i) out[i] = j == 0 ? b.lo[i] : b.hi[i];
    }
  }

  SetKind kind_;
  std::size_t dim_;
  Recipe recipe_;
  std::uint64_t seed_;
  double horizon_;
  std::size_t base_;
  std::vector<detail::MixRule> cache_;
  std::size_t cache_count_ = 0;
};

/// K selections materialized over a bundle: values[sel][path][node][coord].
class SelectionFamily {
 public:
  SelectionFamily(std::size_t count, std::size_t dim, std::size_t paths, std::size_t nodes, Recipe recipe, std::uint64_t seed)
      : count_(count), dim_(dim), paths_(paths), nodes_(nodes), recipe_(recipe), seed_(seed),
        values_(count * paths * nodes * dim) {}

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t paths() const noexcept { return paths_; }
  std::size_t nodes() const noexcept { return nodes_; }
  Recipe recipe() const noexcept { return recipe_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double value(std::size_t j, std::size_t p, std::size_t k, std::size_t i = 0) const {
    return values_[((j * paths_ + p) * nodes_ + k) * dim_ + i];
  }
  std::span<double> slot(std::size_t j, std::size_t p, std::size_t k) {
    return {values_.data() + ((j * paths_ + p) * nodes_ + k) * dim_, dim_};
  }
  std::span<const double> slot(std::size_t j, std::size_t p, std::size_t k) const {
    return {values_.data() + ((j * paths_ + p) * nodes_ + k) * dim_, dim_};
  }

 private:
  std::size_t count_, dim_, paths_, nodes_;
  Recipe recipe_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

inline SelectionFamily build_selections(const SetValuedProcess& f, const BrownianBundle& bundle, std::size_t count,
                                        Recipe recipe, std::uint64_t seed) {
  const std::size_t minimum = minimal_selection_count(f.prototype(), recipe);
  if (count < minimum)
    throw UsageError("selection count " + std::to_string(count) + " is below the " + to_string(recipe) + " recipe minimum " +
                     std::to_string(minimum) + " for this carrier");
  const auto& grid = bundle.grid();
  SelectionRule rule(f.prototype(), recipe, seed, grid.horizon());
  rule.prepare(count);
  SelectionFamily family(count, f.dim(), bundle.paths(), grid.nodes(), recipe, seed);
  const bool shared = f.is_deterministic();
  std::vector<ConvexSet> node_sets;
  if (shared) {
    const std::vector<double> origin(bundle.dims(), 0.0);
    for (std::size_t k = 0; k < grid.nodes(); ++k) node_sets.push_back(f.at(grid.t(k), origin));
  }
  parallel_for(bundle.paths(), [&](std::size_t p) {
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      const auto w = bundle.W_at(p, k);
      const ConvexSet set = shared ? node_sets[k] : f.at(grid.t(k), w);
      for (std::size_t j = 0; j < count; ++j) rule.evaluate(j, set, grid.t(k), w, family.slot(j, p, k));
    }
  });
  return family;
}

enum class IntegralKind { Dt, DW };

inline const char* to_string(IntegralKind kind) { return kind == IntegralKind::Dt ? "dt" : "dW"; }

/// Brownian component driving coordinate i: W_i when m = n, the single W when m = 1.
inline std::size_t driving_component(std::size_t coord, std::size_t set_dim, std::size_t brownian_dims) {
  if (brownian_dims == set_dim) return coord;
  if (brownian_dims == 1) return 0;
  throw StructuralError("dW integrals need Brownian dimension 1 or equal to the set dimension");
}

/// Integrals of every selection over node window [k0, k1): out[sel][path][coord].
inline std::vector<double> selection_integrals(const SelectionFamily& family, const BrownianBundle& bundle, IntegralKind kind,
                                               std::size_t k0 = 0, std::size_t k1 = static_cast<std::size_t>(-1)) {
  const auto& grid = bundle.grid();
  if (family.paths() != bundle.paths() || family.nodes() != grid.nodes())
    throw StructuralError("selection family does not match the Brownian bundle");
  k1 = std::min(k1, grid.steps());
  if (k0 > k1) throw StructuralError("integration window is reversed");
  const std::size_t n = family.dim(), paths = family.paths();
  std::vector<double> out(family.count() * paths * n, 0.0);
  const double dt = grid.dt();
  parallel_for(paths, [&](std::size_t p) {
    for (std::size_t j = 0; j < family.count(); ++j)
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        if (kind == IntegralKind::Dt) {
          for (std::size_t k = k0; k < k1; ++k) acc += family.value(j, p, k, i);
          acc *= dt;
        } else {
          const std::size_t c = driving_component(i, n, bundle.dims());
          for (std::size_t k = k0; k < k1; ++k) acc += family.value(j, p, k, i) * bundle.dW(p, k, c);
        }
        out[(j * paths + p) * n + i] = acc;
      }
  });
  return out;
}

/// Membership audit rows `selection,step,path,value,member?`; returns the number
/// of violations. Vector values are written as `;`-separated coordinates.
inline std::size_t audit_membership(const SetValuedProcess& f, const SelectionFamily& family, const BrownianBundle& bundle,
                                    double tol, std::ostream* csv = nullptr) {
  const auto& grid = bundle.grid();
  if (csv) *csv << "selection,step,path,value,member?\n";
  std::size_t violations = 0;
  for (std::size_t j = 0; j < family.count(); ++j)
    for (std::size_t k = 0; k < grid.nodes(); ++k)
      for (std::size_t p = 0; p < family.paths(); ++p) {
        const ConvexSet set = f.at(grid.t(k), bundle.W_at(p, k));
        const auto x = family.slot(j, p, k);
        const bool member = contains_point(set, x, tol);
        if (!member) ++violations;
        if (csv) {
          *csv << j << ',' << k << ',' << (bundle.first_path() + p) << ',';
          for (std::size_t i = 0; i < x.size(); ++i) *csv << (i ? ";" : "") << format_double(x[i]);
          *csv << ',' << (member ? "true" : "false") << '\n';
        }
      }
  return violations;
}

}  // namespace svito

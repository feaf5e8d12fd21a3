#pragma once

// Compact convex sets in R^n and their Minkowski/Hukuhara algebra.
//
// Three carriers: closed intervals, axis-aligned boxes, and polytopes given by
// support values on a fixed direction grid. Intervals and boxes are exact for
// every operation here; support-sampled sets are exact relative to their grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "svito/errors.hpp"
#include "svito/text.hpp"

namespace svito {

inline constexpr double kExistenceTol = 1e-9;

// ---------------------------------------------------------------------------
// Direction grids
// ---------------------------------------------------------------------------

class DirectionGrid {
 public:
  DirectionGrid(std::size_t dim, std::vector<double> flat) : dim_(dim), dirs_(std::move(flat)) {
    if (dim_ == 0 || dim_ > 2)
      throw UnsupportedOperation("support-sampled sets are implemented for n = 1 and n = 2 only");
    if (dirs_.empty() || dirs_.size() % dim_ != 0)
      throw StructuralError("direction grid: coordinate count is not a multiple of the dimension");
    for (std::size_t j = 0; j < size(); ++j) {
      double norm = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) norm += dirs_[j * dim_ + i] * dirs_[j * dim_ + i];
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) throw StructuralError("direction grid: zero direction");
      for (std::size_t i = 0; i < dim_; ++i) dirs_[j * dim_ + i] /= norm;
    }
    opposite_.assign(size(), npos);
    for (std::size_t j = 0; j < size(); ++j)
      for (std::size_t k = 0; k < size(); ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += dirs_[j * dim_ + i] * dirs_[k * dim_ + i];
        if (dot < -1.0 + 1e-12) {
          opposite_[j] = k;
          break;
        }
      }
    if (!positively_spanning())
      throw StructuralError("direction grid does not positively span R^n; polytopes would be unbounded");
  }

  /// m equally spaced unit vectors on the circle, starting at (1, 0).
  static std::shared_ptr<const DirectionGrid> uniform_circle(std::size_t count) {
    std::vector<double> flat;
    flat.reserve(2 * count);
    for (std::size_t j = 0; j < count; ++j) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
      flat.push_back(std::cos(angle));
      flat.push_back(std::sin(angle));
    }
    return std::make_shared<const DirectionGrid>(2, std::move(flat));
  }

  static std::shared_ptr<const DirectionGrid> line() {
    return std::make_shared<const DirectionGrid>(1, std::vector<double>{1.0, -1.0});
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dirs_.size() / dim_; }
  std::span<const double> direction(std::size_t j) const { return {dirs_.data() + j * dim_, dim_}; }

  std::optional<std::size_t> opposite(std::size_t j) const {
    if (opposite_[j] == npos) return std::nullopt;
    return opposite_[j];
  }
  bool symmetric() const {
    return std::none_of(opposite_.begin(), opposite_.end(), [](std::size_t k) { return k == npos; });
  }

  friend bool operator==(const DirectionGrid& a, const DirectionGrid& b) {
    return a.dim_ == b.dim_ && a.dirs_ == b.dirs_;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool positively_spanning() const {
    if (dim_ == 1) {
      bool pos = false, neg = false;
      for (double d : dirs_) (d > 0 ? pos : neg) = true;
      return pos && neg;
    }
    std::vector<double> angles;
    for (std::size_t j = 0; j < size(); ++j) angles.push_back(std::atan2(dirs_[2 * j + 1], dirs_[2 * j]));
    std::sort(angles.begin(), angles.end());
    double max_gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t j = 1; j < angles.size(); ++j) max_gap = std::max(max_gap, angles[j] - angles[j - 1]);
    return max_gap < std::numbers::pi - 1e-12;
  }

  std::size_t dim_;
  std::vector<double> dirs_;
  std::vector<std::size_t> opposite_;
};

using GridPtr = std::shared_ptr<const DirectionGrid>;

// ---------------------------------------------------------------------------
// Carriers
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  double radius() const noexcept { return 0.5 * (hi - lo); }
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct SupportSampled {
  GridPtr grid;
  std::vector<double> h;
};

enum class SetKind { Interval, Box, SupportSampled };

inline const char* to_string(SetKind kind) {
  switch (kind) {
    case SetKind::Interval: return "interval";
    case SetKind::Box: return "box";
    case SetKind::SupportSampled: return "support-sampled";
  }
  return "?";
}

namespace detail {

using Point2 = std::array<double, 2>;

/// Vertices of {x : <x, d_j> <= h_j} for a 2-D grid, by successive half-plane
/// clipping of a bounding square. Empty when infeasible beyond `slack`.
inline std::vector<Point2> clip_polygon(const DirectionGrid& grid, std::span<const double> h, double slack) {
  double reach = 1.0;
  for (double v : h) reach += std::abs(v);
  reach *= 4.0;
  std::vector<Point2> poly{{-reach, -reach}, {reach, -reach}, {reach, reach}, {-reach, reach}};
  std::vector<Point2> next;
  for (std::size_t j = 0; j < grid.size() && !poly.empty(); ++j) {
    const auto d = grid.direction(j);
    const double bound = h[j] + slack;
    auto value = [&](const Point2& p) { return p[0] * d[0] + p[1] * d[1] - bound; };
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2& cur = poly[i];
      const Point2& nxt = poly[(i + 1) % poly.size()];
      const double vc = value(cur), vn = value(nxt);
      if (vc <= 0.0) next.push_back(cur);
      if ((vc <= 0.0) != (vn <= 0.0)) {
        const double s = vc / (vc - vn);
        next.push_back({cur[0] + s * (nxt[0] - cur[0]), cur[1] + s * (nxt[1] - cur[1])});
      }
    }
    poly.swap(next);
  }
  return poly;
}

/// Vertices (flat, dim-strided) of the polytope cut out by support values.
inline std::optional<std::vector<double>> polytope_vertices(const DirectionGrid& grid, std::span<const double> h) {
  double scale = 1.0;
  for (double v : h) scale = std::max(scale, std::abs(v));
  const double slack = 1e-12 * scale;
  if (grid.dim() == 1) {
    double lo = -INFINITY, hi = INFINITY;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double d = grid.direction(j)[0];
      if (d > 0) hi = std::min(hi, h[j] / d);
      else lo = std::max(lo, h[j] / d);
    }
    if (lo > hi + slack) return std::nullopt;
    if (lo > hi) lo = hi = 0.5 * (lo + hi);
    return std::vector<double>{lo, hi};
  }
  auto poly = clip_polygon(grid, h, slack);
  if (poly.empty()) return std::nullopt;
  std::vector<double> flat;
  flat.reserve(2 * poly.size());
  for (const auto& p : poly) {
    flat.push_back(p[0]);
    flat.push_back(p[1]);
  }
  return flat;
}

inline std::vector<double> support_of_vertices(const DirectionGrid& grid, std::span<const double> vertices) {
  const std::size_t n = grid.dim();
  std::vector<double> h(grid.size(), -INFINITY);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto d = grid.direction(j);
    for (std::size_t v = 0; v * n < vertices.size(); ++v) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += vertices[v * n + i] * d[i];
      h[j] = std::max(h[j], dot);
    }
  }
  return h;
}

inline double clean_zero(double x) noexcept { return x + 0.0; }

}  // namespace detail

class ConvexSet {
 public:
  using Rep = std::variant<Interval, Box, SupportSampled>;

  static ConvexSet interval(double lo, double hi) {
    if (!(lo <= hi)) throw StructuralError("interval requires lo <= hi, got [" + format_double(lo) + "," + format_double(hi) + "]");
    return ConvexSet(Interval{detail::clean_zero(lo), detail::clean_zero(hi)});
  }
  static ConvexSet point(double x) { return interval(x, x); }

  static ConvexSet box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.empty() || lo.size() != hi.size()) throw StructuralError("box requires matching, nonempty lo/hi vectors");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) throw StructuralError("box requires lo <= hi in every coordinate");
      lo[i] = detail::clean_zero(lo[i]);
      hi[i] = detail::clean_zero(hi[i]);
    }
    return ConvexSet(Box{std::move(lo), std::move(hi)});
  }
  static ConvexSet box_point(std::vector<double> c) {
    auto copy = c;
    return box(std::move(c), std::move(copy));
  }

  /// Support values are tightened to the support function of the polytope they
  /// cut out, so equal sets have equal representations.
  static ConvexSet support(GridPtr grid, std::vector<double> h) {
    if (!grid) throw StructuralError("support-sampled set needs a direction grid");
    if (h.size() != grid->size()) throw StructuralError("support-sampled set: value count differs from grid size");
    auto vertices = detail::polytope_vertices(*grid, h);
    if (!vertices) throw StructuralError("support values define an empty polytope");
    // Clipping tolerates a tiny slack; never loosen a constraint because of it.
    auto tight = detail::support_of_vertices(*grid, *vertices);
    for (std::size_t j = 0; j < tight.size(); ++j) tight[j] = detail::clean_zero(std::min(tight[j], h[j]));
    return ConvexSet(SupportSampled{std::move(grid), std::move(tight)});
  }

  static ConvexSet support_of_points(GridPtr grid, std::span<const double> points) {
    if (!grid) throw StructuralError("support-sampled set needs a direction grid");
    if (points.empty() || points.size() % grid->dim() != 0) throw StructuralError("point list does not match grid dimension");
    auto h = detail::support_of_vertices(*grid, points);
    for (auto& v : h) v = detail::clean_zero(v);
    return ConvexSet(SupportSampled{std::move(grid), std::move(h)});
  }

  /// {0} in the same carrier as `like`.
  static ConvexSet zero_like(const ConvexSet& like) {
    switch (like.kind()) {
      case SetKind::Interval: return point(0.0);
      case SetKind::Box: return box_point(std::vector<double>(like.dim(), 0.0));
      case SetKind::SupportSampled: {
        const auto& s = std::get<SupportSampled>(like.rep_);
        return ConvexSet(SupportSampled{s.grid, std::vector<double>(s.grid->size(), 0.0)});
      }
    }
    throw StructuralError("unknown carrier");
  }

  SetKind kind() const noexcept { return static_cast<SetKind>(rep_.index()); }
  std::size_t dim() const noexcept {
    switch (kind()) {
      case SetKind::Interval: return 1;
      case SetKind::Box: return std::get<Box>(rep_).lo.size();
      case SetKind::SupportSampled: return std::get<SupportSampled>(rep_).grid->dim();
    }
    return 0;
  }

  const Rep& rep() const noexcept { return rep_; }
  const Interval& as_interval() const {
    if (auto* p = std::get_if<Interval>(&rep_)) return *p;
    throw StructuralError(std::string("expected an interval, got a ") + to_string(kind()));
  }
  const Box& as_box() const {
    if (auto* p = std::get_if<Box>(&rep_)) return *p;
    throw StructuralError(std::string("expected a box, got a ") + to_string(kind()));
  }
  const SupportSampled& as_support() const {
    if (auto* p = std::get_if<SupportSampled>(&rep_)) return *p;
    throw StructuralError(std::string("expected a support-sampled set, got a ") + to_string(kind()));
  }

  /// Extreme points, flat and dim-strided. Boxes list all 2^n corners.
  std::vector<double> vertices() const {
    switch (kind()) {
      case SetKind::Interval: {
        const auto& iv = std::get<Interval>(rep_);
        return {iv.lo, iv.hi};
      }
      case SetKind::Box: {
        const auto& b = std::get<Box>(rep_);
        const std::size_t n = b.lo.size();
        std::vector<double> out;
        out.reserve(n << n);
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask)
          for (std::size_t i = 0; i < n; ++i) out.push_back((mask >> i) & 1U ? b.hi[i] : b.lo[i]);
        return out;
      }
      case SetKind::SupportSampled: {
        const auto& s = std::get<SupportSampled>(rep_);
        return *detail::polytope_vertices(*s.grid, s.h);
      }
    }
    return {};
  }

  /// h_A(d) = sup_{a in A} <a, d>.
  double support_value(std::span<const double> d) const {
    if (d.size() != dim()) throw StructuralError("support_value: direction dimension mismatch");
    switch (kind()) {
      case SetKind::Interval: {
        const auto& iv = std::get<Interval>(rep_);
        return std::max(iv.lo * d[0], iv.hi * d[0]);
      }
      case SetKind::Box: {
        const auto& b = std::get<Box>(rep_);
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) s += std::max(b.lo[i] * d[i], b.hi[i] * d[i]);
        return s;
      }
      case SetKind::SupportSampled: {
        const auto v = vertices();
        double best = -INFINITY;
        for (std::size_t k = 0; k * d.size() < v.size(); ++k) {
          double dot = 0.0;
          for (std::size_t i = 0; i < d.size(); ++i) dot += v[k * d.size() + i] * d[i];
          best = std::max(best, dot);
        }
        return best;
      }
    }
    return 0.0;
  }

  friend bool operator==(const ConvexSet& a, const ConvexSet& b) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case SetKind::Interval: {
        const auto &x = std::get<Interval>(a.rep_), &y = std::get<Interval>(b.rep_);
        return x.lo == y.lo && x.hi == y.hi;
      }
      case SetKind::Box: {
        const auto &x = std::get<Box>(a.rep_), &y = std::get<Box>(b.rep_);
        return x.lo == y.lo && x.hi == y.hi;
      }
      case SetKind::SupportSampled: {
        const auto &x = std::get<SupportSampled>(a.rep_), &y = std::get<SupportSampled>(b.rep_);
        return *x.grid == *y.grid && x.h == y.h;
      }
    }
    return false;
  }

 private:
  explicit ConvexSet(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// ---------------------------------------------------------------------------
// Structural compatibility
// ---------------------------------------------------------------------------

inline void require_compatible(const ConvexSet& a, const ConvexSet& b, const char* op) {
  if (a.kind() != b.kind())
    throw StructuralError(std::string(op) + ": carrier mismatch (" + to_string(a.kind()) + " vs " + to_string(b.kind()) + ")");
  if (a.dim() != b.dim())
    throw StructuralError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
  if (a.kind() == SetKind::SupportSampled) {
    const auto &ga = a.as_support().grid, &gb = b.as_support().grid;
    if (ga != gb && !(*ga == *gb)) throw StructuralError(std::string(op) + ": direction grids differ");
  }
}

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

inline ConvexSet minkowski_sum(const ConvexSet& a, const ConvexSet& b) {
  require_compatible(a, b, "minkowski_sum");
  switch (a.kind()) {
    case SetKind::Interval: {
      const auto &x = a.as_interval(), &y = b.as_interval();
      return ConvexSet::interval(x.lo + y.lo, x.hi + y.hi);
    }
    case SetKind::Box: {
      const auto &x = a.as_box(), &y = b.as_box();
      std::vector<double> lo(x.lo.size()), hi(x.lo.size());
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = x.lo[i] + y.lo[i];
        hi[i] = x.hi[i] + y.hi[i];
      }
      return ConvexSet::box(std::move(lo), std::move(hi));
    }
    case SetKind::SupportSampled: {
      const auto &x = a.as_support(), &y = b.as_support();
      std::vector<double> h(x.h.size());
      for (std::size_t j = 0; j < h.size(); ++j) h[j] = x.h[j] + y.h[j];
      // Sums of tight support values are tight.
      return ConvexSet::support(x.grid, std::move(h));
    }
  }
  throw StructuralError("minkowski_sum: unknown carrier");
}

inline ConvexSet scalar_mul(double alpha, const ConvexSet& a) {
  switch (a.kind()) {
    case SetKind::Interval: {
      const auto& x = a.as_interval();
      return alpha >= 0 ? ConvexSet::interval(alpha * x.lo, alpha * x.hi) : ConvexSet::interval(alpha * x.hi, alpha * x.lo);
    }
    case SetKind::Box: {
      const auto& x = a.as_box();
      std::vector<double> lo(x.lo.size()), hi(x.lo.size());
      for (std::size_t i = 0; i < lo.size(); ++i) {
        lo[i] = alpha >= 0 ? alpha * x.lo[i] : alpha * x.hi[i];
        hi[i] = alpha >= 0 ? alpha * x.hi[i] : alpha * x.lo[i];
      }
      return ConvexSet::box(std::move(lo), std::move(hi));
    }
    case SetKind::SupportSampled: {
      const auto& x = a.as_support();
      std::vector<double> h(x.h.size());
      if (alpha >= 0) {
        for (std::size_t j = 0; j < h.size(); ++j) h[j] = alpha * x.h[j];
      } else {
        if (!x.grid->symmetric())
          throw UnsupportedOperation("scalar_mul: negative factor needs a symmetric direction grid");
        for (std::size_t j = 0; j < h.size(); ++j) h[j] = -alpha * x.h[*x.grid->opposite(j)];
      }
      return ConvexSet::support(x.grid, std::move(h));
    }
  }
  throw StructuralError("scalar_mul: unknown carrier");
}

/// Directed distance sup_{a in A} dist(a, B) = max(0, sup_{|d|=1} h_A(d) - h_B(d)).
inline double excess(const ConvexSet& a, const ConvexSet& b) {
  require_compatible(a, b, "excess");
  switch (a.kind()) {
    case SetKind::Interval: {
      const auto &x = a.as_interval(), &y = b.as_interval();
      return std::max({0.0, y.lo - x.lo, x.hi - y.hi});
    }
    case SetKind::Box: {
      // Per coordinate the best gain along |d_i| = r_i is r_i * max(hi gap, lo gap);
      // maximizing over the unit sphere gives the 2-norm of the positive parts.
      const auto &x = a.as_box(), &y = b.as_box();
      double sq = 0.0;
      for (std::size_t i = 0; i < x.lo.size(); ++i) {
        const double gain = std::max(x.hi[i] - y.hi[i], y.lo[i] - x.lo[i]);
        if (gain > 0) sq += gain * gain;
      }
      return std::sqrt(sq);
    }
    case SetKind::SupportSampled: {
      const auto &x = a.as_support(), &y = b.as_support();
      double best = 0.0;
      for (std::size_t j = 0; j < x.h.size(); ++j) best = std::max(best, x.h[j] - y.h[j]);
      return best;
    }
  }
  return 0.0;
}

/// Hausdorff distance. Exact for intervals and boxes; grid-relative
/// (max_j |h_A[j] - h_B[j]|) for support-sampled sets.
inline double hausdorff_distance(const ConvexSet& a, const ConvexSet& b) {
  return std::max(excess(a, b), excess(b, a));
}

/// ||A|| = sup_{a in A} |a| = h(A, {0}).
inline double set_norm(const ConvexSet& a) {
  switch (a.kind()) {
    case SetKind::Interval: {
      const auto& x = a.as_interval();
      return std::max(std::abs(x.lo), std::abs(x.hi));
    }
    case SetKind::Box: {
      const auto& x = a.as_box();
      double sq = 0.0;
      for (std::size_t i = 0; i < x.lo.size(); ++i) {
        const double m = std::max(std::abs(x.lo[i]), std::abs(x.hi[i]));
        sq += m * m;
      }
      return std::sqrt(sq);
    }
    case SetKind::SupportSampled: {
      double best = 0.0;
      for (double v : a.as_support().h) best = std::max(best, std::abs(v));
      return best;
    }
  }
  return 0.0;
}

/// B subset of A + eps-ball.
inline bool includes(const ConvexSet& a, const ConvexSet& b, double eps) { return excess(b, a) <= eps; }

inline bool contains_point(const ConvexSet& a, std::span<const double> x, double tol) {
  if (x.size() != a.dim()) throw StructuralError("contains_point: dimension mismatch");
  switch (a.kind()) {
    case SetKind::Interval: {
      const auto& iv = a.as_interval();
      return x[0] >= iv.lo - tol && x[0] <= iv.hi + tol;
    }
    case SetKind::Box: {
      const auto& b = a.as_box();
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < b.lo[i] - tol || x[i] > b.hi[i] + tol) return false;
      return true;
    }
    case SetKind::SupportSampled: {
      const auto& s = a.as_support();
      for (std::size_t j = 0; j < s.grid->size(); ++j) {
        const auto d = s.grid->direction(j);
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * d[i];
        if (dot > s.h[j] + tol) return false;
      }
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Hukuhara difference
// ---------------------------------------------------------------------------

/// Why A ⊖ B fails: an extreme point of A that no translate x + B ⊆ A reaches,
/// plus the size of the width or support deficit.
struct HukuharaWitness {
  std::vector<double> extreme_point;
  double deficit = 0.0;
  std::string reason;
};

struct HukuharaResult {
  std::optional<ConvexSet> difference;
  double residual = INFINITY;  // h(B + C, A) for the candidate C
  std::optional<HukuharaWitness> witness;

  bool exists() const noexcept { return difference.has_value(); }
  const ConvexSet& value() const {
    if (!difference) throw DiagnosticFailure("Hukuhara difference does not exist: " + (witness ? witness->reason : std::string{}));
    return *difference;
  }
};

namespace detail {

/// Erosion of [alo, ahi] by [blo, bhi]; widths short by at most tol collapse to
/// the midpoint. Returns nullopt when the width deficit exceeds tol.
inline std::optional<std::pair<double, double>> erode(double alo, double ahi, double blo, double bhi, double tol) {
  double lo = alo - blo, hi = ahi - bhi;
  if (hi < lo) {
    if (lo - hi > tol) return std::nullopt;
    lo = hi = 0.5 * (lo + hi);
  }
  return std::pair{lo, hi};
}

}  // namespace detail

/// A ⊖ B: the erosion {x : x + B ⊆ A}, certified by h(B + E, A) <= tol.
inline HukuharaResult hukuhara_diff(const ConvexSet& a, const ConvexSet& b, double tol = kExistenceTol) {
  require_compatible(a, b, "hukuhara_diff");
  HukuharaResult out;
  auto certify = [&](ConvexSet candidate) {
    out.residual = hausdorff_distance(minkowski_sum(b, candidate), a);
    if (out.residual <= tol) out.difference = std::move(candidate);
  };

  switch (a.kind()) {
    case SetKind::Interval: {
      const auto &x = a.as_interval(), &y = b.as_interval();
      if (auto e = detail::erode(x.lo, x.hi, y.lo, y.hi, tol)) {
        certify(ConvexSet::interval(e->first, e->second));
      }
      if (!out.exists()) {
        out.witness = HukuharaWitness{{x.lo}, y.width() - x.width(), "width(A) < width(B)"};
      }
      return out;
    }
    case SetKind::Box: {
      const auto &x = a.as_box(), &y = b.as_box();
      std::vector<double> lo(x.lo.size()), hi(x.lo.size());
      double worst = 0.0;
      std::size_t worst_axis = 0;
      bool ok = true;
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (auto e = detail::erode(x.lo[i], x.hi[i], y.lo[i], y.hi[i], tol)) {
          lo[i] = e->first;
          hi[i] = e->second;
        } else {
          ok = false;
          const double deficit = (y.hi[i] - y.lo[i]) - (x.hi[i] - x.lo[i]);
          if (deficit > worst) {
            worst = deficit;
            worst_axis = i;
          }
        }
      }
      if (ok) certify(ConvexSet::box(std::move(lo), std::move(hi)));
      if (!out.exists()) {
        out.witness = HukuharaWitness{x.lo, worst, "width(A) < width(B) along axis " + std::to_string(worst_axis)};
      }
      return out;
    }
    case SetKind::SupportSampled: {
      const auto &x = a.as_support(), &y = b.as_support();
      const auto& grid = *x.grid;
      std::vector<double> h(x.h.size());
      for (std::size_t j = 0; j < h.size(); ++j) h[j] = x.h[j] - y.h[j];
      auto vertices = detail::polytope_vertices(grid, h);
      if (!vertices) {
        double deficit = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j)
          if (auto k = grid.opposite(j)) deficit = std::max(deficit, -(h[j] + h[*k]));
        out.witness = HukuharaWitness{a.vertices(), deficit, "candidate erosion is empty"};
        out.witness->extreme_point.resize(grid.dim());
        return out;
      }
      certify(ConvexSet::support(x.grid, h));
      if (!out.exists()) {
        // Report the direction with the largest reconstruction gap and the vertex
        // of A exposed by it.
        const auto candidate = ConvexSet::support(x.grid, h);
        const auto& hc = candidate.as_support().h;
        std::size_t worst = 0;
        double gap = -1.0;
        for (std::size_t j = 0; j < h.size(); ++j) {
          const double g = std::abs(y.h[j] + hc[j] - x.h[j]);
          if (g > gap) {
            gap = g;
            worst = j;
          }
        }
        const auto av = a.vertices();
        const auto d = grid.direction(worst);
        std::size_t best_v = 0;
        double best_dot = -INFINITY;
        for (std::size_t v = 0; v * grid.dim() < av.size(); ++v) {
          double dot = 0.0;
          for (std::size_t i = 0; i < grid.dim(); ++i) dot += av[v * grid.dim() + i] * d[i];
          if (dot > best_dot) {
            best_dot = dot;
            best_v = v;
          }
        }
        std::vector<double> point(av.begin() + static_cast<std::ptrdiff_t>(best_v * grid.dim()),
                                  av.begin() + static_cast<std::ptrdiff_t>((best_v + 1) * grid.dim()));
        out.witness = HukuharaWitness{std::move(point), gap, "B + (A erosion B) misses A along direction " + std::to_string(worst)};
      }
      return out;
    }
  }
  return out;
}

/// c with A = B + {c}, which exists iff both A ⊖ B and B ⊖ A exist.
inline std::optional<std::vector<double>> is_translation(const ConvexSet& a, const ConvexSet& b, double tol = kExistenceTol) {
  const auto forward = hukuhara_diff(a, b, tol);
  if (!forward.exists()) return std::nullopt;
  const auto backward = hukuhara_diff(b, a, tol);
  if (!backward.exists()) return std::nullopt;
  const auto v = forward.value().vertices();
  const std::size_t n = a.dim();
  std::vector<double> c(n, 0.0);
  const std::size_t count = v.size() / n;
  for (std::size_t k = 0; k < count; ++k)
    for (std::size_t i = 0; i < n; ++i) c[i] += v[k * n + i] / static_cast<double>(count);
  for (auto& ci : c) ci = detail::clean_zero(ci);
  return c;
}

// ---------------------------------------------------------------------------
// Images and hulls
// ---------------------------------------------------------------------------

/// {x^2 : x in [lo, hi]}; a sign change maps to 0, not to an endpoint square.
inline Interval square_image(const Interval& x) {
  if (x.lo >= 0) return {x.lo * x.lo, x.hi * x.hi};
  if (x.hi <= 0) return {x.hi * x.hi, x.lo * x.lo};
  return {0.0, std::max(x.lo * x.lo, x.hi * x.hi)};
}

/// Convex hull of points (flat, dim-strided) in the carrier of `like`: the
/// enclosing interval, the axis-aligned bounding box, or grid support values.
inline ConvexSet hull_of_points(const ConvexSet& like, std::span<const double> points) {
  const std::size_t n = like.dim();
  if (points.empty() || points.size() % n != 0) throw StructuralError("hull_of_points: empty or ragged point list");
  switch (like.kind()) {
    case SetKind::Interval: {
      const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
      return ConvexSet::interval(*lo, *hi);
    }
    case SetKind::Box: {
      std::vector<double> lo(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n)), hi = lo;
      for (std::size_t k = 1; k * n < points.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) {
          lo[i] = std::min(lo[i], points[k * n + i]);
          hi[i] = std::max(hi[i], points[k * n + i]);
        }
      return ConvexSet::box(std::move(lo), std::move(hi));
    }
    case SetKind::SupportSampled:
      return ConvexSet::support_of_points(like.as_support().grid, points);
  }
  throw StructuralError("hull_of_points: unknown carrier");
}

// ---------------------------------------------------------------------------
// Literals: "[lo,hi]" for intervals, "[lo1,hi1]x[lo2,hi2]x..." for boxes.
// ---------------------------------------------------------------------------

inline std::string format_set(const ConvexSet& s) {
  auto one = [](double lo, double hi) { return "[" + format_double(lo) + "," + format_double(hi) + "]"; };
  switch (s.kind()) {
    case SetKind::Interval: return one(s.as_interval().lo, s.as_interval().hi);
    case SetKind::Box: {
      const auto& b = s.as_box();
      std::string out;
      for (std::size_t i = 0; i < b.lo.size(); ++i) {
        if (i) out += "x";
        out += one(b.lo[i], b.hi[i]);
      }
      return out;
    }
    case SetKind::SupportSampled: {
      std::string out = "support{";
      const auto& h = s.as_support().h;
      for (std::size_t j = 0; j < h.size(); ++j) out += (j ? "," : "") + format_double(h[j]);
      return out + "}";
    }
  }
  return {};
}

inline ConvexSet parse_set(std::string_view text) {
  text = trim(text);
  std::vector<double> lo, hi;
  std::size_t pos = 0;
  while (true) {
    if (pos >= text.size() || text[pos] != '[') throw UsageError("set literal: expected '[' in '" + std::string(text) + "'");
    const auto close = text.find(']', pos);
    if (close == std::string_view::npos) throw UsageError("set literal: missing ']' in '" + std::string(text) + "'");
    const auto body = text.substr(pos + 1, close - pos - 1);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos)
      throw UsageError("set literal: expected exactly one ',' in '[" + std::string(body) + "]'");
    lo.push_back(parse_double(body.substr(0, comma)));
    hi.push_back(parse_double(body.substr(comma + 1)));
    if (!(lo.back() <= hi.back())) throw UsageError("set literal: lo > hi in '" + std::string(text) + "'");
    pos = close + 1;
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos == text.size()) break;
    if (text[pos] != 'x') throw UsageError("set literal: expected 'x' between factors in '" + std::string(text) + "'");
    ++pos;
    while (pos < text.size() && text[pos] == ' ') ++pos;
  }
  if (lo.size() == 1) return ConvexSet::interval(lo[0], hi[0]);
  return ConvexSet::box(std::move(lo), std::move(hi));
}

}  // namespace svito

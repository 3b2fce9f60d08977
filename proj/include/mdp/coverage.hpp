#pragma once

// Certified coverage decisions and certified maximum-distance intervals.
//
// Both procedures walk a quadtree over the domain's bounding box and rely
// on the distance field x -> dist(x, shape) being 1-Lipschitz: for a cell
// with center c and half-diagonal r, every point of the cell is within
// dist(c, shape) + r of the shape. Cells are discarded only when they are
// certifiably outside the domain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/spanning.hpp"

namespace mdp {

enum class CoverStatus { Covered, Uncovered, Unknown };

inline const char* to_string(CoverStatus s) {
  switch (s) {
    case CoverStatus::Covered: return "covered";
    case CoverStatus::Uncovered: return "uncovered";
    case CoverStatus::Unknown: return "unknown";
  }
  return "unknown";
}

struct CoverageVerdict {
  CoverStatus status = CoverStatus::Unknown;
  /// Present iff status == Uncovered: a point of the domain farther than s
  /// from the shape.
  std::optional<Point2> witness;
  /// Covered: certified lower bound on s - max dist. Uncovered: dist(witness) - s.
  double margin = 0.0;
  double tolerance = 0.0;
  std::size_t cells = 0;

  bool covered() const { return status == CoverStatus::Covered; }
};

struct DistInterval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Closed disk restricting where a certification has to look.
struct Disk {
  Point2 center;
  double radius = 0.0;
};

struct CoverOptions {
  double tolerance = 0.0;             ///< 0 selects 1e-6 x domain diameter
  std::optional<Disk> focus;          ///< only certify the part of E inside this disk
  std::uint64_t cell_budget = 50'000'000;
};

inline double default_tolerance(const Domain& d) {
  const double diam = d.diameter();
  return 1e-6 * (diam > 0.0 ? diam : 1.0);
}

// ---------------------------------------------------------------------------
// Shapes: anything with `double distance(Point2) const`.

template <typename S>
concept DistanceShape = requires(const S& shape, Point2 p) {
  { shape.distance(p) } -> std::convertible_to<double>;
};

class PointSetShape {
 public:
  explicit PointSetShape(std::span<const Point2> points) : points_(points) {
    if (points_.empty()) throw InvalidInput("empty geometry");
  }

  double distance(Point2 p) const {
    double best2 = std::numeric_limits<double>::infinity();
    for (Point2 q : points_) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      best2 = std::min(best2, dx * dx + dy * dy);
    }
    return std::sqrt(best2);
  }

 private:
  std::span<const Point2> points_;
};

class TreeShape {
 public:
  explicit TreeShape(const Tree& tree) : tree_(tree) {
    if (tree_.points.empty()) throw InvalidInput("empty geometry");
  }

  double distance(Point2 p) const { return dist_point_tree(p, tree_); }

 private:
  const Tree& tree_;
};

namespace detail {

struct Cell {
  Box box;
  bool inside = false;  // entirely inside the domain (inherited)
};

inline double half_diagonal(const Box& b) { return 0.5 * b.diagonal(); }

inline double distance_to_box(Point2 p, const Box& b) {
  const double dx = std::max({b.xmin - p.x, 0.0, p.x - b.xmax});
  const double dy = std::max({b.ymin - p.y, 0.0, p.y - b.ymax});
  return std::hypot(dx, dy);
}

// Children in NW, NE, SW, SE order.
inline std::array<Box, 4> split(const Box& b) {
  const Point2 c = b.center();
  return {{
      {b.xmin, c.y, c.x, b.ymax},
      {c.x, c.y, b.xmax, b.ymax},
      {b.xmin, b.ymin, c.x, c.y},
      {c.x, b.ymin, b.xmax, c.y},
  }};
}

enum class CellClass { Outside, Inside, Straddles };

// Conservative: Outside/Inside only when the boundary is certifiably farther
// than the half-diagonal from the center.
inline CellClass classify_cell(const Domain& d, Point2 c, double r, bool& center_in) {
  center_in = point_in_domain(c, d);
  const double bd = d.distance_to_boundary(c);
  if (bd > r * (1.0 + 1e-9)) return center_in ? CellClass::Inside : CellClass::Outside;
  return CellClass::Straddles;
}

// A point of the domain near c on the boundary, if one is found.
inline std::optional<Point2> nearest_boundary_point(const Domain& d, Point2 c) {
  double best = std::numeric_limits<double>::infinity();
  Point2 q{};
  for (const Segment& e : d.edges()) {
    const Point2 cand = closest_point_on_segment(c, e);
    const double dist = distance(c, cand);
    if (dist < best) {
      best = dist;
      q = cand;
    }
  }
  if (point_in_domain(q, d)) return q;
  return std::nullopt;
}

inline void check_arguments(double s, double tol) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("radius s must be positive");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidInput("tolerance must be positive");
}

inline double resolve_tolerance(const Domain& domain, double requested) {
  if (std::isnan(requested) || requested < 0.0) throw InvalidInput("tolerance must be positive");
  return requested > 0.0 ? requested : default_tolerance(domain);
}

}  // namespace detail

/// Decides whether every point of `domain` lies within s of `shape`.
///
/// Covered is a proof (every leaf cell satisfied dist(c) + r <= s or was
/// certifiably outside the domain). Uncovered carries a witness re-checked
/// exactly for domain membership. Unknown means some cell shrank below the
/// tolerance without being resolved. Traversal is depth-first, children in
/// NW, NE, SW, SE order, and the first witness found is returned.
template <DistanceShape Shape>
CoverageVerdict certify_cover(const Domain& domain, const Shape& shape, double s,
                              const CoverOptions& options = {}) {
  const double tol = detail::resolve_tolerance(domain, options.tolerance);
  detail::check_arguments(s, tol);

  CoverageVerdict verdict;
  verdict.tolerance = tol;
  double worst_upper = -std::numeric_limits<double>::infinity();
  bool unresolved = false;

  std::vector<detail::Cell> stack;
  stack.push_back({domain.bounding_box(), false});
  while (!stack.empty()) {
    if (verdict.cells >= options.cell_budget) {
      unresolved = true;
      break;
    }
    const detail::Cell cell = stack.back();
    stack.pop_back();
    ++verdict.cells;
    const Point2 c = cell.box.center();
    const double r = detail::half_diagonal(cell.box);
    if (options.focus &&
        detail::distance_to_box(options.focus->center, cell.box) > options.focus->radius) {
      continue;
    }
    const double dc = shape.distance(c);
    if (dc + r <= s) {
      worst_upper = std::max(worst_upper, dc + r);
      continue;
    }

    bool inside = cell.inside;
    bool center_in = inside;
    if (!inside) {
      const auto cls = detail::classify_cell(domain, c, r, center_in);
      if (cls == detail::CellClass::Outside) continue;
      inside = cls == detail::CellClass::Inside;
    }
    if (center_in && dc > s) {
      verdict.status = CoverStatus::Uncovered;
      verdict.witness = c;
      verdict.margin = dc - s;
      return verdict;
    }
    if (!center_in && dc - r > s) {
      // The whole cell is uncovered; any domain point in it is a witness.
      if (auto q = detail::nearest_boundary_point(domain, c)) {
        const double dq = shape.distance(*q);
        if (dq > s) {
          verdict.status = CoverStatus::Uncovered;
          verdict.witness = *q;
          verdict.margin = dq - s;
          return verdict;
        }
      }
    }
    if (r <= tol) {
      unresolved = true;
      continue;
    }
    const auto children = detail::split(cell.box);
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back({*it, inside});
  }

  if (unresolved) {
    verdict.status = CoverStatus::Unknown;
    verdict.margin = 0.0;
    return verdict;
  }
  verdict.status = CoverStatus::Covered;
  verdict.margin = std::isfinite(worst_upper) ? s - worst_upper : s;
  return verdict;
}

inline CoverageVerdict certify_cover(const Domain& domain, const CenterSet& centers, double s,
                                     const CoverOptions& options = {}) {
  return certify_cover(domain, PointSetShape(centers.points), s, options);
}

/// Certifies at the center set's own radius.
inline CoverageVerdict certify_cover(const Domain& domain, const CenterSet& centers,
                                     const CoverOptions& options = {}) {
  return certify_cover(domain, centers, centers.radius, options);
}

inline CoverageVerdict certify_cover(const Domain& domain, std::span<const Point2> centers,
                                     double s, const CoverOptions& options = {}) {
  return certify_cover(domain, PointSetShape(centers), s, options);
}

inline CoverageVerdict certify_cover(const Domain& domain, const Tree& tree, double s,
                                     const CoverOptions& options = {}) {
  return certify_cover(domain, TreeShape(tree), s, options);
}

/// Coverage of a union of domains: Covered iff every piece is covered.
template <typename Shape>
CoverageVerdict certify_cover_union(std::span<const Domain> pieces, const Shape& shape, double s,
                                    const CoverOptions& options = {}) {
  if (pieces.empty()) throw InvalidInput("empty domain list");
  CoverageVerdict combined;
  combined.status = CoverStatus::Covered;
  combined.margin = std::numeric_limits<double>::infinity();
  for (const Domain& piece : pieces) {
    CoverageVerdict v = certify_cover(piece, shape, s, options);
    combined.cells += v.cells;
    combined.tolerance = v.tolerance;
    if (v.status != CoverStatus::Covered) {
      v.cells = combined.cells;
      return v;
    }
    combined.margin = std::min(combined.margin, v.margin);
  }
  return combined;
}

/// Certified enclosure [lo, hi] of sup over the domain of dist(x, shape),
/// with hi - lo <= tol. Best-first branch and bound on the cell upper bound
/// dist(c) + r; lower bounds come only from points verified to lie in the
/// domain. Throws ToleranceFailure if the cell budget runs out.
template <DistanceShape Shape>
DistInterval max_distance(const Domain& domain, const Shape& shape, double tol,
                          std::uint64_t cell_budget = 50'000'000) {
  detail::check_arguments(1.0, tol);
  double lo = 0.0;
  for (Point2 v : domain.boundary()) lo = std::max(lo, shape.distance(v));
  for (const Ring& h : domain.holes())
    for (Point2 v : h) lo = std::max(lo, shape.distance(v));

  struct Entry {
    double upper;
    std::uint64_t order;
    detail::Cell cell;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.upper != b.upper) return a.upper < b.upper;
    return a.order > b.order;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
  std::uint64_t counter = 0;
  auto push = [&](const Box& box, bool inside) {
    const double ub = shape.distance(box.center()) + detail::half_diagonal(box);
    if (ub > lo) queue.push({ub, counter++, {box, inside}});
  };
  push(domain.bounding_box(), false);

  while (!queue.empty()) {
    const Entry top = queue.top();
    if (top.upper - lo <= tol) return {lo, std::max(lo, top.upper)};
    queue.pop();
    if (counter >= cell_budget)
      throw ToleranceFailure("max_distance: cell budget exhausted before reaching tolerance");
    const Point2 c = top.cell.box.center();
    const double r = detail::half_diagonal(top.cell.box);
    bool inside = top.cell.inside;
    bool center_in = inside;
    if (!inside) {
      const auto cls = detail::classify_cell(domain, c, r, center_in);
      if (cls == detail::CellClass::Outside) continue;
      inside = cls == detail::CellClass::Inside;
      if (!center_in) {
        if (auto q = detail::nearest_boundary_point(domain, c)) {
          if (distance(*q, c) <= r) lo = std::max(lo, shape.distance(*q));
        }
      }
    }
    if (center_in) lo = std::max(lo, shape.distance(c));
    for (const Box& child : detail::split(top.cell.box)) push(child, inside);
  }
  return {lo, lo};
}

inline DistInterval max_distance(const Domain& domain, const CenterSet& centers, double tol) {
  return max_distance(domain, PointSetShape(centers.points), tol);
}

inline DistInterval max_distance(const Domain& domain, const Tree& tree, double tol) {
  return max_distance(domain, TreeShape(tree), tol);
}

/// Smallest radius at which the shape covers the domain, enclosed to `tol`.
/// Same quantity as max_distance, read as a covering radius.
template <typename Shape>
DistInterval min_cover_radius(const Domain& domain, const Shape& shape, double tol) {
  return max_distance(domain, shape, tol);
}

}  // namespace mdp

#pragma once

// Planar primitives: points, segments, polylines, polygonal domains with
// holes, and embedded trees. Distances use plain double arithmetic; every
// membership and intersection decision goes through the exact orientation
// predicate so topology never depends on round-off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mdp/errors.hpp"
#include "mdp/predicates.hpp"

namespace mdp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }
  friend constexpr Point2 operator*(Point2 a, double k) { return {k * a.x, k * a.y}; }
  friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// +1 left turn, -1 right turn, 0 collinear (exact).
inline int orientation(Point2 a, Point2 b, Point2 c) {
  return predicates::orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

/// Lexicographic (x, then y) order, used wherever output order must be stable.
constexpr bool lex_less(Point2 a, Point2 b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct Segment {
  Point2 a;
  Point2 b;

  double length() const { return distance(a, b); }
};

struct Box {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void expand(Point2 p) {
    xmin = std::min(xmin, p.x);
    ymin = std::min(ymin, p.y);
    xmax = std::max(xmax, p.x);
    ymax = std::max(ymax, p.y);
  }
  bool empty() const { return xmin > xmax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  double diagonal() const { return std::hypot(width(), height()); }
};

/// Euclidean distance from p to the closed segment s. A degenerate segment
/// (a == b) is treated as the point a.
inline double dist_point_segment(Point2 p, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

/// Closest point of the closed segment to p.
inline Point2 closest_point_on_segment(Point2 p, const Segment& s) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + t * d;
}

/// True iff p lies on the closed segment [a, b] (exact).
inline bool on_segment(Point2 p, Point2 a, Point2 b) {
  if (orientation(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

/// True iff the closed segments [p1, p2] and [q1, q2] share a point (exact).
inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment(q1, p1, p2)) return true;
  if (o2 == 0 && on_segment(q2, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, q1, q2)) return true;
  if (o4 == 0 && on_segment(p2, q1, q2)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Polyline

class Polyline {
 public:
  explicit Polyline(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw InvalidInput("polyline needs at least 2 vertices");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!is_finite(vertices_[i]))
        throw InvalidInput("polyline vertex " + std::to_string(i) + " is not finite");
      if (i > 0 && vertices_[i] == vertices_[i - 1])
        throw InvalidInput("polyline vertices " + std::to_string(i - 1) + " and " +
                           std::to_string(i) + " coincide");
    }
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t edge_count() const { return vertices_.size() - 1; }
  Segment edge(std::size_t i) const { return {vertices_[i], vertices_[i + 1]}; }

 private:
  std::vector<Point2> vertices_;
};

// ---------------------------------------------------------------------------
// Rings and domains

/// A closed polygon ring stored without repeating the first vertex.
using Ring = std::vector<Point2>;

inline double signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    twice += cross(ring[i], ring[(i + 1) % n]);
  }
  return 0.5 * twice;
}

enum class RingSide { Outside, Inside, OnBoundary };

/// Exact crossing-number classification of p against a closed ring.
inline RingSide classify_in_ring(Point2 p, const Ring& ring) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    if (on_segment(p, a, b)) return RingSide::OnBoundary;
    const bool a_above = a.y > p.y;
    const bool b_above = b.y > p.y;
    if (a_above == b_above) continue;
    const int o = orientation(a, b, p);
    // Upward edge crosses the rightward ray when p is left of it, downward
    // edge when p is right of it.
    if (b_above ? (o > 0) : (o < 0)) inside = !inside;
  }
  return inside ? RingSide::Inside : RingSide::Outside;
}

namespace detail {

inline Ring normalize_ring(Ring ring, std::size_t ring_index) {
  const std::string where = "ring " + std::to_string(ring_index);
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (!is_finite(ring[i]))
      throw InvalidInput(where + ", vertex " + std::to_string(i) + ": coordinate not finite");
  }
  if (ring.size() < 3)
    throw InvalidInput(where + ": needs at least 3 vertices, got " + std::to_string(ring.size()));
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (ring[i] == ring[(i + 1) % ring.size()])
      throw InvalidInput(where + ", vertex " + std::to_string(i) + ": repeated vertex");
  }
  return ring;
}

// Reports the first pair of edges (i < j) that touch where they should not.
inline void check_simple(const Ring& ring, std::size_t ring_index) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = ring[i];
    const Point2 b = ring[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = ring[j];
      const Point2 d = ring[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      bool bad = false;
      if (adjacent) {
        // Neighbours share exactly one vertex; anything more is a fold-back.
        const Point2 shared = (j == i + 1) ? b : a;
        const Point2 other_first = (j == i + 1) ? a : b;
        const Point2 other_second = (j == i + 1) ? d : c;
        if (orientation(other_first, shared, other_second) == 0) {
          bad = dot(other_first - shared, other_second - shared) > 0.0;
        }
      } else {
        bad = segments_intersect(a, b, c, d);
      }
      if (bad) {
        throw InvalidInput("ring " + std::to_string(ring_index) +
                           ": self-intersection between edges " + std::to_string(i) +
                           " and " + std::to_string(j));
      }
    }
  }
}

inline bool rings_touch(const Ring& r1, const Ring& r2) {
  for (std::size_t i = 0; i < r1.size(); ++i) {
    for (std::size_t j = 0; j < r2.size(); ++j) {
      if (segments_intersect(r1[i], r1[(i + 1) % r1.size()], r2[j], r2[(j + 1) % r2.size()]))
        return true;
    }
  }
  return false;
}

}  // namespace detail

/// Compact planar region: the closed area inside `boundary` minus the open
/// interiors of `holes`. Boundary is stored counterclockwise, holes clockwise.
class Domain {
 public:
  Domain(Ring boundary, std::vector<Ring> holes = {}) {
    boundary_ = detail::normalize_ring(std::move(boundary), 0);
    detail::check_simple(boundary_, 0);
    if (signed_area(boundary_) < 0.0) std::reverse(boundary_.begin(), boundary_.end());
    holes_.reserve(holes.size());
    for (std::size_t h = 0; h < holes.size(); ++h) {
      const std::size_t index = h + 1;
      Ring ring = detail::normalize_ring(std::move(holes[h]), index);
      detail::check_simple(ring, index);
      if (signed_area(ring) > 0.0) std::reverse(ring.begin(), ring.end());
      for (std::size_t v = 0; v < ring.size(); ++v) {
        if (classify_in_ring(ring[v], boundary_) != RingSide::Inside)
          throw InvalidInput("ring " + std::to_string(index) + ", vertex " + std::to_string(v) +
                             ": hole is not strictly inside the boundary");
      }
      if (detail::rings_touch(ring, boundary_))
        throw InvalidInput("ring " + std::to_string(index) + ": hole touches the boundary");
      for (std::size_t k = 0; k < holes_.size(); ++k) {
        if (detail::rings_touch(ring, holes_[k]) ||
            classify_in_ring(ring[0], holes_[k]) != RingSide::Outside ||
            classify_in_ring(holes_[k][0], ring) != RingSide::Outside) {
          throw InvalidInput("ring " + std::to_string(index) + ": hole overlaps ring " +
                             std::to_string(k + 1));
        }
      }
      holes_.push_back(std::move(ring));
    }
    for (Point2 p : boundary_) bbox_.expand(p);
    for (std::size_t i = 0; i < boundary_.size(); ++i) {
      for (std::size_t j = i + 1; j < boundary_.size(); ++j) {
        diameter_ = std::max(diameter_, distance(boundary_[i], boundary_[j]));
      }
    }
    for (const Ring& r : rings_view()) {
      for (std::size_t i = 0; i < r.size(); ++i) edges_.push_back({r[i], r[(i + 1) % r.size()]});
    }
  }

  const Ring& boundary() const { return boundary_; }
  const std::vector<Ring>& holes() const { return holes_; }
  const Box& bounding_box() const { return bbox_; }
  double diameter() const { return diameter_; }
  /// Every edge of every ring, boundary first.
  const std::vector<Segment>& edges() const { return edges_; }

  double area() const {
    double a = signed_area(boundary_);
    for (const Ring& h : holes_) a += signed_area(h);
    return a;
  }

  /// Distance from p to the union of all ring edges.
  double distance_to_boundary(Point2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Segment& e : edges_) best = std::min(best, dist_point_segment(p, e));
    return best;
  }

 private:
  std::vector<Ring> rings_view() const {
    std::vector<Ring> all{boundary_};
    all.insert(all.end(), holes_.begin(), holes_.end());
    return all;
  }

  Ring boundary_;
  std::vector<Ring> holes_;
  Box bbox_;
  double diameter_ = 0.0;
  std::vector<Segment> edges_;
};

/// Closed-set membership: boundary points of the outer ring and of holes are
/// in the domain, hole interiors are not.
inline bool point_in_domain(Point2 p, const Domain& d) {
  if (classify_in_ring(p, d.boundary()) == RingSide::Outside) return false;
  for (const Ring& h : d.holes()) {
    if (classify_in_ring(p, h) == RingSide::Inside) return false;
  }
  return true;
}

/// Distance from p to the domain (0 inside).
inline double distance_to_domain(Point2 p, const Domain& d) {
  if (point_in_domain(p, d)) return 0.0;
  return d.distance_to_boundary(p);
}

// ---------------------------------------------------------------------------
// Trees

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected embedded tree over a point list.
struct Tree {
  std::vector<Point2> points;
  std::vector<Edge> edges;

  Segment segment(const Edge& e) const { return {points[e.first], points[e.second]}; }
};

/// Throws InvalidInput unless the tree is connected, acyclic, free of
/// duplicate edges, and every point is used (a lone point is allowed).
inline void validate_tree(const Tree& t) {
  const std::size_t n = t.points.size();
  if (n == 0) throw InvalidInput("empty geometry");
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_finite(t.points[i]))
      throw InvalidInput("tree point " + std::to_string(i) + " is not finite");
  }
  if (t.edges.size() != n - 1)
    throw InvalidInput("tree over " + std::to_string(n) + " points needs " +
                       std::to_string(n - 1) + " edges, got " + std::to_string(t.edges.size()));
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const auto [u, v] = t.edges[k];
    if (u >= n || v >= n || u == v)
      throw InvalidInput("tree edge " + std::to_string(k) + " has invalid endpoints");
    const std::size_t ru = find(u);
    const std::size_t rv = find(v);
    if (ru == rv) throw InvalidInput("tree edge " + std::to_string(k) + " closes a cycle");
    parent[ru] = rv;
  }
}

/// Distance from p to the union of tree edges (or to the lone point).
inline double dist_point_tree(Point2 p, const Tree& t) {
  if (t.points.empty()) throw InvalidInput("empty geometry");
  if (t.edges.empty()) {
    double best = std::numeric_limits<double>::infinity();
    for (Point2 q : t.points) best = std::min(best, distance(p, q));
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Edge& e : t.edges) best = std::min(best, dist_point_segment(p, t.segment(e)));
  return best;
}

/// One-dimensional Hausdorff measure of an embedded tree: total edge length.
inline double h1_length(const Tree& t) {
  double total = 0.0;
  for (const Edge& e : t.edges) total += t.segment(e).length();
  return total;
}

inline double h1_length(const Polyline& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.edge_count(); ++i) total += p.edge(i).length();
  return total;
}

/// Hausdorff distance between two finite point sets.
inline double hausdorff_distance(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw InvalidInput("hausdorff distance of an empty set");
  auto directed = [](std::span<const Point2> from, std::span<const Point2> to) {
    double worst = 0.0;
    for (Point2 p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (Point2 q : to) nearest = std::min(nearest, distance(p, q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace mdp

#pragma once

// Explicit finite covers of curve neighbourhoods.
//
//  * segment prongs: 2n + 4 centers whose s-balls cover the stadium B(seg, s),
//    joined to the segment by n + 1 vertical prongs and 2 end extensions;
//  * polyline prongs: the same idea per rectangle piece of a polyline, with
//    the aspect ratio alpha and prong count n chosen from a target excess beta;
//  * spokes: four axis-aligned arms around a point covering the s-neighbourhood
//    of a small ball.
//
// Every builder returns the centers, the connecting tree, and the excess
// length of the connector over the base curve.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/spanning.hpp"

namespace mdp {

// ---------------------------------------------------------------------------
// Polygonized neighbourhoods

/// Regular polygon inscribed in the circle of the given radius.
inline Domain disk_polygon(Point2 center, double radius, int sides = 256) {
  if (!(radius > 0.0)) throw InvalidInput("disk radius must be positive");
  if (sides < 3) throw InvalidInput("disk polygon needs at least 3 sides");
  Ring ring;
  ring.reserve(static_cast<std::size_t>(sides));
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * std::numbers::pi * k / sides;
    ring.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return Domain(std::move(ring));
}

/// Polygon inscribed in the stadium B(seg, s): the two long sides exactly,
/// each semicircular cap replaced by `arc_segments` chords.
inline Domain stadium_polygon(const Segment& seg, double s, int arc_segments = 64) {
  if (!(s > 0.0)) throw InvalidInput("stadium radius must be positive");
  if (arc_segments < 2) throw InvalidInput("stadium needs at least 2 arc segments per cap");
  const double len = seg.length();
  if (len == 0.0) return disk_polygon(seg.a, s, 2 * arc_segments);
  const Point2 u = (1.0 / len) * (seg.b - seg.a);
  const double base = std::atan2(u.y, u.x);
  Ring ring;
  ring.reserve(2 * static_cast<std::size_t>(arc_segments) + 2);
  auto cap = [&](Point2 c, double start) {
    for (int k = 0; k <= arc_segments; ++k) {
      const double t = start + std::numbers::pi * k / arc_segments;
      ring.push_back({c.x + s * std::cos(t), c.y + s * std::sin(t)});
    }
  };
  cap(seg.b, base - std::numbers::pi / 2.0);
  cap(seg.a, base + std::numbers::pi / 2.0);
  return Domain(std::move(ring));
}

/// B(poly, s) as a union of per-edge stadium polygons.
inline std::vector<Domain> buffer_pieces(const Polyline& poly, double s, int arc_segments = 64) {
  std::vector<Domain> pieces;
  pieces.reserve(poly.edge_count());
  for (std::size_t i = 0; i < poly.edge_count(); ++i)
    pieces.push_back(stadium_polygon(poly.edge(i), s, arc_segments));
  return pieces;
}

// ---------------------------------------------------------------------------
// Tree assembly with vertex and edge de-duplication

namespace detail {

class TreeBuilder {
 public:
  std::size_t vertex(Point2 p) {
    const auto key = std::make_pair(p.x, p.y);
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const std::size_t id = tree_.points.size();
    tree_.points.push_back(p);
    index_.emplace(key, id);
    return id;
  }

  void segment(Point2 a, Point2 b) {
    const std::size_t u = vertex(a);
    const std::size_t v = vertex(b);
    if (u == v) return;
    const Edge e{std::min(u, v), std::max(u, v)};
    if (edges_.insert(e).second) tree_.edges.push_back(e);
  }

  /// Segment from a to c passing through the intermediate vertex b.
  void path(Point2 a, Point2 b, Point2 c) {
    segment(a, b);
    segment(b, c);
  }

  Tree take() { return std::move(tree_); }

 private:
  Tree tree_;
  std::map<std::pair<double, double>, std::size_t> index_;
  std::set<Edge> edges_;
};

// Orthonormal frame with origin at `origin`, x along `dir`.
struct Frame {
  Point2 origin;
  Point2 u;
  Point2 v;

  Point2 at(double x, double y) const { return origin + x * u + y * v; }
};

inline Frame frame_of(const Segment& seg) {
  const double len = seg.length();
  const Point2 u = (1.0 / len) * (seg.b - seg.a);
  return {seg.a, u, {-u.y, u.x}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Segment prongs

struct SegmentProngParams {
  double length = 0.0;  ///< L
  double s = 0.0;
  int n = 0;
  double delta = 0.0;  ///< (L / 2n)^2 / s

  /// Lifted balls still cover the spine: delta < s - delta.
  bool valid() const { return delta < s - delta; }
};

inline SegmentProngParams segment_prong_params(double length, double s, int n) {
  SegmentProngParams p;
  p.length = length;
  p.s = s;
  p.n = n;
  const double half_gap = length / (2.0 * n);
  p.delta = half_gap * half_gap / s;
  return p;
}

/// Smallest n whose prong lift satisfies delta_n < s - delta_n, i.e. the
/// first integer above L / (s sqrt 2).
inline int minimal_prong_count(double length, double s) {
  int n = std::max(1, static_cast<int>(std::floor(length / (s * std::numbers::sqrt2))));
  while (!segment_prong_params(length, s, n).valid()) ++n;
  while (n > 1 && segment_prong_params(length, s, n - 1).valid()) --n;
  return n;
}

/// Bookkeeping for one rectangle piece of a polyline cover.
struct RectPiece {
  Segment spine;
  double mu = 0.0;   ///< rectangle width
  double rho = 0.0;  ///< rectangle length (= spine length)
  int n = 0;
  double delta = 0.0;  ///< (rho / 2n)^2 / s
};

struct ProngCover {
  CenterSet centers;
  Tree connector;
  double base_length = 0.0;  ///< H1 of the curve being covered
  double excess = 0.0;       ///< H1(connector) - base_length

  // Parameters used by the builder (segment: delta, n; polyline: alpha, beta, n).
  int n = 0;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<RectPiece> pieces;
};

/// Prong cover of the stadium B(seg, s): tips (x_k, +-delta_n) for
/// x_k = kL/n, k = 0..n, plus the two outward extensions (-delta_n, 0) and
/// (L + delta_n, 0) in the segment's frame. Connector length is
/// L + 2(n + 2) delta_n.
inline ProngCover segment_prong_cover(const Segment& seg, double s, int n) {
  const double length = seg.length();
  if (!(length > 0.0)) throw InvalidInput("segment prong cover needs a segment of positive length");
  if (!(s > 0.0)) throw InvalidInput("radius s must be positive");
  if (n < 1) throw InvalidInput("prong count n must be at least 1");
  const SegmentProngParams params = segment_prong_params(length, s, n);
  if (!params.valid()) {
    throw InvalidInput("n = " + std::to_string(n) +
                       " is too small: delta_n < s - delta_n requires n > L/(s*sqrt(2)) = " +
                       std::to_string(length / (s * std::numbers::sqrt2)) + "; minimal n is " +
                       std::to_string(minimal_prong_count(length, s)));
  }
  const double delta = params.delta;
  const detail::Frame f = detail::frame_of(seg);
  auto spine_point = [&](int k) {
    if (k == 0) return seg.a;
    if (k == n) return seg.b;
    return f.at(length * k / n, 0.0);
  };

  ProngCover cover;
  cover.centers.radius = s;
  cover.n = n;
  cover.delta = delta;
  cover.base_length = length;

  detail::TreeBuilder builder;
  const Point2 left_tip = f.at(-delta, 0.0);
  const Point2 right_tip = f.at(length + delta, 0.0);
  cover.centers.points.push_back(left_tip);
  builder.segment(left_tip, seg.a);
  for (int k = 0; k <= n; ++k) {
    const Point2 base = spine_point(k);
    const Point2 up = base + delta * f.v;
    const Point2 down = base - delta * f.v;
    cover.centers.points.push_back(up);
    cover.centers.points.push_back(down);
    builder.segment(base, up);
    builder.segment(base, down);
    if (k > 0) builder.segment(spine_point(k - 1), base);
  }
  cover.centers.points.push_back(right_tip);
  builder.segment(seg.b, right_tip);

  cover.connector = builder.take();
  cover.excess = h1_length(cover.connector) - length;
  return cover;
}

// ---------------------------------------------------------------------------
// Polyline prongs

/// Prong count and aspect ratio for a polyline cover with excess target beta:
/// n is the smallest integer with 1/(s n) <= beta and alpha + beta < s, and
/// alpha = beta / (4n + 2) so that floor(beta / (4 alpha)) = n.
struct PolylineProngPlan {
  int n = 0;
  double alpha = 0.0;
};

inline PolylineProngPlan plan_polyline_prongs(double s, double beta) {
  if (!(s > 0.0)) throw InvalidInput("radius s must be positive");
  if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
  if (!(beta < s)) throw InvalidInput("beta must be smaller than s");
  int n = std::max(1, static_cast<int>(std::ceil(1.0 / (s * beta))));
  while (1.0 / (s * n) > beta) ++n;
  auto alpha_of = [beta](int m) { return beta / (4.0 * m + 2.0); };
  while (!(alpha_of(n) + beta < s)) ++n;
  return {n, alpha_of(n)};
}

/// Rectangle-piece cover of B(poly, s). Each polyline edge is cut into
/// pieces of length rho < 1; each piece gets a rectangle of width
/// mu = alpha * rho / 2 around it, 2(n + 1) perpendicular prongs of length
/// mu/2 + delta at spacing rho/n, and 4 end prongs of length mu/2 at heights
/// +-mu/2. Each piece contributes at most rho (1 + 2 beta) to the connector.
inline ProngCover polyline_prong_cover(const Polyline& poly, double s, double beta) {
  const double base = h1_length(poly);
  if (!(base > 0.0)) throw InvalidInput("polyline must have positive length");
  const PolylineProngPlan plan = plan_polyline_prongs(s, beta);
  const int n = plan.n;

  ProngCover cover;
  cover.centers.radius = s;
  cover.base_length = base;
  cover.n = n;
  cover.alpha = plan.alpha;
  cover.beta = beta;

  detail::TreeBuilder builder;
  std::vector<Point2> centers;
  std::set<std::pair<double, double>> seen;
  auto add_center = [&](Point2 p) {
    if (seen.insert({p.x, p.y}).second) centers.push_back(p);
  };

  for (std::size_t e = 0; e < poly.edge_count(); ++e) {
    const Segment edge = poly.edge(e);
    const double edge_length = edge.length();
    const int pieces = static_cast<int>(std::floor(edge_length)) + 1;
    const detail::Frame ef = detail::frame_of(edge);
    auto edge_point = [&](int j) {
      if (j == 0) return edge.a;
      if (j == pieces) return edge.b;
      return ef.at(edge_length * j / pieces, 0.0);
    };
    for (int j = 0; j < pieces; ++j) {
      RectPiece piece;
      piece.spine = {edge_point(j), edge_point(j + 1)};
      piece.rho = edge_length / pieces;
      piece.mu = plan.alpha * piece.rho / 2.0;
      piece.n = n;
      const double half_gap = piece.rho / (2.0 * n);
      piece.delta = half_gap * half_gap / s;
      if (!(piece.mu / 2.0 + 2.0 * piece.delta < s))
        throw ToleranceFailure("rectangle piece violates mu/2 + 2 delta < s");

      // Same orientation as the edge so neighbouring pieces share prongs.
      const detail::Frame f{piece.spine.a, ef.u, ef.v};
      const double half_width = piece.mu / 2.0;
      const double reach = half_width + piece.delta;
      auto spine_at = [&](int k) {
        if (k == 0) return piece.spine.a;
        if (k == n) return piece.spine.b;
        return f.at(piece.rho * k / n, 0.0);
      };
      auto side = [&](Point2 p, double h) { return p + h * f.v; };

      // Left end prongs.
      const Point2 left_top_tip = f.at(-half_width, half_width);
      const Point2 left_bottom_tip = f.at(-half_width, -half_width);
      add_center(left_top_tip);
      add_center(left_bottom_tip);
      for (int k = 0; k <= n; ++k) {
        const Point2 b = spine_at(k);
        const Point2 up = side(b, reach);
        const Point2 down = side(b, -reach);
        add_center(up);
        add_center(down);
        if (k == 0 || k == n) {
          builder.path(b, side(b, half_width), up);
          builder.path(b, side(b, -half_width), down);
        } else {
          builder.segment(b, up);
          builder.segment(b, down);
        }
        if (k > 0) builder.segment(spine_at(k - 1), b);
      }
      const Point2 right_top_tip = f.at(piece.rho + half_width, half_width);
      const Point2 right_bottom_tip = f.at(piece.rho + half_width, -half_width);
      add_center(right_top_tip);
      add_center(right_bottom_tip);
      builder.segment(side(piece.spine.a, half_width), left_top_tip);
      builder.segment(side(piece.spine.a, -half_width), left_bottom_tip);
      builder.segment(side(piece.spine.b, half_width), right_top_tip);
      builder.segment(side(piece.spine.b, -half_width), right_bottom_tip);
      cover.pieces.push_back(piece);
    }
  }

  cover.centers.points = std::move(centers);
  cover.connector = builder.take();
  cover.excess = h1_length(cover.connector) - base;
  return cover;
}

/// Upper bound 2 beta H1(poly) on the polyline cover's excess.
inline double polyline_excess_bound(const Polyline& poly, double beta) {
  return 2.0 * beta * h1_length(poly);
}

// ---------------------------------------------------------------------------
// Spokes

/// Largest arm a for which the four tips center + (0, +-a), (+-a, 0) cover
/// B(center, a/2 + s) with radius-s balls. The binding point sits at 45
/// degrees on the outer circle: a^2 (5/4 - sqrt2/2) <= a s (sqrt2 - 1).
inline double max_spoke_arm(double s) {
  return s * (std::numbers::sqrt2 - 1.0) / (1.25 - std::numbers::sqrt2 / 2.0);
}

struct SpokeSet {
  Point2 center;
  double arm = 0.0;  ///< 2 lip xi
  /// (0, +a), (0, -a), (+a, 0), (-a, 0) relative to center.
  std::array<Point2, 4> tips{};
  Tree segments;
  double total_length = 0.0;  ///< 4 arm = 8 lip xi
  /// Radius of the ball the tips must cover: lip xi + s.
  double covered_radius = 0.0;
};

/// Four spokes of length 2 lip xi around `center`. xi = 0 gives four tips at
/// the center and zero length.
inline SpokeSet spoke_cover(Point2 center, double lip, double xi, double s) {
  if (!is_finite(center)) throw InvalidInput("spoke center is not finite");
  if (!(lip > 0.0)) throw InvalidInput("Lipschitz constant must be positive");
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw InvalidInput("xi must be nonnegative");
  if (!(s > 0.0)) throw InvalidInput("radius s must be positive");
  const double arm = 2.0 * lip * xi;
  if (!(arm < s)) throw InvalidInput("spoke precondition 2 lip xi < s violated");
  if (!(arm <= max_spoke_arm(s)))
    throw InvalidInput("spoke arm 2 lip xi exceeds " + std::to_string(max_spoke_arm(s)) +
                       "; four tips no longer cover B(center, lip xi + s)");

  SpokeSet set;
  set.center = center;
  set.arm = arm;
  set.covered_radius = lip * xi + s;
  set.tips = {{{center.x, center.y + arm},
               {center.x, center.y - arm},
               {center.x + arm, center.y},
               {center.x - arm, center.y}}};
  if (arm == 0.0) {
    set.segments.points = {center};
    set.total_length = 0.0;
    return set;
  }
  detail::TreeBuilder builder;
  builder.vertex(center);
  for (const Point2& tip : set.tips) builder.segment(center, tip);
  set.segments = builder.take();
  set.total_length = 8.0 * lip * xi;
  return set;
}

/// Polygonized ball the spoke tips are supposed to cover.
inline Domain spoke_target_polygon(const SpokeSet& spokes, int sides = 256) {
  return disk_polygon(spokes.center, spokes.covered_radius, sides);
}

}  // namespace mdp

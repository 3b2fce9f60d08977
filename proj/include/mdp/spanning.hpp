#pragma once

// Euclidean minimum spanning trees (Kruskal + union-find), an exhaustive
// Pruefer-sequence oracle for small inputs, Fermat points, and local Steiner
// point insertion.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"

namespace mdp {

/// Ball centers X sharing one radius s.
struct CenterSet {
  std::vector<Point2> points;
  double radius = 0.0;
};

/// Throws InvalidInput if `points` has two entries closer than `tolerance`.
inline void check_distinct(std::span<const Point2> points, double tolerance = 1e-12) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Point2 p = points[order[k]];
    for (std::size_t m = k + 1; m < order.size(); ++m) {
      const Point2 q = points[order[m]];
      if (q.x - p.x > tolerance) break;
      if (distance(p, q) <= tolerance)
        throw InvalidInput("degenerate point set: points " + std::to_string(order[k]) + " and " +
                           std::to_string(order[m]) + " coincide");
    }
  }
}

inline void validate_center_set(const CenterSet& x) {
  if (!(x.radius > 0.0) || !std::isfinite(x.radius))
    throw InvalidInput("center radius must be positive and finite");
  for (std::size_t i = 0; i < x.points.size(); ++i) {
    if (!is_finite(x.points[i]))
      throw InvalidInput("center " + std::to_string(i) + " is not finite");
  }
  check_distinct(x.points);
}

/// Disjoint-set forest with union by rank and path halving.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  /// Returns false (and changes nothing) if a and b were already joined.
  bool unite(std::size_t a, std::size_t b) {
    std::size_t ra = find(a);
    std::size_t rb = find(b);
    if (ra == rb) return false;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    --components_;
    return true;
  }

  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned> rank_;
  std::size_t components_;
};

struct MSTResult {
  Tree tree;
  double length = 0.0;

  std::size_t edge_count() const { return tree.edges.size(); }
};

namespace detail {

inline MSTResult make_result(std::span<const Point2> points, std::vector<Edge> edges) {
  MSTResult result;
  result.tree.points.assign(points.begin(), points.end());
  result.tree.edges = std::move(edges);
  result.length = h1_length(result.tree);
  return result;
}

}  // namespace detail

/// Minimum spanning tree of the complete Euclidean graph on `points`.
/// Ties are broken by (length, smaller index, larger index).
inline MSTResult kruskal_mst(std::span<const Point2> points) {
  if (points.empty()) throw InvalidInput("empty geometry");
  check_distinct(points);
  const std::size_t n = points.size();
  struct Candidate {
    double length;
    std::size_t u;
    std::size_t v;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      candidates.push_back({distance(points[i], points[j]), i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.length, a.u, a.v) < std::tie(b.length, b.u, b.v);
  });
  UnionFind uf(n);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (const Candidate& c : candidates) {
    if (uf.unite(c.u, c.v)) {
      edges.emplace_back(c.u, c.v);
      if (edges.size() == n - 1) break;
    }
  }
  return detail::make_result(points, std::move(edges));
}

inline MSTResult kruskal_mst(const CenterSet& x) { return kruskal_mst(x.points); }

/// Exhaustive minimum over all n^(n-2) labelled spanning trees. Test oracle;
/// refuses more than 8 points.
inline MSTResult brute_force_mst(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n == 0) throw InvalidInput("empty geometry");
  if (n > 8) throw InvalidInput("brute_force_mst is limited to 8 points");
  check_distinct(points);
  if (n == 1) return detail::make_result(points, {});
  if (n == 2) return detail::make_result(points, {{0, 1}});

  std::vector<std::vector<double>> w(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i][j] = distance(points[i], points[j]);

  const std::size_t len = n - 2;
  std::vector<std::size_t> code(len, 0);
  std::vector<std::size_t> degree(n);
  std::vector<Edge> edges(n - 1);
  std::vector<Edge> best_edges;
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    // Decode the Pruefer sequence.
    std::fill(degree.begin(), degree.end(), 1);
    for (std::size_t c : code) ++degree[c];
    double total = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      edges[k] = {std::min(leaf, code[k]), std::max(leaf, code[k])};
      total += w[leaf][code[k]];
      --degree[leaf];
      --degree[code[k]];
    }
    std::size_t u = 0;
    while (degree[u] != 1) ++u;
    std::size_t v = u + 1;
    while (degree[v] != 1) ++v;
    edges[len] = {u, v};
    total += w[u][v];
    if (total < best) {
      best = total;
      best_edges = edges;
    }
    // Next sequence in base n.
    std::size_t pos = 0;
    while (pos < len && ++code[pos] == n) code[pos++] = 0;
    if (pos == len) break;
  }
  return detail::make_result(points, std::move(best_edges));
}

inline MSTResult brute_force_mst(const CenterSet& x) { return brute_force_mst(x.points); }

// ---------------------------------------------------------------------------
// Fermat points

/// Sum of distances from p to a, b and c.
inline double star_length(Point2 p, Point2 a, Point2 b, Point2 c) {
  return distance(p, a) + distance(p, b) + distance(p, c);
}

/// The point minimizing the summed distance to a, b, c. A vertex whose
/// interior angle is at least 120 degrees (collinear middle points included)
/// is returned exactly; otherwise the Torricelli point is constructed from
/// the outward equilateral apexes and polished by Weiszfeld steps.
inline Point2 fermat_point(Point2 a, Point2 b, Point2 c) {
  if (a == b && b == c) throw InvalidInput("fermat point of a coincident triple");
  if (a == b || a == c) return a;
  if (b == c) return b;

  const std::array<Point2, 3> v{a, b, c};
  for (std::size_t i = 0; i < 3; ++i) {
    const Point2 p = v[i];
    const Point2 q = v[(i + 1) % 3];
    const Point2 r = v[(i + 2) % 3];
    const Point2 u = q - p;
    const Point2 w = r - p;
    // cos(angle) <= -1/2  <=>  2 u.w <= -|u||w|
    if (2.0 * dot(u, w) <= -norm(u) * norm(w)) return p;
  }

  // Apex of the equilateral triangle erected outward on side (p, q), away
  // from the third vertex r.
  auto outward_apex = [](Point2 p, Point2 q, Point2 r) {
    const Point2 mid = 0.5 * (p + q);
    const Point2 d = q - p;
    Point2 normal{-d.y, d.x};
    if (dot(normal, r - mid) > 0.0) normal = -1.0 * normal;
    return mid + (std::numbers::sqrt3 / 2.0) * normal;
  };
  const Point2 apex_a = outward_apex(b, c, a);
  const Point2 apex_b = outward_apex(c, a, b);
  // Intersect line a->apex_a with line b->apex_b.
  const Point2 d1 = apex_a - a;
  const Point2 d2 = apex_b - b;
  const double denom = cross(d1, d2);
  Point2 f = (1.0 / 3.0) * (a + b + c);
  if (denom != 0.0) f = a + (cross(b - a, d2) / denom) * d1;

  const double scale = std::max({distance(a, b), distance(b, c), distance(a, c)});
  for (int iter = 0; iter < 100; ++iter) {
    double wx = 0.0;
    double wy = 0.0;
    double wsum = 0.0;
    for (Point2 p : v) {
      const double dist = distance(f, p);
      if (dist == 0.0) return f;
      wx += p.x / dist;
      wy += p.y / dist;
      wsum += 1.0 / dist;
    }
    const Point2 next{wx / wsum, wy / wsum};
    const double step = distance(next, f);
    if (star_length(next, a, b, c) <= star_length(f, a, b, c)) f = next;
    if (step <= 1e-12 * scale) break;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Steinerization

struct SteinerizeResult {
  /// Original points first, inserted Steiner points after them.
  CenterSet centers;
  MSTResult mst;
  std::size_t original_count = 0;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> adjacency(const Tree& t) {
  std::vector<std::vector<std::size_t>> adj(t.points.size());
  for (const auto& [u, v] : t.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

inline bool angle_below_120(Point2 center, Point2 p, Point2 q) {
  const Point2 u = p - center;
  const Point2 w = q - center;
  return 2.0 * dot(u, w) > -norm(u) * norm(w);
}

inline bool collides(std::span<const Point2> points, Point2 candidate, double tolerance) {
  for (Point2 p : points)
    if (distance(p, candidate) <= tolerance) return true;
  return false;
}

}  // namespace detail

/// Inserts Fermat points at MST corners whose connection angle is below 120
/// degrees, keeping an insertion only when the MST length drops by more than
/// 1e-10. After each round, inserted points are re-centred on the Fermat
/// point of their MST neighbours and dropped when they stop paying for
/// themselves. Length never increases.
inline SteinerizeResult steinerize(const CenterSet& x, int rounds) {
  if (rounds < 0) throw InvalidInput("rounds must be nonnegative");
  if (x.points.empty()) throw InvalidInput("empty geometry");
  constexpr double kGain = 1e-10;
  const std::size_t fixed = x.points.size();
  std::vector<Point2> points = x.points;
  MSTResult mst = kruskal_mst(points);
  double scale = 0.0;
  for (const auto& e : mst.tree.edges) scale = std::max(scale, mst.tree.segment(e).length());
  const double coincide = 1e-12 * std::max(scale, 1.0);

  auto try_points = [&](std::vector<Point2> candidate) {
    MSTResult next = kruskal_mst(candidate);
    if (next.length < mst.length - kGain) {
      points = std::move(candidate);
      mst = std::move(next);
      return true;
    }
    return false;
  };

  for (int round = 0; round < rounds; ++round) {
    bool changed = false;

    // Insertion pass over the corners of the current tree.
    const auto adj = detail::adjacency(mst.tree);
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> corners;
    for (std::size_t v = 0; v < adj.size(); ++v) {
      for (std::size_t i = 0; i < adj[v].size(); ++i)
        for (std::size_t j = i + 1; j < adj[v].size(); ++j)
          corners.emplace_back(adj[v][i], v, adj[v][j]);
    }
    const std::vector<Point2> snapshot = points;
    for (const auto& [p, v, q] : corners) {
      if (!detail::angle_below_120(snapshot[v], snapshot[p], snapshot[q])) continue;
      const Point2 f = fermat_point(snapshot[p], snapshot[v], snapshot[q]);
      if (detail::collides(points, f, coincide)) continue;
      std::vector<Point2> candidate = points;
      candidate.push_back(f);
      changed |= try_points(std::move(candidate));
    }

    // Relocation / removal passes on inserted points until they settle.
    for (int sweep = 0; sweep < 2000; ++sweep) {
      bool moved = false;
      for (std::size_t k = fixed; k < points.size(); ++k) {
        const auto nbrs = detail::adjacency(mst.tree)[k];
        if (nbrs.size() <= 2) {
          std::vector<Point2> candidate = points;
          candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(k));
          MSTResult next = kruskal_mst(candidate);
          if (next.length <= mst.length) {
            points = std::move(candidate);
            mst = std::move(next);
            moved = true;
            break;
          }
          continue;
        }
        if (nbrs.size() != 3) continue;
        const Point2 f = fermat_point(points[nbrs[0]], points[nbrs[1]], points[nbrs[2]]);
        if (distance(f, points[k]) <= coincide) continue;
        std::vector<Point2> others = points;
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(k));
        if (detail::collides(others, f, coincide)) continue;
        std::vector<Point2> candidate = points;
        candidate[k] = f;
        MSTResult next = kruskal_mst(candidate);
        if (next.length < mst.length) {
          points = std::move(candidate);
          mst = std::move(next);
          moved = true;
        }
      }
      changed |= moved;
      if (!moved) break;
    }
    if (!changed) break;
  }

  SteinerizeResult result;
  result.centers = CenterSet{points, x.radius};
  result.mst = std::move(mst);
  result.original_count = fixed;
  return result;
}

}  // namespace mdp

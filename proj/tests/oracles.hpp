#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "mdp/geometry.hpp"

namespace mdp::oracle {

// Deterministic 64-bit generator for test fixtures (SplitMix64).
class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

// Minimum distance from p to the tree, sampling every edge at `per_edge` points.
inline double sampled_tree_distance(Point2 p, const Tree& t, int per_edge) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [u, v] : t.edges) {
    const Point2 a = t.points[u];
    const Point2 b = t.points[v];
    for (int k = 0; k <= per_edge; ++k) {
      const double s = static_cast<double>(k) / per_edge;
      best = std::min(best, std::hypot(a.x + s * (b.x - a.x) - p.x, a.y + s * (b.y - a.y) - p.y));
    }
  }
  return best;
}

// Largest distance from a domain grid point (spacing h) to the nearest center.
template <typename DistanceFn>
double grid_max_distance(const Domain& d, double h, DistanceFn dist) {
  const Box& b = d.bounding_box();
  double worst = 0.0;
  for (double y = b.ymin; y <= b.ymax + 0.5 * h; y += h) {
    for (double x = b.xmin; x <= b.xmax + 0.5 * h; x += h) {
      const Point2 p{std::min(x, b.xmax), std::min(y, b.ymax)};
      if (!point_in_domain(p, d)) continue;
      worst = std::max(worst, dist(p));
    }
  }
  for (const Segment& e : d.edges()) {
    const int steps = std::max(1, static_cast<int>(std::ceil(e.length() / h)));
    for (int k = 0; k <= steps; ++k) {
      const double s = static_cast<double>(k) / steps;
      worst = std::max(worst, dist(e.a + s * (e.b - e.a)));
    }
  }
  return worst;
}

// Star-shaped polygon around the origin; with 6+ vertices every edge stays
// at least 0.35 from the origin, so a small central square hole fits.
inline Domain random_star_domain(FixtureRng& rng) {
  const int n = rng.integer(3, 9);
  Ring ring;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + rng.uniform(0.0, 0.8)) / n;
    const double r = rng.uniform(0.6, 1.0);
    ring.push_back({r * std::cos(t), r * std::sin(t)});
  }
  if (n >= 6 && rng.uniform() < 0.4) {
    const double h = 0.1;
    return Domain(ring, {{{-h, -h}, {h, -h}, {h, h}, {-h, h}}});
  }
  return Domain(ring);
}

inline double nearest_center_distance(Point2 p, const std::vector<Point2>& centers) {
  double best = std::numeric_limits<double>::infinity();
  for (Point2 c : centers) best = std::min(best, std::hypot(p.x - c.x, p.y - c.y));
  return best;
}

}  // namespace mdp::oracle

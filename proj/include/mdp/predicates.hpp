#pragma once

// Exact sign of the planar orientation determinant.
//
// A floating-point filter handles the common case; when the filter cannot
// decide, the determinant is expanded into six products, each represented
// exactly as a two-term expansion (fma), and the twelve terms are summed
// with nonoverlapping expansion arithmetic. The sign of the final expansion
// is the sign of its most significant nonzero component.

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace mdp::predicates {

namespace detail {

// Knuth's TwoSum: a + b == s + err exactly.
inline void two_sum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  err = (a - av) + (b - bv);
}

// a * b == p + err exactly (requires a correctly rounded fma).
inline void two_product(double a, double b, double& p, double& err) {
  p = a * b;
  err = std::fma(a, b, -p);
}

// Shewchuk's GROW-EXPANSION: adds `b` to a nonoverlapping expansion whose
// components are sorted by increasing magnitude.
inline void grow_expansion(std::vector<double>& e, double b) {
  double q = b;
  for (double& component : e) {
    double sum = 0.0;
    double err = 0.0;
    two_sum(q, component, sum, err);
    component = err;
    q = sum;
  }
  e.push_back(q);
}

inline int sign_of_expansion(const std::vector<double>& e) {
  for (auto it = e.rbegin(); it != e.rend(); ++it) {
    if (*it > 0.0) return 1;
    if (*it < 0.0) return -1;
  }
  return 0;
}

inline int orient2d_exact(double ax, double ay, double bx, double by, double cx,
                          double cy) {
  // (ax-cx)(by-cy) - (ay-cy)(bx-cx), expanded so every product is of inputs.
  const std::array<std::array<double, 3>, 6> terms{{
      {ax, by, 1.0},
      {ax, cy, -1.0},
      {cx, by, -1.0},
      {ay, bx, -1.0},
      {ay, cx, 1.0},
      {cy, bx, 1.0},
  }};
  std::vector<double> expansion;
  expansion.reserve(16);
  for (const auto& t : terms) {
    double p = 0.0;
    double err = 0.0;
    two_product(t[0], t[1], p, err);
    grow_expansion(expansion, t[2] * err);
    grow_expansion(expansion, t[2] * p);
  }
  return sign_of_expansion(expansion);
}

}  // namespace detail

/// +1 if c lies to the left of the directed line a->b, -1 if right, 0 if
/// collinear. Exact for all finite inputs.
inline int orient2d(double ax, double ay, double bx, double by, double cx,
                    double cy) {
  const double detleft = (ax - cx) * (by - cy);
  const double detright = (ay - cy) * (bx - cx);
  const double det = detleft - detright;
  // Error bound from Shewchuk's ccwerrboundA.
  constexpr double eps = std::numeric_limits<double>::epsilon() / 2.0;
  constexpr double bound_coefficient = (3.0 + 16.0 * eps) * eps;
  const double detsum = std::fabs(detleft) + std::fabs(detright);
  const double errbound = bound_coefficient * detsum;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  if (detsum == 0.0) return 0;
  return detail::orient2d_exact(ax, ay, bx, by, cx, cy);
}

}  // namespace mdp::predicates

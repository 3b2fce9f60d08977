#pragma once

// Search over finite center sets X with E inside B(X, s), minimizing the
// length of the minimum spanning tree of X.
//
// Every accepted state is certified Covered, so the incumbent is always a
// valid upper bound. Moves that change the covered region are re-certified
// only on the disk B(old, s), the only place coverage can be lost.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/random.hpp"
#include "mdp/spanning.hpp"

namespace mdp {

/// No feasible starting configuration fits the requested limits.
class NoFeasibleStart : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct OptimizerParams {
  int n_max = 30;
  int iterations = 5000;
  std::uint64_t seed = 1;
  double step_scale = 0.2;    ///< initial perturbation sigma as a fraction of s
  double cooling = 0.9996;    ///< T <- cooling * T each iteration
  double coverage_tol = 0.0;  ///< 0 selects 1e-6 x domain diameter
  int restarts = 4;            ///< independent runs of `iterations` each, best kept

  void validate() const {
    if (n_max < 1) throw InvalidInput("n_max must be positive");
    if (iterations < 0) throw InvalidInput("iterations must be nonnegative");
    if (!(step_scale > 0.0) || !std::isfinite(step_scale))
      throw InvalidInput("step_scale must be positive");
    if (!(cooling > 0.0 && cooling < 1.0)) throw InvalidInput("cooling must lie in (0, 1)");
    if (std::isnan(coverage_tol) || coverage_tol < 0.0)
      throw InvalidInput("coverage_tol must be nonnegative");
    if (restarts < 1) throw InvalidInput("restarts must be positive");
  }
};

struct ConfigState {
  CenterSet centers;
  MSTResult mst;
  CoverageVerdict verdict;
  double objective = std::numeric_limits<double>::infinity();

  bool feasible() const { return std::isfinite(objective); }
};

enum class MoveTag { Perturb, Remove, AddFermat, SplitEdge };

inline const char* to_string(MoveTag t) {
  switch (t) {
    case MoveTag::Perturb: return "perturb";
    case MoveTag::Remove: return "remove";
    case MoveTag::AddFermat: return "add_fermat";
    case MoveTag::SplitEdge: return "split_edge";
  }
  return "?";
}

struct Move {
  MoveTag tag = MoveTag::Perturb;
  std::size_t index = 0;                ///< center (Perturb, Remove) or MST edge (SplitEdge)
  Point2 offset;                        ///< Perturb displacement
  std::array<std::size_t, 3> triple{};  ///< AddFermat corner: neighbour, apex, neighbour
};

struct SearchProgress {
  int restart = 0;
  int iteration = 0;
  double current = 0.0;
  double best = 0.0;
  std::size_t centers = 0;
  double temperature = 0.0;
};

/// Optional hooks for long runs. `cancel` is polled every iteration; a
/// cancelled search still returns its best state.
struct SearchControl {
  std::function<void(const SearchProgress&)> on_progress;
  int progress_every = 100;
  const std::atomic<bool>* cancel = nullptr;
};

namespace detail {

inline CoverOptions cover_options(const Domain& d, double tol, std::optional<Disk> focus = {}) {
  CoverOptions o;
  o.tolerance = tol > 0.0 ? tol : default_tolerance(d);
  o.focus = focus;
  return o;
}

inline ConfigState make_state(std::vector<Point2> points, double s, CoverageVerdict verdict) {
  ConfigState st;
  st.centers = CenterSet{std::move(points), s};
  st.mst = kruskal_mst(st.centers.points);
  st.verdict = std::move(verdict);
  st.objective = st.verdict.covered() ? st.mst.length : std::numeric_limits<double>::infinity();
  return st;
}

inline bool has_near_duplicate(const std::vector<Point2>& pts, Point2 p, std::size_t skip,
                               double eps) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (i != skip && distance(pts[i], p) <= eps) return true;
  return false;
}

inline std::vector<std::vector<std::size_t>> adjacency(const MSTResult& mst, std::size_t n) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : mst.tree.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

inline std::size_t thread_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MDP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace detail

/// Triangular lattice whose covering radius is s(1 - 1e-3), anchored at the
/// bounding-box center, restricted to points within s of E. Certified
/// Covered; on failure the lattice is refined (x0.9) up to 3 times.
inline CenterSet init_hex_cover(const Domain& d, double s, double tol = 0.0) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("radius s must be positive");
  const CoverOptions opts = detail::cover_options(d, tol);
  const Box box = d.bounding_box();
  const Point2 origin = box.center();
  double rho = s * (1.0 - 1e-3);
  for (int attempt = 0; attempt <= 3; ++attempt, rho *= 0.9) {
    const double a = rho * std::numbers::sqrt3;
    const double row = a * std::numbers::sqrt3 / 2.0;
    const int jy = static_cast<int>(std::ceil((0.5 * box.height() + s) / row)) + 1;
    const int ix = static_cast<int>(std::ceil((0.5 * box.width() + s) / a)) + 1;
    std::vector<Point2> pts;
    for (int j = -jy; j <= jy; ++j) {
      const double shift = (j % 2 != 0) ? 0.5 * a : 0.0;
      for (int i = -ix; i <= ix; ++i) {
        const Point2 p{origin.x + i * a + shift, origin.y + j * row};
        if (distance_to_domain(p, d) <= s) pts.push_back(p);
      }
    }
    if (pts.empty()) continue;
    if (certify_cover(d, std::span<const Point2>(pts), s, opts).covered()) return {pts, s};
  }
  throw ToleranceFailure("init_hex_cover: lattice cover could not be certified after 3 refinements");
}

/// Greedy removal of centers whose loss keeps E covered. Candidates are
/// tried leaves first (longest incident MST edge first), then interior
/// centers by the MST length of what remains; each removal is certified on
/// B(removed, s).
inline CenterSet prune_redundant(const CenterSet& x, const Domain& d, double tol = 0.0) {
  validate_center_set(x);
  std::vector<Point2> pts = x.points;
  const double s = x.radius;
  bool removed = true;
  while (removed && pts.size() > 1) {
    removed = false;
    const MSTResult mst = kruskal_mst(pts);
    const auto adj = detail::adjacency(mst, pts.size());
    auto longest = [&](std::size_t i) {
      double m = 0.0;
      for (std::size_t j : adj[i]) m = std::max(m, distance(pts[i], pts[j]));
      return m;
    };
    auto without = [&](std::size_t i) {
      std::vector<Point2> rest = pts;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      return kruskal_mst(rest).length;
    };
    std::vector<std::size_t> leaves;
    std::vector<std::pair<double, std::size_t>> inner;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (adj[i].size() <= 1) {
        leaves.push_back(i);
      } else {
        inner.emplace_back(without(i), i);
      }
    }
    std::stable_sort(leaves.begin(), leaves.end(),
                     [&](std::size_t a, std::size_t b) { return longest(a) > longest(b); });
    std::stable_sort(inner.begin(), inner.end());
    std::vector<std::size_t> order = leaves;
    for (const auto& entry : inner) order.push_back(entry.second);
    for (std::size_t i : order) {
      std::vector<Point2> trial = pts;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      const auto v = certify_cover(d, std::span<const Point2>(trial), s,
                                   detail::cover_options(d, tol, Disk{pts[i], s}));
      if (v.covered()) {
        pts = std::move(trial);
        removed = true;
        break;
      }
    }
  }
  return {pts, s};
}

/// Applies a move and certifies the result. Adding a center never loses
/// coverage; moving or removing center i can only uncover points of
/// B(old_i, s), so only that disk is re-certified. Returns nothing when the
/// move is malformed, creates a near-duplicate center, or is not Covered.
inline std::optional<ConfigState> apply_move(const Domain& d, const ConfigState& cur,
                                             const Move& m, double tol = 0.0,
                                             std::uint64_t cell_budget = 400'000) {
  const auto& pts = cur.centers.points;
  const double s = cur.centers.radius;
  const double eps = 1e-9 * s;
  auto certified = [&](std::vector<Point2> next, Point2 changed) -> std::optional<ConfigState> {
    CoverOptions o = detail::cover_options(d, tol, Disk{changed, s});
    o.cell_budget = cell_budget;
    auto v = certify_cover(d, std::span<const Point2>(next), s, o);
    if (!v.covered()) return std::nullopt;
    return detail::make_state(std::move(next), s, std::move(v));
  };
  auto added = [&](Point2 p) -> std::optional<ConfigState> {
    if (!is_finite(p) || detail::has_near_duplicate(pts, p, pts.size(), eps)) return std::nullopt;
    std::vector<Point2> next = pts;
    next.push_back(p);
    return detail::make_state(std::move(next), s, cur.verdict);
  };
  switch (m.tag) {
    case MoveTag::Perturb: {
      if (m.index >= pts.size()) return std::nullopt;
      const Point2 moved = pts[m.index] + m.offset;
      if (!is_finite(moved) || detail::has_near_duplicate(pts, moved, m.index, eps))
        return std::nullopt;
      std::vector<Point2> next = pts;
      next[m.index] = moved;
      return certified(std::move(next), pts[m.index]);
    }
    case MoveTag::Remove: {
      if (m.index >= pts.size() || pts.size() <= 1) return std::nullopt;
      std::vector<Point2> next = pts;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(m.index));
      return certified(std::move(next), pts[m.index]);
    }
    case MoveTag::AddFermat: {
      for (std::size_t i : m.triple)
        if (i >= pts.size()) return std::nullopt;
      return added(fermat_point(pts[m.triple[0]], pts[m.triple[1]], pts[m.triple[2]]));
    }
    case MoveTag::SplitEdge: {
      if (m.index >= cur.mst.tree.edges.size()) return std::nullopt;
      const auto [a, b] = cur.mst.tree.edges[m.index];
      return added(0.5 * (pts[a] + pts[b]));
    }
  }
  return std::nullopt;
}

namespace detail {

// Move mix: remove 15% (leaves 90% of the time), add Fermat point 15%,
// split an MST edge 10%, perturb otherwise. Perturbations are half pulls
// toward the neighbours' Fermat point or mean, half Gaussian steps with
// sigma = step_scale * s * max(T / T0, 0.02). T0 = step_scale * s.
class Annealer {
 public:
  Annealer(const Domain& d, double s, const OptimizerParams& p, int restart,
           const SearchControl& control)
      : d_(d), s_(s), p_(p), restart_(restart), control_(control), rng_(p.seed, restart) {
    tol_ = p.coverage_tol > 0.0 ? p.coverage_tol : default_tolerance(d);
  }

  ConfigState run(const ConfigState& start) {
    ConfigState current = start;
    ConfigState best = start;
    const double t0 = p_.step_scale * s_;
    double temperature = t0;
    for (int it = 0; it < p_.iterations; ++it) {
      if (control_.cancel && control_.cancel->load()) break;
      if (const auto move = propose(current, temperature / t0)) {
        if (auto next = apply_move(d_, current, *move, tol_)) {
          const double delta = next->objective - current.objective;
          if (delta <= 0.0 || rng_.uniform() < std::exp(-delta / temperature)) {
            current = std::move(*next);
            if (current.objective < best.objective &&
                current.centers.points.size() <= static_cast<std::size_t>(p_.n_max))
              best = current;
          }
        }
      }
      temperature *= p_.cooling;
      if (control_.on_progress && control_.progress_every > 0 &&
          (it + 1) % control_.progress_every == 0) {
        control_.on_progress({restart_, it + 1, current.objective, best.objective,
                              current.centers.points.size(), temperature});
      }
    }
    return best;
  }

 private:
  std::optional<Move> propose(const ConfigState& cur, double heat) {
    const auto& pts = cur.centers.points;
    const std::size_t n = pts.size();
    const auto adj = adjacency(cur.mst, n);
    const bool can_add = n < static_cast<std::size_t>(p_.n_max);
    const double r = rng_.uniform();
    if (n > static_cast<std::size_t>(p_.n_max) || (r < 0.15 && n > 1)) {
      return Move{MoveTag::Remove, pick_removal(adj), {}, {}};
    }
    if (r < 0.30 && can_add) return fermat_move(pts, adj);
    if (r < 0.40 && can_add && !cur.mst.tree.edges.empty()) {
      return Move{MoveTag::SplitEdge, rng_.below(cur.mst.tree.edges.size()), {}, {}};
    }
    const std::size_t i = rng_.below(n);
    Point2 offset;
    if (rng_.uniform() < 0.5 && !adj[i].empty()) {
      Point2 target;
      if (adj[i].size() == 3) {
        target = fermat_point(pts[adj[i][0]], pts[adj[i][1]], pts[adj[i][2]]);
      } else {
        for (std::size_t j : adj[i]) target = target + pts[j];
        target = (1.0 / static_cast<double>(adj[i].size())) * target;
      }
      offset = rng_.uniform() * (target - pts[i]);
    } else {
      const double sigma = p_.step_scale * s_ * std::max(heat, 0.02);
      offset = {sigma * rng_.normal(), sigma * rng_.normal()};
    }
    return Move{MoveTag::Perturb, i, offset, {}};
  }

  std::size_t pick_removal(const std::vector<std::vector<std::size_t>>& adj) {
    if (rng_.uniform() < 0.9) {
      std::vector<std::size_t> leaves;
      for (std::size_t i = 0; i < adj.size(); ++i)
        if (adj[i].size() == 1) leaves.push_back(i);
      if (!leaves.empty()) return leaves[rng_.below(leaves.size())];
    }
    return rng_.below(adj.size());
  }

  // Corners (neighbour, apex, neighbour) meeting at less than 120 degrees;
  // only those have a Fermat point off the apex.
  std::optional<Move> fermat_move(const std::vector<Point2>& pts,
                                  const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<std::array<std::size_t, 3>> corners;
    for (std::size_t b = 0; b < pts.size(); ++b) {
      for (std::size_t x = 0; x < adj[b].size(); ++x) {
        for (std::size_t y = x + 1; y < adj[b].size(); ++y) {
          const Point2 u = pts[adj[b][x]] - pts[b];
          const Point2 v = pts[adj[b][y]] - pts[b];
          if (dot(u, v) > -0.5 * norm(u) * norm(v)) corners.push_back({adj[b][x], b, adj[b][y]});
        }
      }
    }
    if (corners.empty()) return std::nullopt;
    return Move{MoveTag::AddFermat, 0, {}, corners[rng_.below(corners.size())]};
  }

  const Domain& d_;
  double s_;
  const OptimizerParams& p_;
  int restart_;
  const SearchControl& control_;
  Rng rng_;
  double tol_ = 0.0;
};

}  // namespace detail

/// Simulated annealing with feasibility rejection. Starts from the pruned
/// hex cover (or the raw lattice if pruning lengthens the tree), returns the
/// best Covered state with at most n_max centers, re-certified on all of E.
inline ConfigState local_search(const Domain& d, double s, const OptimizerParams& p,
                                const SearchControl& control = {}) {
  p.validate();
  const double tol = p.coverage_tol > 0.0 ? p.coverage_tol : default_tolerance(d);
  const CenterSet hex = init_hex_cover(d, s, tol);
  const CenterSet pruned = prune_redundant(hex, d, tol);
  const double hex_len = kruskal_mst(hex.points).length;
  const double pruned_len = kruskal_mst(pruned.points).length;
  const CenterSet& seed_set =
      (pruned_len <= hex_len || hex.points.size() > static_cast<std::size_t>(p.n_max)) ? pruned
                                                                                       : hex;
  if (seed_set.points.size() > static_cast<std::size_t>(p.n_max)) {
    throw NoFeasibleStart("n_max = " + std::to_string(p.n_max) + " is below the " +
                       std::to_string(seed_set.points.size()) +
                       " centers of the pruned initial cover");
  }
  const CoverOptions full = detail::cover_options(d, tol);
  const ConfigState start = detail::make_state(
      seed_set.points, s, certify_cover(d, std::span<const Point2>(seed_set.points), s, full));
  if (!start.feasible()) throw ToleranceFailure("initial cover failed to re-certify");

  std::vector<ConfigState> results(static_cast<std::size_t>(p.restarts));
  auto work = [&](int k) {
    detail::Annealer annealer(d, s, p, k, control);
    results[static_cast<std::size_t>(k)] = annealer.run(start);
  };
  const std::size_t threads = detail::thread_count(results.size());
  if (threads <= 1) {
    for (int k = 0; k < p.restarts; ++k) work(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int k = next++; k < p.restarts; k = next++) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Lowest objective wins; ties go to the lowest restart index.
  ConfigState best = start;
  for (const ConfigState& r : results)
    if (r.objective < best.objective) best = r;
  best.verdict = certify_cover(d, std::span<const Point2>(best.centers.points), s, full);
  if (!best.verdict.covered()) {
    best = start;
  }
  best.objective = best.mst.length;
  return best;
}

/// Best objective for each n_max, post-processed into its best-so-far
/// (nonincreasing) envelope.
inline std::vector<std::pair<int, double>> sigma_n_curve(const Domain& d, double s,
                                                         const std::vector<int>& n_values,
                                                         const OptimizerParams& p) {
  if (!std::is_sorted(n_values.begin(), n_values.end()))
    throw InvalidInput("n_values must be sorted ascending");
  std::vector<std::pair<int, double>> curve;
  double envelope = std::numeric_limits<double>::infinity();
  for (int n : n_values) {
    OptimizerParams q = p;
    q.n_max = n;
    double value = std::numeric_limits<double>::infinity();
    try {
      value = local_search(d, s, q).objective;
    } catch (const InvalidInput&) {
      // n below what the initial cover needs: no feasible state at this n.
    }
    envelope = std::min(envelope, value);
    curve.emplace_back(n, envelope);
  }
  return curve;
}

}  // namespace mdp

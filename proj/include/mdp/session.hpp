#pragma once

// In-memory editing sessions: a domain, a center set and a radius, with the
// MST and coverage verdict recomputed after every mutation.
//
// Mutations on one session are applied strictly in arrival order (ticket
// queue) and each produces a new immutable snapshot; readers only copy the
// current snapshot pointer. Optimizer jobs run on their own threads and
// never touch the session until accepted.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "mdp/coverage.hpp"
#include "mdp/errors.hpp"
#include "mdp/geometry.hpp"
#include "mdp/io.hpp"
#include "mdp/optimizer.hpp"
#include "mdp/random.hpp"
#include "mdp/spanning.hpp"

namespace mdp {

struct SessionSnapshot {
  std::string id;
  std::uint64_t revision = 0;
  std::string name;
  std::shared_ptr<const Domain> domain;
  double s = 0.0;
  std::vector<Point2> centers;
  MSTResult mst;
  CoverageVerdict verdict;
};

using SnapshotPtr = std::shared_ptr<const SessionSnapshot>;

namespace ops {
struct AddVertex {
  Point2 p;
};
struct RemoveVertex {
  std::size_t index = 0;
};
struct MoveVertex {
  std::size_t index = 0;
  Point2 p;
};
struct SetRadius {
  double s = 0.0;
};
}  // namespace ops

using Mutation = std::variant<ops::AddVertex, ops::RemoveVertex, ops::MoveVertex, ops::SetRadius>;

class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request made against an out-of-date revision; carries the current state.
class Conflict : public std::runtime_error {
 public:
  Conflict(const std::string& what, SnapshotPtr current)
      : std::runtime_error(what), current_(std::move(current)) {}
  const SnapshotPtr& current() const { return current_; }

 private:
  SnapshotPtr current_;
};

enum class JobState { Running, Done, Cancelled, Failed };

inline const char* to_string(JobState s) {
  switch (s) {
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Cancelled: return "cancelled";
    case JobState::Failed: return "failed";
  }
  return "failed";
}

struct JobStatus {
  std::string id;
  std::string session;
  std::uint64_t base_revision = 0;
  JobState state = JobState::Running;
  int iteration = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> history;  ///< best-so-far after each progress report; nonincreasing
  std::optional<ConfigState> result;
  std::string error;
  bool accepted = false;
};

/// Coverage settings for interactive recomputation.
struct SessionSettings {
  double interactive_tol_factor = 1e-4;  ///< x diameter
  double refine_tol_factor = 1e-6;       ///< x diameter, used when the fast pass is Unknown
  double default_s_factor = 0.05;        ///< x diameter when the payload has no s
  int progress_every = 50;
};

class SessionStore {
 public:
  explicit SessionStore(SessionSettings settings = {}, std::uint64_t id_seed = 0x5EED)
      : settings_(settings), id_seed_(id_seed) {}

  ~SessionStore() {
    std::vector<std::shared_ptr<Job>> jobs;
    {
      std::lock_guard lock(mu_);
      for (auto& [id, job] : jobs_) jobs.push_back(job);
    }
    for (auto& job : jobs) {
      job->cancel = true;
      if (job->worker.joinable()) job->worker.join();
    }
  }

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  /// New session; s defaults to default_s_factor x diameter.
  SnapshotPtr create(Domain domain, std::string name = {}, std::optional<double> s = {},
                     std::vector<Point2> centers = {}) {
    auto d = std::make_shared<const Domain>(std::move(domain));
    const double radius = s ? *s : settings_.default_s_factor * d->diameter();
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("s must be positive");
    if (!centers.empty()) check_distinct(centers);
    auto session = std::make_shared<Session>();
    SessionSnapshot snap;
    {
      std::lock_guard lock(mu_);
      snap.id = next_id("s");
    }
    snap.revision = 1;
    snap.name = std::move(name);
    snap.domain = d;
    snap.s = radius;
    snap.centers = std::move(centers);
    recompute(snap);
    session->current = std::make_shared<const SessionSnapshot>(std::move(snap));
    SnapshotPtr out = session->current;
    std::lock_guard lock(mu_);
    sessions_.emplace(out->id, std::move(session));
    return out;
  }

  SnapshotPtr get(const std::string& id) const {
    auto session = find(id);
    std::lock_guard lock(session->snap_mu);
    return session->current;
  }

  /// Applies one mutation. With `expected` set, a revision mismatch throws
  /// Conflict instead of applying.
  SnapshotPtr mutate(const std::string& id, const Mutation& m,
                     std::optional<std::uint64_t> expected = {}) {
    auto session = find(id);
    Turn turn(*session);
    const SnapshotPtr cur = snapshot(*session);
    if (expected && *expected != cur->revision) {
      throw Conflict("stale revision " + std::to_string(*expected) + "; current is " +
                         std::to_string(cur->revision),
                     cur);
    }
    SessionSnapshot next = *cur;
    std::visit([&](const auto& op) { apply(next, op); }, m);
    next.revision = cur->revision + 1;
    recompute(next);
    return publish(*session, std::move(next));
  }

  std::string start_optimize(const std::string& id, const OptimizerParams& params) {
    params.validate();
    const SnapshotPtr base = get(id);
    auto job = std::make_shared<Job>();
    job->status.session = id;
    job->status.base_revision = base->revision;
    {
      std::lock_guard lock(mu_);
      job->status.id = next_id("j");
      jobs_.emplace(job->status.id, job);
    }
    job->worker = std::thread([this, job, base, params] { run_job(*job, *base, params); });
    return job->status.id;
  }

  JobStatus job(const std::string& job_id) const {
    auto job = find_job(job_id);
    std::lock_guard lock(job->mu);
    return job->status;
  }

  void cancel(const std::string& job_id) { find_job(job_id)->cancel = true; }

  /// Swaps the job's centers into its session at a new revision. Conflict if
  /// the job is unfinished, already accepted, or the session has moved on
  /// since the job started.
  SnapshotPtr accept(const std::string& job_id) {
    auto job = find_job(job_id);
    ConfigState result;
    std::string session_id;
    std::uint64_t base_revision = 0;
    {
      std::lock_guard lock(job->mu);
      session_id = job->status.session;
      base_revision = job->status.base_revision;
      if (job->status.state != JobState::Done || !job->status.result) {
        throw Conflict("job " + job_id + " is " + to_string(job->status.state), get(session_id));
      }
      result = *job->status.result;
    }
    auto session = find(session_id);
    Turn turn(*session);
    const SnapshotPtr cur = snapshot(*session);
    {
      std::lock_guard lock(job->mu);
      if (job->status.accepted) throw Conflict("job " + job_id + " was already accepted", cur);
      if (cur->revision != base_revision) {
        throw Conflict("session changed since the job started (revision " +
                           std::to_string(base_revision) + " -> " + std::to_string(cur->revision) +
                           ")",
                       cur);
      }
      job->status.accepted = true;
    }
    SessionSnapshot next = *cur;
    next.centers = result.centers.points;
    next.revision = cur->revision + 1;
    recompute(next);
    return publish(*session, std::move(next));
  }

  std::size_t session_count() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
  }

 private:
  struct Session {
    mutable std::mutex snap_mu;  // guards `current` (pointer swap only)
    SnapshotPtr current;
    std::mutex queue_mu;  // ticket queue for mutations
    std::condition_variable queue_cv;
    std::uint64_t next_ticket = 0;
    std::uint64_t serving = 0;
  };

  // Holds the session's write turn; turns are granted in ticket order.
  class Turn {
   public:
    explicit Turn(Session& s) : s_(s) {
      std::unique_lock lock(s_.queue_mu);
      const std::uint64_t ticket = s_.next_ticket++;
      s_.queue_cv.wait(lock, [&] { return s_.serving == ticket; });
    }
    ~Turn() {
      {
        std::lock_guard lock(s_.queue_mu);
        ++s_.serving;
      }
      s_.queue_cv.notify_all();
    }
    Turn(const Turn&) = delete;
    Turn& operator=(const Turn&) = delete;

   private:
    Session& s_;
  };

  struct Job {
    mutable std::mutex mu;
    JobStatus status;
    std::atomic<bool> cancel{false};
    std::thread worker;
  };

  std::string next_id(const char* prefix) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%016llx", prefix,
                  static_cast<unsigned long long>(splitmix64(id_seed_ + counter_++)));
    return buf;
  }

  std::shared_ptr<Session> find(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("unknown session " + id);
    return it->second;
  }

  std::shared_ptr<Job> find_job(const std::string& id) const {
    std::lock_guard lock(mu_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) throw NotFound("unknown job " + id);
    return it->second;
  }

  static SnapshotPtr snapshot(const Session& s) {
    std::lock_guard lock(s.snap_mu);
    return s.current;
  }

  static SnapshotPtr publish(Session& s, SessionSnapshot next) {
    auto ptr = std::make_shared<const SessionSnapshot>(std::move(next));
    std::lock_guard lock(s.snap_mu);
    s.current = ptr;
    return ptr;
  }

  static void check_index(const SessionSnapshot& snap, std::size_t i) {
    if (i >= snap.centers.size()) {
      throw InvalidInput("vertex index " + std::to_string(i) + " out of range (" +
                         std::to_string(snap.centers.size()) + " vertices)");
    }
  }

  static void apply(SessionSnapshot& snap, const ops::AddVertex& op) {
    if (!is_finite(op.p)) throw InvalidInput("vertex coordinates must be finite");
    snap.centers.push_back(op.p);
    check_distinct(snap.centers);
  }
  static void apply(SessionSnapshot& snap, const ops::RemoveVertex& op) {
    check_index(snap, op.index);
    snap.centers.erase(snap.centers.begin() + static_cast<std::ptrdiff_t>(op.index));
  }
  static void apply(SessionSnapshot& snap, const ops::MoveVertex& op) {
    check_index(snap, op.index);
    if (!is_finite(op.p)) throw InvalidInput("vertex coordinates must be finite");
    snap.centers[op.index] = op.p;
    check_distinct(snap.centers);
  }
  static void apply(SessionSnapshot& snap, const ops::SetRadius& op) {
    if (!(op.s > 0.0) || !std::isfinite(op.s)) throw InvalidInput("s must be positive");
    snap.s = op.s;
  }

  // MST and verdict for the snapshot's centers and s. An empty center set
  // is reported Uncovered with a boundary vertex as witness.
  void recompute(SessionSnapshot& snap) const {
    const Domain& d = *snap.domain;
    if (snap.centers.empty()) {
      snap.mst = MSTResult{};
      snap.verdict = CoverageVerdict{};
      snap.verdict.status = CoverStatus::Uncovered;
      snap.verdict.witness = d.boundary().front();
      snap.verdict.margin = -std::numeric_limits<double>::infinity();
      return;
    }
    snap.mst = kruskal_mst(snap.centers);
    const std::span<const Point2> pts(snap.centers);
    CoverOptions fast;
    fast.tolerance = settings_.interactive_tol_factor * d.diameter();
    snap.verdict = certify_cover(d, pts, snap.s, fast);
    if (snap.verdict.status == CoverStatus::Unknown) {
      CoverOptions fine;
      fine.tolerance = settings_.refine_tol_factor * d.diameter();
      snap.verdict = certify_cover(d, pts, snap.s, fine);
    }
  }

  void run_job(Job& job, const SessionSnapshot& base, const OptimizerParams& params) {
    SearchControl control;
    control.cancel = &job.cancel;
    control.progress_every = settings_.progress_every;
    control.on_progress = [&job](const SearchProgress& g) {
      std::lock_guard lock(job.mu);
      job.status.iteration = g.iteration;
      if (g.best < job.status.best) job.status.best = g.best;
      job.status.history.push_back(job.status.best);
    };
    try {
      ConfigState result = local_search(*base.domain, base.s, params, control);
      std::lock_guard lock(job.mu);
      if (job.cancel) {
        job.status.state = JobState::Cancelled;
        return;
      }
      job.status.best = std::min(job.status.best, result.objective);
      job.status.history.push_back(job.status.best);
      job.status.result = std::move(result);
      job.status.state = JobState::Done;
    } catch (const std::exception& e) {
      std::lock_guard lock(job.mu);
      job.status.state = JobState::Failed;
      job.status.error = e.what();
    }
  }

  SessionSettings settings_;
  std::uint64_t id_seed_;
  std::uint64_t counter_ = 0;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
};

/// Scenario document for a snapshot (the export path).
inline std::string export_scenario(const SessionSnapshot& snap) {
  return io::save_scenario(io::Scenario{snap.name, *snap.domain, snap.s, snap.centers, {}});
}

inline std::string export_svg(const SessionSnapshot& snap) {
  io::SvgScene scene;
  scene.centers = snap.centers;
  scene.radius = snap.s;
  if (!snap.centers.empty()) scene.mst = snap.mst.tree;
  scene.witness = snap.verdict.witness;
  return io::render_svg(*snap.domain, scene);
}

}  // namespace mdp

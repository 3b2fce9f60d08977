#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <thread>
#include <vector>

#include "mdp/constructive.hpp"
#include "mdp/io.hpp"
#include "mdp/session.hpp"

using namespace mdp;

namespace {

Domain unit_square() { return Domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

JobStatus wait_for(const SessionStore& store, const std::string& job) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  for (;;) {
    JobStatus st = store.job(job);
    if (st.state != JobState::Running || std::chrono::steady_clock::now() > deadline) return st;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

OptimizerParams small_job(int iterations) {
  OptimizerParams p;
  p.iterations = iterations;
  p.restarts = 1;
  p.seed = 5;
  return p;
}

}  // namespace

TEST(Session, CreateDefaultsAndRevisionOne) {
  SessionStore store;
  const auto snap = store.create(unit_square(), "sq");
  EXPECT_EQ(snap->revision, 1u);
  EXPECT_EQ(snap->name, "sq");
  EXPECT_NEAR(snap->s, 0.05 * std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(snap->centers.empty());
  EXPECT_EQ(snap->verdict.status, CoverStatus::Uncovered);
  ASSERT_TRUE(snap->verdict.witness.has_value());
  EXPECT_EQ(store.get(snap->id), snap);
  EXPECT_EQ(store.session_count(), 1u);
  EXPECT_THROW(store.create(unit_square(), "", -1.0), InvalidInput);
  EXPECT_THROW(store.get("nope"), NotFound);
}

TEST(Session, CornersThenRemovals) {
  SessionStore store;
  auto snap = store.create(unit_square(), "", 0.8);
  const std::string id = snap->id;
  for (Point2 p : {Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}}) {
    snap = store.mutate(id, ops::AddVertex{p});
  }
  EXPECT_EQ(snap->revision, 5u);
  EXPECT_DOUBLE_EQ(snap->mst.length, 3.0);
  EXPECT_EQ(snap->verdict.status, CoverStatus::Covered);
  snap = store.mutate(id, ops::RemoveVertex{3});
  snap = store.mutate(id, ops::RemoveVertex{2});
  EXPECT_DOUBLE_EQ(snap->mst.length, 1.0);
  snap = store.mutate(id, ops::RemoveVertex{1});
  EXPECT_EQ(snap->centers.size(), 1u);
  EXPECT_EQ(snap->mst.length, 0.0);
  EXPECT_EQ(snap->revision, 8u);
}

TEST(Session, CentreOnlyIsUncoveredWithCornerWitness) {
  SessionStore store;
  const double s = 0.7;  // below half the diagonal
  auto snap = store.create(unit_square(), "", s, {{0.5, 0.5}});
  EXPECT_EQ(snap->verdict.status, CoverStatus::Uncovered);
  ASSERT_TRUE(snap->verdict.witness.has_value());
  const Point2 w = *snap->verdict.witness;
  EXPECT_GT(distance(w, {0.5, 0.5}), s);
  EXPECT_TRUE(point_in_domain(w, unit_square()));
  snap = store.mutate(snap->id, ops::SetRadius{0.71});
  EXPECT_EQ(snap->verdict.status, CoverStatus::Covered);
}

TEST(Session, MutationErrorsLeaveStateUntouched) {
  SessionStore store;
  const auto snap = store.create(unit_square(), "", 0.5, {{0.5, 0.5}});
  EXPECT_THROW(store.mutate(snap->id, ops::RemoveVertex{4}), InvalidInput);
  EXPECT_THROW(store.mutate(snap->id, ops::MoveVertex{0, {NAN, 0}}), InvalidInput);
  EXPECT_THROW(store.mutate(snap->id, ops::AddVertex{{0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(store.mutate(snap->id, ops::SetRadius{0.0}), InvalidInput);
  EXPECT_THROW(store.mutate("missing", ops::SetRadius{1.0}), NotFound);
  EXPECT_EQ(store.get(snap->id), snap);
}

TEST(Session, StaleRevisionConflicts) {
  SessionStore store;
  const auto first = store.create(unit_square(), "", 0.5);
  const auto second = store.mutate(first->id, ops::AddVertex{{0.2, 0.2}}, 1);
  EXPECT_EQ(second->revision, 2u);
  try {
    store.mutate(first->id, ops::AddVertex{{0.8, 0.8}}, 1);
    FAIL();
  } catch (const Conflict& e) {
    EXPECT_EQ(e.current(), second);
  }
  EXPECT_EQ(store.get(first->id)->revision, 2u);
}

TEST(Session, ConcurrentWritersKeepPerClientOrder) {
  SessionStore store;
  const std::string id = store.create(unit_square(), "", 0.3)->id;
  const int writers = 4;
  const int per_writer = 15;
  std::vector<std::thread> threads;
  for (int w = 0; w < writers; ++w) {
    threads.emplace_back([&, w] {
      for (int k = 0; k < per_writer; ++k) {
        store.mutate(id, ops::AddVertex{{0.01 + 0.06 * k, 0.1 + 0.2 * w}});
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto snap = store.get(id);
  EXPECT_EQ(snap->revision, 1u + writers * per_writer);
  ASSERT_EQ(snap->centers.size(), static_cast<std::size_t>(writers * per_writer));
  std::vector<int> last(writers, -1);
  for (Point2 p : snap->centers) {
    const int w = static_cast<int>(std::lround((p.y - 0.1) / 0.2));
    const int k = static_cast<int>(std::lround((p.x - 0.01) / 0.06));
    EXPECT_EQ(k, last[w] + 1);
    last[w] = k;
  }
  EXPECT_NEAR(snap->mst.length, kruskal_mst(snap->centers).length, 1e-12);
}

TEST(SessionJob, TinyDomainConvergesToOneCenterAndAccepts) {
  SessionStore store;
  const auto snap = store.create(disk_polygon({0, 0}, 0.1, 32), "tiny", 0.5);
  const std::string job = store.start_optimize(snap->id, small_job(200));
  const JobStatus st = wait_for(store, job);
  ASSERT_EQ(st.state, JobState::Done) << st.error;
  ASSERT_TRUE(st.result.has_value());
  EXPECT_EQ(st.result->centers.points.size(), 1u);
  EXPECT_EQ(st.best, 0.0);
  for (std::size_t i = 1; i < st.history.size(); ++i) EXPECT_LE(st.history[i], st.history[i - 1]);

  EXPECT_EQ(store.get(snap->id), snap);
  const auto accepted = store.accept(job);
  EXPECT_EQ(accepted->revision, 2u);
  EXPECT_EQ(accepted->centers.size(), 1u);
  EXPECT_EQ(accepted->verdict.status, CoverStatus::Covered);
  EXPECT_TRUE(store.job(job).accepted);
  EXPECT_THROW(store.accept(job), Conflict);
}

TEST(SessionJob, AcceptAfterEditConflicts) {
  SessionStore store;
  const auto snap = store.create(disk_polygon({0, 0}, 0.1, 32), "", 0.5);
  const std::string job = store.start_optimize(snap->id, small_job(100));
  store.mutate(snap->id, ops::AddVertex{{0.3, 0.3}});
  ASSERT_EQ(wait_for(store, job).state, JobState::Done);
  try {
    store.accept(job);
    FAIL();
  } catch (const Conflict& e) {
    EXPECT_EQ(e.current()->revision, 2u);
  }
  EXPECT_EQ(store.get(snap->id)->centers.size(), 1u);
}

TEST(SessionJob, CancelLeavesSessionUnchanged) {
  SessionStore store;
  const auto snap = store.create(stadium_polygon({{0, 0}, {1, 0}}, 0.25), "", 0.25);
  OptimizerParams p = small_job(200000);
  const std::string job = store.start_optimize(snap->id, p);
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  store.cancel(job);
  const JobStatus st = wait_for(store, job);
  EXPECT_EQ(st.state, JobState::Cancelled);
  EXPECT_THROW(store.accept(job), Conflict);
  EXPECT_EQ(store.get(snap->id), snap);
  EXPECT_THROW(store.job("j0"), NotFound);
  p.cooling = 2.0;
  EXPECT_THROW(store.start_optimize(snap->id, p), InvalidInput);
}

TEST(SessionJob, DestructorStopsRunningJobs) {
  const auto start = std::chrono::steady_clock::now();
  {
    SessionStore store;
    const auto snap = store.create(stadium_polygon({{0, 0}, {1, 0}}, 0.25), "", 0.25);
    store.start_optimize(snap->id, small_job(1000000));
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(20));
}

TEST(SessionExport, DeterministicAndReadAfterWrite) {
  SessionStore a(SessionSettings{}, 11);
  SessionStore b(SessionSettings{}, 11);
  const std::vector<Point2> c{{0.25, 0.25}, {0.75, 0.25}, {0.5, 0.8}};
  const auto sa = a.create(unit_square(), "demo", 0.4, c);
  const auto sb = b.create(unit_square(), "demo", 0.4, c);
  EXPECT_EQ(sa->id, sb->id);
  EXPECT_EQ(export_scenario(*sa), export_scenario(*sb));
  EXPECT_EQ(export_svg(*sa), export_svg(*sb));

  const auto moved = a.mutate(sa->id, ops::MoveVertex{2, {0.5, 0.7}});
  const io::Scenario back = io::load_scenario(export_scenario(*moved));
  EXPECT_EQ(back.centers, moved->centers);
  EXPECT_EQ(back.s, moved->s);
  EXPECT_EQ(kruskal_mst(back.centers).length, moved->mst.length);
  EXPECT_NE(export_svg(*moved).find("class=\"mst-edge\""), std::string::npos);
}

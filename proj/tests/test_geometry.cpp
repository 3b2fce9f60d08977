#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mdp/geometry.hpp"
#include "oracles.hpp"

using namespace mdp;

namespace {

Tree segment_tree(Point2 a, Point2 b) { return Tree{{a, b}, {{0, 1}}}; }

Domain unit_square() { return Domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

}  // namespace

TEST(DistPointSegment, PerpendicularFoot) {
  EXPECT_DOUBLE_EQ(dist_point_segment({0, 1}, {{-1, 0}, {1, 0}}), 1.0);
}

TEST(DistPointSegment, NearestEndpoint) {
  EXPECT_DOUBLE_EQ(dist_point_segment({2, 0}, {{-1, 0}, {1, 0}}), 1.0);
}

TEST(DistPointSegment, DegenerateSegmentIsAPoint) {
  EXPECT_DOUBLE_EQ(dist_point_segment({3, 4}, {{0, 0}, {0, 0}}), 5.0);
}

TEST(DistPointTree, SingleEdge) {
  EXPECT_DOUBLE_EQ(dist_point_tree({0, 2}, segment_tree({-1, 0}, {1, 0})), 2.0);
}

TEST(DistPointTree, ZeroOnVertices) {
  const Tree t{{{0, 0}, {2, 0}, {0, 2}, {3, 3}}, {{0, 1}, {0, 2}, {1, 3}}};
  for (Point2 p : t.points) EXPECT_EQ(dist_point_tree(p, t), 0.0);
}

TEST(DistPointTree, LShapeAgainstSampledOracle) {
  const Tree t{{{0, 0}, {2, 0}, {0, 2}}, {{0, 1}, {0, 2}}};
  const double oracle = oracle::sampled_tree_distance({1, 1}, t, 20000);
  EXPECT_NEAR(oracle, 1.0, 1e-9);
  EXPECT_NEAR(dist_point_tree({1, 1}, t), oracle, 1e-9);
}

TEST(DistPointTree, EmptyTreeIsAnError) {
  EXPECT_THROW(dist_point_tree({0, 0}, Tree{}), InvalidInput);
}

TEST(DistPointTree, IsOneLipschitz) {
  oracle::FixtureRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Tree t;
    const int n = rng.integer(1, 6);
    for (int i = 0; i < n; ++i) t.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (int i = 1; i < n; ++i) t.edges.push_back({static_cast<std::size_t>(rng.integer(0, i - 1)),
                                                   static_cast<std::size_t>(i)});
    const Point2 p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Point2 q{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    EXPECT_LE(std::fabs(dist_point_tree(p, t) - dist_point_tree(q, t)), distance(p, q) + 1e-12);
  }
}

TEST(H1Length, UnitSquarePath) {
  const Tree t{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1}, {1, 2}, {2, 3}}};
  EXPECT_DOUBLE_EQ(h1_length(t), 3.0);
}

TEST(H1Length, SinglePoint) { EXPECT_EQ(h1_length(Tree{{{4, 2}}, {}}), 0.0); }

TEST(H1Length, PolylineAndRigidMotionInvariance) {
  oracle::FixtureRng rng(11);
  std::vector<Point2> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3)});
  const Polyline poly(pts);
  const double base = h1_length(poly);
  const double theta = 0.7321;
  std::vector<Point2> moved;
  for (Point2 p : pts) {
    moved.push_back({std::cos(theta) * p.x - std::sin(theta) * p.y + 12.5,
                     std::sin(theta) * p.x + std::cos(theta) * p.y - 3.25});
  }
  EXPECT_NEAR(h1_length(Polyline(moved)), base, 1e-12 * base);
}

TEST(H1Length, AdditiveOverDisjointEdgeSets) {
  const std::vector<Point2> pts{{0, 0}, {1, 0}, {1, 2}, {3, 2}, {3, 5}};
  const Tree all{pts, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}};
  const Tree first{pts, {{0, 1}, {1, 2}}};
  const Tree second{pts, {{2, 3}, {3, 4}}};
  EXPECT_DOUBLE_EQ(h1_length(all), h1_length(first) + h1_length(second));
}

TEST(Hausdorff, Basics) {
  const std::vector<Point2> a{{0, 0}};
  const std::vector<Point2> b{{3, 4}};
  EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), 5.0);
  EXPECT_EQ(hausdorff_distance(b, b), 0.0);
}

TEST(Hausdorff, EnumeratedPairs) {
  const std::vector<Point2> a{{0, 0}, {1, 0}};
  const std::vector<Point2> b{{0, 1}};
  // Pair distances: (0,0)-(0,1) = 1, (1,0)-(0,1) = sqrt2. Directed a->b = sqrt2,
  // b->a = 1.
  EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), std::numbers::sqrt2);
}

TEST(Hausdorff, EmptyInputIsAnError) {
  const std::vector<Point2> a{{0, 0}};
  EXPECT_THROW(hausdorff_distance(a, std::vector<Point2>{}), InvalidInput);
}

TEST(Hausdorff, MetricAxiomsOnRandomTriples) {
  oracle::FixtureRng rng(3);
  auto random_set = [&] {
    std::vector<Point2> s;
    const int n = rng.integer(1, 7);
    for (int i = 0; i < n; ++i) s.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_set();
    const auto b = random_set();
    const auto c = random_set();
    const double ab = hausdorff_distance(a, b);
    EXPECT_EQ(ab, hausdorff_distance(b, a));
    EXPECT_EQ(hausdorff_distance(a, a), 0.0);
    EXPECT_LE(hausdorff_distance(a, c), ab + hausdorff_distance(b, c) + 1e-12);
  }
}

TEST(PointInDomain, ConvexCentroid) { EXPECT_TRUE(point_in_domain({0.5, 0.5}, unit_square())); }

TEST(PointInDomain, InsideHoleIsExcluded) {
  const Domain d({{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {{{1, 1}, {2, 1}, {2, 2}, {1, 2}}});
  EXPECT_FALSE(point_in_domain({1.5, 1.5}, d));
  EXPECT_TRUE(point_in_domain({1.0, 1.5}, d));  // hole boundary belongs to E
  EXPECT_TRUE(point_in_domain({3.0, 3.0}, d));
}

TEST(PointInDomain, BoundaryIsClosed) {
  const Domain d = unit_square();
  EXPECT_TRUE(point_in_domain({0.5, 0.0}, d));
  EXPECT_TRUE(point_in_domain({1.0, 1.0}, d));
  EXPECT_FALSE(point_in_domain({std::nextafter(1.0, 2.0), 0.5}, d));
  EXPECT_FALSE(point_in_domain({-0.1, 0.5}, d));
}

TEST(PointInDomain, ExactOnSlantedEdges) {
  // (1.5, 0.5) lies exactly on the edge (0,0)-(3,1); its floating-point
  // neighbours just below and above must land on the correct sides.
  const Domain d({{0, 0}, {3, 1}, {0, 3}});
  EXPECT_TRUE(point_in_domain({1.5, 0.5}, d));
  EXPECT_FALSE(point_in_domain({1.5, std::nextafter(0.5, 0.0)}, d));
  EXPECT_TRUE(point_in_domain({1.5, std::nextafter(0.5, 1.0)}, d));
}

TEST(Domain, OrientationIsNormalized) {
  const Domain d({{0, 0}, {0, 4}, {4, 4}, {4, 0}}, {{{1, 1}, {2, 1}, {2, 2}, {1, 2}}});
  EXPECT_GT(signed_area(d.boundary()), 0.0);
  EXPECT_LT(signed_area(d.holes()[0]), 0.0);
  EXPECT_DOUBLE_EQ(d.area(), 15.0);
}

TEST(Domain, ClosingVertexIsDropped) {
  const Domain d({{0, 0}, {1, 0}, {1, 1}, {0, 0}});
  EXPECT_EQ(d.boundary().size(), 3u);
}

TEST(Domain, RejectsBowTie) {
  try {
    Domain({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
    FAIL() << "bow-tie accepted";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("edges 0 and 2"), std::string::npos) << e.what();
  }
}

TEST(Domain, RejectsHoleOutsideAndOverlappingHoles) {
  const Ring outer{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  EXPECT_THROW(Domain(outer, {{{5, 5}, {6, 5}, {6, 6}}}), InvalidInput);
  EXPECT_THROW(Domain(outer, {{{1, 1}, {3, 1}, {3, 3}, {1, 3}}, {{{2, 2}, {2.5, 2}, {2.5, 2.5}}}}),
               InvalidInput);
  EXPECT_THROW(Domain({{0, 0}, {1, 0}}), InvalidInput);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mdp/constructive.hpp"
#include "oracles.hpp"

using namespace mdp;

namespace {

const Segment kUnitSegment{{0, 0}, {1, 0}};

// Closed form of the segment prong connector's excess: 2(n + 2)(L/2n)^2 / s.
double closed_form_excess(double length, double s, int n) {
  return 2.0 * (n + 2) * std::pow(length / (2.0 * n), 2) / s;
}

}  // namespace

TEST(SegmentProngCover, TenProngs) {
  const auto cover = segment_prong_cover(kUnitSegment, 0.25, 10);
  EXPECT_NEAR(cover.delta, 0.01, 1e-15);
  EXPECT_NEAR(cover.excess, 0.24, 1e-12);
  EXPECT_NEAR(h1_length(cover.connector), 1.24, 1e-12);
  EXPECT_EQ(cover.centers.points.size(), 24u);
  EXPECT_NO_THROW(validate_tree(cover.connector));
  EXPECT_EQ(certify_cover(stadium_polygon(kUnitSegment, 0.25), cover.centers, 0.25).status,
            CoverStatus::Covered);
}

TEST(SegmentProngCover, HundredProngs) {
  const auto cover = segment_prong_cover(kUnitSegment, 0.25, 100);
  EXPECT_NEAR(cover.excess, 0.0204, 1e-12);
  EXPECT_EQ(cover.centers.points.size(), 204u);
}

TEST(SegmentProngCover, ExcessMatchesClosedFormAndShrinks) {
  for (int n : {3, 4, 7, 10, 25, 64, 100}) {
    const auto cover = segment_prong_cover(kUnitSegment, 0.25, n);
    EXPECT_NEAR(cover.excess, closed_form_excess(1.0, 0.25, n), 1e-12) << n;
    const auto doubled = segment_prong_cover(kUnitSegment, 0.25, 2 * n);
    EXPECT_LT(doubled.excess, cover.excess) << n;
  }
}

TEST(SegmentProngCover, LayoutOrder) {
  const auto cover = segment_prong_cover(kUnitSegment, 0.25, 10);
  const auto& x = cover.centers.points;
  EXPECT_NEAR(x.front().x, -0.01, 1e-15);
  EXPECT_EQ(x.front().y, 0.0);
  EXPECT_NEAR(x.back().x, 1.01, 1e-15);
  EXPECT_GT(x[1].y, 0.0);
  EXPECT_LT(x[2].y, 0.0);
  for (std::size_t i = 3; i + 1 < x.size(); i += 2) EXPECT_GT(x[i].x, x[i - 2].x);
}

TEST(SegmentProngCover, RejectsTooFewProngs) {
  // delta_n < s - delta_n needs n > L/(s sqrt2) ~ 2.83.
  EXPECT_EQ(minimal_prong_count(1.0, 0.25), 3);
  try {
    segment_prong_cover(kUnitSegment, 0.25, 2);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("minimal n is 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(segment_prong_cover({{1, 1}, {1, 1}}, 0.25, 10), InvalidInput);
}

TEST(SegmentProngCover, RotatedSegmentStillCovers) {
  const Segment seg{{0.3, -0.2}, {1.1, 0.4}};
  const double s = 0.3;
  const auto cover = segment_prong_cover(seg, s, 6);
  EXPECT_NEAR(cover.excess, closed_form_excess(seg.length(), s, 6), 1e-12);
  EXPECT_EQ(certify_cover(stadium_polygon(seg, s), cover.centers, s).status, CoverStatus::Covered);
}

TEST(SegmentProngCover, SpanningTreesVersusConnector) {
  for (int n : {3, 10, 30}) {
    const auto cover = segment_prong_cover(kUnitSegment, 0.25, n);
    const double connector = h1_length(cover.connector);
    const double mst = kruskal_mst(cover.centers).length;
    // A spanning tree contains a path between the two extension tips.
    EXPECT_GE(mst, cover.base_length);
    // MST over the connector's own vertices cannot beat the connector's length
    // by being longer.
    EXPECT_LE(kruskal_mst(cover.connector.points).length, connector + 1e-12);
    // Steiner points recover what the bare MST loses at the two end corners.
    EXPECT_LE(steinerize(cover.centers, 2).mst.length, connector + 1e-12) << n;
  }
}

TEST(PolylineProngCover, SingleEdge) {
  const Polyline poly({{0, 0}, {1, 0}});
  const double s = 0.5;
  const double beta = 0.1;
  const auto cover = polyline_prong_cover(poly, s, beta);
  EXPECT_GE(cover.excess, 0.0);
  EXPECT_LE(cover.excess, polyline_excess_bound(poly, beta));
  EXPECT_LE(cover.excess, 0.2);
  EXPECT_EQ(std::floor(cover.beta / (4.0 * cover.alpha)), cover.n);
  EXPECT_LE(1.0 / (s * cover.n), beta);
  EXPECT_LT(cover.alpha + beta, s);
  for (const RectPiece& piece : cover.pieces) {
    EXPECT_LT(piece.rho, 1.0);
    EXPECT_LT(piece.mu / piece.rho, cover.alpha);
  }
  EXPECT_NO_THROW(validate_tree(cover.connector));
  const auto pieces = buffer_pieces(poly, s);
  EXPECT_EQ(certify_cover_union(std::span<const Domain>(pieces), PointSetShape(cover.centers.points),
                                s)
                .status,
            CoverStatus::Covered);
}

TEST(PolylineProngCover, RightAngle) {
  const Polyline poly({{0, 0}, {1, 0}, {1, 1}});
  const double s = 0.5;
  const double beta = 0.05;
  const auto cover = polyline_prong_cover(poly, s, beta);
  EXPECT_LE(cover.excess, 0.2);
  EXPECT_LE(cover.excess, polyline_excess_bound(poly, beta));
  const auto pieces = buffer_pieces(poly, s);
  EXPECT_EQ(certify_cover_union(std::span<const Domain>(pieces), PointSetShape(cover.centers.points),
                                s)
                .status,
            CoverStatus::Covered);
  // Centers are distinct and the connector reaches every one of them.
  EXPECT_NO_THROW(check_distinct(cover.centers.points));
  for (Point2 c : cover.centers.points) EXPECT_EQ(dist_point_tree(c, cover.connector), 0.0);
}

TEST(PolylineProngCover, SmallerBetaSmallerExcess) {
  const Polyline poly({{0, 0}, {1, 0}, {1.5, 0.8}});
  const auto coarse = polyline_prong_cover(poly, 0.5, 0.1);
  const auto fine = polyline_prong_cover(poly, 0.5, 0.01);
  EXPECT_LT(fine.excess, coarse.excess);
}

TEST(PolylineProngCover, Errors) {
  const Polyline poly({{0, 0}, {1, 0}});
  EXPECT_THROW(polyline_prong_cover(poly, 0.5, 0.5), InvalidInput);
  EXPECT_THROW(polyline_prong_cover(poly, 0.5, 0.0), InvalidInput);
  EXPECT_THROW(Polyline({{0, 0}, {0, 0}}), InvalidInput);
}

TEST(SpokeCover, LengthAndCoverage) {
  const double lip = 1.0;
  const double xi = 0.01;
  const double s = 1.0;
  const auto spokes = spoke_cover({0.2, -0.1}, lip, xi, s);
  EXPECT_EQ(spokes.total_length, 8.0 * lip * xi);
  EXPECT_NEAR(h1_length(spokes.segments), 0.08, 1e-15);
  const std::vector<Point2> tips(spokes.tips.begin(), spokes.tips.end());
  EXPECT_EQ(certify_cover(spoke_target_polygon(spokes), tips, s).status, CoverStatus::Covered);
}

TEST(SpokeCover, ZeroXiIsDegenerate) {
  const auto spokes = spoke_cover({1, 2}, 3.0, 0.0, 1.0);
  EXPECT_EQ(spokes.total_length, 0.0);
  EXPECT_EQ(h1_length(spokes.segments), 0.0);
  for (Point2 t : spokes.tips) EXPECT_EQ(t, (Point2{1, 2}));
}

TEST(SpokeCover, QuarterTurnSymmetry) {
  const auto spokes = spoke_cover({0, 0}, 2.0, 0.02, 0.5);
  std::vector<Point2> tips(spokes.tips.begin(), spokes.tips.end());
  std::vector<Point2> rotated;
  for (Point2 t : tips) rotated.push_back({-t.y, t.x});
  Ring ring = spoke_target_polygon(spokes).boundary();
  for (Point2& p : ring) p = {-p.y, p.x};
  const Domain turned(ring);
  const auto a = certify_cover(spoke_target_polygon(spokes), tips, 0.5);
  const auto b = certify_cover(turned, rotated, 0.5);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.status, CoverStatus::Covered);
}

TEST(SpokeCover, ArmLimit) {
  // Four tips cover B(c, a/2 + s) only while a <= s (sqrt2 - 1)/(5/4 - sqrt2/2).
  const double s = 1.0;
  EXPECT_NEAR(max_spoke_arm(s), 0.762974, 1e-6);
  EXPECT_THROW(spoke_cover({0, 0}, 1.0, 0.45, s), InvalidInput);  // arm 0.9 < s but too long
  EXPECT_THROW(spoke_cover({0, 0}, 1.0, 0.6, s), InvalidInput);   // arm >= s
  const auto ok = spoke_cover({0, 0}, 1.0, 0.35, s);              // arm 0.7
  const std::vector<Point2> tips(ok.tips.begin(), ok.tips.end());
  EXPECT_EQ(certify_cover(spoke_target_polygon(ok), tips, s).status, CoverStatus::Covered);
}

TEST(SpokeCover, ArmJustPastLimitFailsNumerically) {
  // Geometric check of the limit itself, independent of the builder's guard.
  const double s = 1.0;
  const double a = max_spoke_arm(s) * 1.01;
  const std::vector<Point2> tips{{0, a}, {0, -a}, {a, 0}, {-a, 0}};
  const Domain target = disk_polygon({0, 0}, a / 2.0 + s, 256);
  EXPECT_EQ(certify_cover(target, tips, s).status, CoverStatus::Uncovered);
}

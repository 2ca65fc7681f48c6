#include "msflow/curve_network.hpp"
#include "msflow/initial_data.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace msflow;
using msflow::test::circle;
using msflow::test::polyline;
using msflow::test::single_closed;

TEST(CurveNetwork, SegmentNormals) {
  EXPECT_TRUE(segment_normal(Vec2(0, 0), Vec2(1, 0)).isApprox(Vec2(0, 1)));
  EXPECT_TRUE(segment_normal(Vec2(0, 0), Vec2(0, 2)).isApprox(Vec2(-1, 0)));
  const double s = std::sqrt(2.0) / 2.0;
  EXPECT_TRUE(segment_normal(Vec2(0, 0), Vec2(1, 1)).isApprox(Vec2(-s, s)));
}

TEST(CurveNetwork, VertexNormalsCollinear) {
  const auto w = vertex_normals(polyline({{0, 0}, {0.5, 0}, {1.5, 0}, {2, 0}}));
  for (const Vec2& v : w) EXPECT_TRUE(v.isApprox(Vec2(0, 1)));
}

TEST(CurveNetwork, VertexNormalsCorner) {
  const auto w = vertex_normals(polyline({{0, 0}, {1, 0}, {1, 1}}));
  EXPECT_NEAR(w[1].x(), -0.5, 1e-15);
  EXPECT_NEAR(w[1].y(), 0.5, 1e-15);
}

TEST(CurveNetwork, VertexNormalsRegularPolygonFollowBisector) {
  const Curve c = circle(1.3, 9, Vec2(0.2, -0.1), 0.4);
  const auto w = vertex_normals(c);
  for (std::size_t k = 0; k < 9; ++k) {
    // the bisector of a regular polygon points at the centre
    const Vec2 radial = (Vec2(0.2, -0.1) - c.vertices[k]).normalized();
    EXPECT_NEAR(std::abs(cross(w[k].normalized(), radial)), 0.0, 1e-12);
    EXPECT_GT(w[k].dot(radial), 0.0);
  }
}

TEST(CurveNetwork, LumpedInner) {
  const CurveNetwork net = single_closed(polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true));
  CurveField<double> one{{1, 1, 1, 1}}, zero{{0, 0, 0, 0}};
  EXPECT_NEAR(lumped_inner(net, one, one), 4.0, 1e-15);
  EXPECT_NEAR(lumped_inner(net, one, zero), 0.0, 1e-15);

  CurveNetwork seg;
  seg.curves.push_back(polyline({{0, 0}, {2, 0}}));
  CurveField<double> hat{{1, 0}};
  EXPECT_NEAR(lumped_inner(seg, hat, hat), 1.0, 1e-15);
}

TEST(CurveNetwork, RegionAreasUnitSquare) {
  const CurveNetwork net = single_closed(polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true));
  const RegionAreas a = region_areas(net);
  EXPECT_NEAR(a.areas[0], 1.0, 1e-15);
  EXPECT_NEAR(a.areas[1], 63.0, 1e-13);
  EXPECT_FALSE(a.suspicious);
}

TEST(CurveNetwork, RegionAreasInvariantUnderReorientation) {
  CurveNetwork net = single_closed(circle(1.0, 32));
  const double before = region_areas(net).areas[0];
  std::reverse(net.curves[0].vertices.begin(), net.curves[0].vertices.end());
  net.orientation = OrientationMatrix::from_rows({{1}, {-1}});
  EXPECT_NEAR(region_areas(net).areas[0], before, 1e-14);
}

TEST(CurveNetwork, ExampleOneAreas) {
  GeometrySpec g;
  g.type = GeometryType::DoubleBubblePlusDisk;
  g.bubbles = {DoubleBubbleSpec{{3.139, 3.139}, Vec2(-1, 0)}};
  g.disks = {DiskSpec{0.625, Vec2(2.2, 0)}};
  const OrientationMatrix O = OrientationMatrix::from_rows({{0, -1, 1, 0}, {1, 0, -1, -1}, {-1, 1, 0, 1}});
  const CurveNetwork net = make_initial(g, &O, 2);
  const RegionAreas a = region_areas(net);
  const double disk = std::numbers::pi * 0.625 * 0.625;
  EXPECT_NEAR(a.areas[0], 3.139, 0.005 * 3.139);
  EXPECT_NEAR(a.areas[1], 3.139 + disk, 0.005 * (3.139 + disk));
  EXPECT_NEAR(a.areas[0] + a.areas[1] + a.areas[2], 64.0, 1e-12);
  EXPECT_NO_THROW(check_orientation(net));
  EXPECT_EQ(phase_at(net, Vec2(-2, 0)), 0u);
  EXPECT_EQ(phase_at(net, Vec2(0.3, 0)), 1u);
  EXPECT_EQ(phase_at(net, Vec2(2.2, 0)), 1u);
  EXPECT_EQ(phase_at(net, Vec2(3.5, 3.5)), 2u);
}

TEST(CurveNetwork, AnisotropicLength) {
  const CurveNetwork sq = single_closed(polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true));
  EXPECT_NEAR(anisotropic_length(sq, {Anisotropy::isotropic()}), 4.0, 1e-15);

  const Curve seg = polyline({{0, 0}, {1, 0}});
  EXPECT_NEAR(anisotropic_length(seg, make_hex2d(0.1)), 0.1 + 2.0 * std::sqrt(0.75 + 0.0025), 1e-12);
  EXPECT_NEAR(anisotropic_length(seg, make_hex2d(0.1)), 1.834935, 1e-6);
  EXPECT_NEAR(anisotropic_length(seg, Anisotropy::hex2d(0.1, 3.0)), 3.0 * anisotropic_length(seg, make_hex2d(0.1)),
              1e-12);
}

TEST(CurveNetwork, SurgeryScanThresholds) {
  const double eps = 0.1;
  const SurgeryThresholds thr{eps, 4};
  const double long_r = 10 * eps / (2 * std::numbers::pi);
  EXPECT_TRUE(surgery_scan(single_closed(circle(long_r, 32)), thr).empty());
  const double short_r = 0.5 * eps / (2 * std::numbers::pi);
  const auto ev = surgery_scan(single_closed(circle(short_r, 32)), thr);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, SurgeryKind::Discard);
  EXPECT_EQ(ev[0].curve, 0u);
}

TEST(CurveNetwork, DiscardRemovesColumn) {
  CurveNetwork net;
  net.curves = {circle(1.0, 16, Vec2(-2, 0)), circle(0.01, 16, Vec2(2, 0))};
  net.orientation = OrientationMatrix::from_rows({{1, 0}, {0, 1}, {-1, -1}});
  net.exterior_phase = 2;
  const auto parent = apply_surgery(net, SurgeryEvent{SurgeryKind::Discard, 1, 0.06});
  ASSERT_EQ(net.curves.size(), 1u);
  EXPECT_EQ(net.orientation.curves(), 1u);
  EXPECT_EQ(net.orientation.phases(), 3u);
  ASSERT_EQ(parent.size(), 1u);
  EXPECT_EQ(parent[0], 0u);
  EXPECT_NEAR(region_areas(net).areas[1], 0.0, 1e-15);
}

TEST(CurveNetwork, RemoveAndGlueSplitsDoubleBubbleIntoTwoBubbles) {
  GeometrySpec g;
  g.type = GeometryType::DoubleBubble;
  g.vertices_per_curve = 32;
  g.bubbles = {DoubleBubbleSpec{{1.0, 1.0}, Vec2::Zero()}};
  CurveNetwork net = make_initial(g);
  // removing the middle curve leaves two bubbles touching at one point
  const auto parent = apply_surgery(net, SurgeryEvent{SurgeryKind::RemoveAndGlue, 2, net.curves[2].length()});
  ASSERT_EQ(net.curves.size(), 2u);
  EXPECT_TRUE(net.junctions.empty());
  EXPECT_NO_THROW(net.validate());
  EXPECT_EQ(parent, (std::vector<std::size_t>{0, 1}));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(net.curves[i].closed);
    EXPECT_EQ(net.curves[i].num_vertices(), 31u);
    EXPECT_EQ(net.orientation.column(i), make_initial(g).orientation.column(parent[i]));
  }
  const RegionAreas a = region_areas(net);
  EXPECT_GT(a.areas[0], 0.5);
  EXPECT_GT(a.areas[1], 0.5);
  EXPECT_NEAR(a.areas[0] + a.areas[1] + a.areas[2], 64.0, 1e-12);
}

TEST(CurveNetwork, RemoveAndGlueKeepsOrientationOfReversedCurves) {
  GeometrySpec g;
  g.type = GeometryType::DoubleBubble;
  g.vertices_per_curve = 16;
  g.bubbles = {DoubleBubbleSpec{{1.0, 2.0}, Vec2::Zero()}};
  CurveNetwork net = make_initial(g);
  const RegionAreas before = region_areas(net);
  std::reverse(net.curves[0].vertices.begin(), net.curves[0].vertices.end());
  for (std::size_t l = 0; l < 3; ++l) net.orientation(l, 0) = -net.orientation(l, 0);
  for (auto& J : net.junctions) J.vertices[0] = 15 - J.vertices[0];
  ASSERT_NO_THROW(net.validate());
  apply_surgery(net, SurgeryEvent{SurgeryKind::RemoveAndGlue, 2, net.curves[2].length()});
  ASSERT_EQ(net.curves.size(), 2u);
  const RegionAreas after = region_areas(net);
  // the collapse moves the junctions onto the chord, so each bubble keeps one arc cap
  EXPECT_GT(after.areas[0], 0.0);
  EXPECT_GT(after.areas[1], after.areas[0]);
  EXPECT_LT(after.areas[1], before.areas[1]);
}

TEST(CurveNetwork, ValidateCatchesUnmatchedJunction) {
  GeometrySpec g;
  g.vertices_per_curve = 8;
  g.bubbles = {DoubleBubbleSpec{{1.0, 1.0}, Vec2::Zero()}};
  CurveNetwork net = make_initial(g);
  EXPECT_NO_THROW(net.validate());
  net.curves[0].vertices.front() += Vec2(1e-3, 0);
  EXPECT_THROW(net.validate(), Error);
}

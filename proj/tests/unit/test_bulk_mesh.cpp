#include "msflow/bulk_mesh.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

using namespace msflow;
using msflow::test::polyline;

namespace {

double total_area(const BulkMesh& m) {
  double a = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) a += m.area(t);
  return a;
}

CurveNetwork horizontal_line(double y) {
  CurveNetwork net;
  Curve c;
  for (int i = 0; i <= 40; ++i) c.vertices.emplace_back(-3.9 + 7.8 * i / 40.0, y);
  net.curves.push_back(c);
  net.orientation = OrientationMatrix::from_rows({{1}, {-1}});
  net.exterior_phase = 1;
  return net;
}

}  // namespace

TEST(BulkMesh, InitialMesh) {
  const BulkMesh m = build_initial(1);
  EXPECT_EQ(m.num_triangles(), 8u);
  EXPECT_EQ(m.num_vertices(), 9u);
  EXPECT_NEAR(total_area(m), 64.0, 1e-12);
  EXPECT_EQ(check_mesh(m), "");
  for (int level = 2; level <= 5; ++level) EXPECT_EQ(check_mesh(build_initial(level)), "");
}

TEST(BulkMesh, AdaptRefinesBandAndKeepsFarFieldCoarse) {
  const CurveNetwork net = horizontal_line(0.13);
  AdaptParams p;
  p.coarse_level = 3;
  p.h_fine = 0.1;
  p.band_width = 0.2;
  const AdaptResult r = adapt(net, p);
  EXPECT_FALSE(r.warning);
  EXPECT_EQ(check_mesh(r.mesh), "");
  EXPECT_NEAR(total_area(r.mesh), 64.0, 1e-11);

  const TriangleLocator loc(r.mesh);
  for (int i = 0; i <= 100; ++i) {
    const Vec2 x(-3.9 + 7.8 * i / 100.0, 0.13);
    const int t = loc.locate(x);
    ASSERT_GE(t, 0);
    EXPECT_LE(r.mesh.diameter(static_cast<std::size_t>(t)), p.h_fine + 1e-12);
  }
  // a corner far from the line keeps the coarse size
  const int corner = loc.locate(Vec2(3.95, 3.95));
  ASSERT_GE(corner, 0);
  const double coarse_diam = std::sqrt(2.0) * 8.0 / 8.0;
  EXPECT_NEAR(r.mesh.diameter(static_cast<std::size_t>(corner)), coarse_diam, 1e-12);
}

TEST(BulkMesh, AdaptIsIdempotent) {
  const CurveNetwork net = horizontal_line(-0.41);
  AdaptParams p;
  p.h_fine = 0.125;
  p.band_width = 0.25;
  const BulkMesh a = adapt(net, p).mesh;
  const BulkMesh b = adapt(a, net, p).mesh;
  const BulkMesh c = adapt(b, net, p).mesh;
  EXPECT_EQ(b.vertices, c.vertices);
  EXPECT_EQ(b.triangles, c.triangles);
  EXPECT_EQ(a.triangles, b.triangles);
}

TEST(BulkMesh, StiffnessReferenceTriangle) {
  BulkMesh m;
  m.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  m.triangles = {{0, 1, 2}};
  m.levels = {0};
  const Eigen::MatrixXd A = Eigen::MatrixXd(assemble_stiffness(m));
  EXPECT_NEAR(A(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(A(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(A(2, 2), 0.5, 1e-15);
  EXPECT_NEAR(A(1, 2), 0.0, 1e-15);
  EXPECT_NEAR(A(0, 1), -0.5, 1e-15);
}

TEST(BulkMesh, StiffnessKillsConstantsAndIsSymmetric) {
  AdaptParams p;
  p.h_fine = 0.2;
  p.band_width = 0.4;
  const BulkMesh m = adapt(horizontal_line(0.3), p).mesh;
  const SparseMatrix A = assemble_stiffness(m);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(A.cols());
  EXPECT_LT((A * one).cwiseAbs().maxCoeff(), 1e-12);
  const SparseMatrix diff = SparseMatrix(A.transpose()) - A;
  EXPECT_LT(diff.norm(), 1e-14 * A.norm());
}

TEST(BulkMesh, LocatorFindsVertices) {
  const BulkMesh m = build_initial(3);
  const TriangleLocator loc(m);
  for (const Vec2& v : m.vertices) EXPECT_GE(loc.locate(v), 0);
  EXPECT_EQ(loc.locate(Vec2(4.5, 0)), -1);
}

TEST(BulkMesh, TransferInterpolatesLinearFunctions) {
  const BulkMesh a = build_initial(2);
  AdaptParams p;
  p.h_fine = 0.2;
  const BulkMesh b = adapt(horizontal_line(1.1), p).mesh;
  std::vector<double> f(a.num_vertices());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * a.vertices[i].x() - 0.5 * a.vertices[i].y() + 1.0;
  const auto g = transfer(a, f, b);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(g[i], 2.0 * b.vertices[i].x() - 0.5 * b.vertices[i].y() + 1.0, 1e-12);
  }
}

TEST(BulkMesh, DirichletNone) {
  const BulkMesh m = build_initial(1);
  std::vector<Triplet> t{{0, 0, 2.0}, {0, 1, -1.0}, {4, 4, 3.0}};
  const auto t0 = t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Constant(9, 0.5);
  dirichlet_apply(t, rhs, m, BoundarySpec{}, 0, 1.0);
  ASSERT_EQ(t.size(), t0.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t[i].value(), t0[i].value());
  EXPECT_TRUE(rhs.isApproxToConstant(0.5));
}

TEST(BulkMesh, DirichletValuesPerPhase) {
  const BulkMesh m = build_initial(1);
  BoundarySpec spec{DirichletSide::All, {2, 1, -3}};
  ASSERT_NO_THROW(spec.validate(3));
  // two reduced components stacked, each a 9x9 identity-free block
  std::vector<Triplet> t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(18);
  for (std::size_t l = 0; l < 2; ++l) dirichlet_apply(t, rhs, m, spec, l * 9, spec.w_D[l]);
  for (std::size_t v = 0; v < 9; ++v) {
    const bool bd = m.on_boundary(v);
    EXPECT_EQ(spec.is_dirichlet(m, v), bd);
    EXPECT_DOUBLE_EQ(rhs[v], bd ? 2.0 : 0.0);
    EXPECT_DOUBLE_EQ(rhs[9 + v], bd ? 1.0 : 0.0);
  }
}

TEST(BulkMesh, DirichletRightSideOnly) {
  const BulkMesh m = build_initial(2);
  BoundarySpec spec{DirichletSide::Right, {1, -1}};
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    EXPECT_EQ(spec.is_dirichlet(m, v), m.vertices[v].x() == 4.0);
  }
}

TEST(BulkMesh, RejectsUnbalancedUndercooling) {
  EXPECT_THROW((BoundarySpec{DirichletSide::All, {1, 1, 1}}.validate(3)), ConfigError);
  EXPECT_THROW((BoundarySpec{DirichletSide::All, {1, -1}}.validate(3)), ConfigError);
}

#include "msflow/anisotropy.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace msflow;

using test::hex_reference;

TEST(Anisotropy, EuclideanComponent) {
  EXPECT_DOUBLE_EQ(eval_gamma(Anisotropy::isotropic(), Vec2(3, 4)), 5.0);
}

TEST(Anisotropy, HexUnitValues) {
  const Anisotropy g = make_hex2d(0.1);
  const double ex = 1.0 + 2.0 * std::sqrt(0.25 + 0.0075);
  const double ey = 0.1 + 2.0 * std::sqrt(0.75 + 0.0025);
  EXPECT_NEAR(eval_gamma(g, Vec2(1, 0)), ex, 1e-12);
  EXPECT_NEAR(eval_gamma(g, Vec2(0, 1)), ey, 1e-12);
  EXPECT_NEAR(eval_gamma(g, Vec2(1, 0)), 2.0148892, 1e-7);
  EXPECT_NEAR(eval_gamma(g, Vec2(0, 1)), 1.8349352, 1e-7);
  EXPECT_NEAR(eval_gamma(g, Vec2(1, 0)), hex_reference(0.1, 1, 0), 1e-12);
}

TEST(Anisotropy, HexDeltaOneIsThreeTimesEuclidean) {
  const Anisotropy g = make_hex2d(1.0);
  for (double a = 0.0; a < 6.3; a += 0.37) {
    const Vec2 p(2 * std::cos(a), 2 * std::sin(a));
    EXPECT_NEAR(eval_gamma(g, p), 3.0 * p.norm(), 1e-12);
  }
}

TEST(Anisotropy, HomogeneityAndHexSymmetry) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  const Anisotropy g = make_hex2d(0.1);
  const Mat2 R = rotation(std::numbers::pi / 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p(u(rng), u(rng));
    const double lam = u(rng);
    EXPECT_NEAR(eval_gamma(g, lam * p), std::abs(lam) * eval_gamma(g, p), 1e-12 * (1 + std::abs(lam) * p.norm()));
    EXPECT_NEAR(eval_gamma(g, R * p), eval_gamma(g, p), 1e-12 * (1 + p.norm()));
    EXPECT_NEAR(eval_gamma(g, p), hex_reference(0.1, p.x(), p.y()), 1e-12 * (1 + p.norm()));
  }
}

TEST(Anisotropy, ScaleMultiplies) {
  const Anisotropy g = Anisotropy::hex2d(0.1, 2.0);
  EXPECT_NEAR(g.eval(Vec2(0.3, -0.7)), 2.0 * make_hex2d(0.1).eval(Vec2(0.3, -0.7)), 1e-14);
}

TEST(Anisotropy, GtildeValues) {
  EXPECT_TRUE(gtilde(Mat2::Identity()).isApprox(Mat2::Identity()));
  const double d = 0.1;
  Mat2 G = Mat2::Zero();
  G(0, 0) = 1;
  G(1, 1) = d * d;
  const Mat2 Gt = gtilde(G);
  EXPECT_NEAR(Gt(0, 0), d * d, 1e-15);
  EXPECT_NEAR(Gt(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(Gt(0, 1), 0.0, 1e-15);
}

TEST(Anisotropy, GtildeInvolutionAndDeterminant) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 1000; ++i) {
    Mat2 A;
    A << u(rng), u(rng), u(rng), u(rng);
    const Mat2 G = A * A.transpose() + 0.05 * Mat2::Identity();
    const Mat2 Gt = gtilde(G);
    EXPECT_NEAR(Gt.determinant(), G.determinant(), 1e-12);
    EXPECT_TRUE(gtilde(Gt).isApprox(G, 1e-12));
  }
}

TEST(Anisotropy, GtildeRejectsNonSpd) {
  Mat2 G;
  G << 1, 0, 0, -1;
  EXPECT_THROW(gtilde(G), Error);
}

TEST(Anisotropy, SegmentFactor) {
  const AnisotropyComponent euclid(Mat2::Identity());
  EXPECT_NEAR(aniso_segment_factor(Vec2(0.2, 0.1), Vec2(1.7, -0.4), euclid).s, 1.0, 1e-14);

  const double d = 0.1;
  Mat2 G = Mat2::Zero();
  G(0, 0) = 1;
  G(1, 1) = d * d;
  const AnisotropyComponent c(G);
  const SegmentFactor f = aniso_segment_factor(Vec2(0, 0), Vec2(1, 0), c);
  EXPECT_NEAR(f.s, 1.0 / (d * d), 1e-10);
  // nu = (0, 1) for a left-to-right segment: sqrt(nu . G nu) = delta.
  EXPECT_NEAR(f.gamma, d, 1e-14);
}

TEST(Anisotropy, SegmentFactorFrameInvariance) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat2 G;
  G << 1.3, 0.2, 0.2, 0.4;
  const AnisotropyComponent c(G);
  for (int i = 0; i < 100; ++i) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const Mat2 R = rotation(3.0 * u(rng));
    const AnisotropyComponent cr(R * G * R.transpose());
    const SegmentFactor f0 = aniso_segment_factor(a, b, c);
    const SegmentFactor f1 = aniso_segment_factor(R * a, R * b, cr);
    EXPECT_NEAR(f0.gamma, f1.gamma, 1e-12);
    EXPECT_NEAR(f0.s, f1.s, 1e-10 * f0.s);
  }
}

TEST(Anisotropy, MobilityPositive) {
  Mat2 B;
  B << 2, 0.5, 0.5, 1;
  const Mobility m = Mobility::quadratic(B);
  for (int k = 0; k < 360; ++k) {
    const double a = k * std::numbers::pi / 180.0;
    EXPECT_GT(m.eval(Vec2(std::cos(a), std::sin(a))), 0.0);
  }
  EXPECT_DOUBLE_EQ(Mobility::constant(2.5).eval(Vec2(0.6, 0.8)), 2.5);
}

#pragma once

#include "msflow/bulk_mesh.hpp"
#include "msflow/curve_network.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace msflow::test {

/// Hexagonal anisotropy evaluated from its definition with explicit rotations.
inline double hex_reference(double delta, double px, double py) {
  double sum = 0.0;
  for (int l = 1; l <= 3; ++l) {
    const double th = l * std::numbers::pi / 3.0;
    const double rx = std::cos(th) * px + std::sin(th) * py;
    const double ry = -std::sin(th) * px + std::cos(th) * py;
    sum += std::sqrt(rx * rx + delta * delta * ry * ry);
  }
  return sum;
}

/// Composite midpoint rule for (Psi_j, Phi_k) on every segment of a curve.
/// Sets `lost` when a sample point lies outside the mesh.
inline Eigen::MatrixXd brute_force_B(const BulkMesh& mesh, const Curve& c, int points, bool* lost = nullptr) {
  const TriangleLocator loc(mesh);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.num_vertices()),
                                            static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t s = 0; s < c.num_segments(); ++s) {
    const auto [k0, k1] = c.segment(s);
    const Vec2 a = c.vertices[k0], b = c.vertices[k1];
    const double w = (b - a).norm() / points;
    for (int i = 0; i < points; ++i) {
      const double t = (i + 0.5) / points;
      const Vec2 x = a + t * (b - a);
      const int tri = loc.locate(x, 1e-10);
      if (tri < 0) {
        if (lost) *lost = true;
        continue;
      }
      const auto lam = mesh.barycentric(static_cast<std::size_t>(tri), x);
      const auto& T = mesh.triangles[static_cast<std::size_t>(tri)];
      for (int v = 0; v < 3; ++v) {
        B(static_cast<Eigen::Index>(k0), T[v]) += w * lam[v] * (1.0 - t);
        B(static_cast<Eigen::Index>(k1), T[v]) += w * lam[v] * t;
      }
    }
  }
  return B;
}

/// Random open polyline inside (-3.9, 3.9)^2: a start in (-3, 3)^2 and steps in (-0.5, 0.5)^2.
template <typename Rng>
Curve random_walk(Rng& rng, int segments) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), step(-0.5, 0.5);
  Curve c;
  c.vertices.emplace_back(u(rng), u(rng));
  for (int k = 0; k < segments; ++k) {
    Vec2 next = c.vertices.back() + Vec2(step(rng), step(rng));
    c.vertices.push_back(next.cwiseMax(-3.9).cwiseMin(3.9));
  }
  return c;
}

}  // namespace msflow::test

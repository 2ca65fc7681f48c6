#include "msflow/coupling.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace msflow {

namespace {

constexpr double kTol = 1e-12;

bool inside_domain(const Vec2& p) {
  return std::abs(p.x()) <= kDomainHalfWidth + kTol && std::abs(p.y()) <= kDomainHalfWidth + kTol;
}

/// Parameter interval of p(t) = a + t d, t in [0,1], inside the CCW triangle (Cyrus-Beck).
bool clip_to_triangle(const std::array<Vec2, 3>& tri, const Vec2& a, const Vec2& d, double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 e = tri[(i + 1) % 3] - tri[i];
    const double scale = e.norm();
    // Inside when cross(e, p - v_i) >= 0.
    const double f0 = cross(e, a - tri[i]) / scale;
    const double df = cross(e, d) / scale;
    if (std::abs(df) <= 1e-15) {
      if (f0 < -kTol) return false;
      continue;
    }
    const double t = -f0 / df;
    if (df > 0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

std::vector<SubSegment> clip_segments(const BulkMesh& mesh, const CurveNetwork& network) {
  const TriangleLocator locator(mesh);
  return clip_segments(mesh, network, locator);
}

std::vector<SubSegment> clip_segments(const BulkMesh& mesh, const CurveNetwork& network,
                                      const TriangleLocator& locator) {
  std::vector<SubSegment> out;
  std::vector<double> breaks;
  for (std::size_t c = 0; c < network.curves.size(); ++c) {
    const Curve& curve = network.curves[c];
    for (std::size_t j = 0; j < curve.num_segments(); ++j) {
      const auto [ia, ib] = curve.segment(j);
      const Vec2& a = curve.vertices[ia];
      const Vec2& b = curve.vertices[ib];
      if (!inside_domain(a) || !inside_domain(b)) throw Error("interface left domain");
      const Vec2 d = b - a;
      const double len = d.norm();
      breaks.assign({0.0, 1.0});
      for (int t : locator.candidates(a, b)) {
        const auto& T = mesh.triangles[static_cast<std::size_t>(t)];
        const std::array<Vec2, 3> tri{mesh.vertices[T[0]], mesh.vertices[T[1]], mesh.vertices[T[2]]};
        double t0, t1;
        if (clip_to_triangle(tri, a, d, t0, t1) && (t1 - t0) * len > kTol) {
          breaks.push_back(t0);
          breaks.push_back(t1);
        }
      }
      std::sort(breaks.begin(), breaks.end());
      std::vector<double> merged;
      for (double t : breaks) {
        t = std::clamp(t, 0.0, 1.0);
        if (merged.empty() || (t - merged.back()) * len > kTol) merged.push_back(t);
      }
      merged.back() = 1.0;
      if (merged.size() < 2) merged = {0.0, 1.0};
      for (std::size_t s = 0; s + 1 < merged.size(); ++s) {
        const Vec2 mid = a + 0.5 * (merged[s] + merged[s + 1]) * d;
        const int host = locator.locate(mid, 1e-10);
        if (host < 0) throw Error("interface left domain");
        out.push_back({c, j, merged[s], merged[s + 1], host});
      }
    }
  }
  return out;
}

std::vector<SparseMatrix> assemble_cross_mass(const BulkMesh& mesh, const CurveNetwork& network,
                                              const std::vector<SubSegment>& pieces, Quadrature quadrature) {
  if (quadrature == Quadrature::Lumped) {
    const TriangleLocator locator(mesh);
    return assemble_cross_mass_lumped(mesh, network, locator);
  }
  const auto K = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<std::vector<Triplet>> trip(network.curves.size());
  const double g = 0.5 / std::sqrt(3.0);
  for (const SubSegment& p : pieces) {
    const Curve& curve = network.curves[p.curve];
    const auto [ia, ib] = curve.segment(p.segment);
    const Vec2& a = curve.vertices[ia];
    const Vec2& b = curve.vertices[ib];
    const double w = 0.5 * (p.b - p.a) * (b - a).norm();
    const auto& T = mesh.triangles[static_cast<std::size_t>(p.host)];
    for (double s : {0.5 - g, 0.5 + g}) {
      const double t = p.a + s * (p.b - p.a);
      const auto lam = mesh.barycentric(static_cast<std::size_t>(p.host), a + t * (b - a));
      for (int r = 0; r < 3; ++r) {
        trip[p.curve].emplace_back(static_cast<Eigen::Index>(ia), T[r], w * (1.0 - t) * lam[r]);
        trip[p.curve].emplace_back(static_cast<Eigen::Index>(ib), T[r], w * t * lam[r]);
      }
    }
  }
  std::vector<SparseMatrix> out;
  out.reserve(network.curves.size());
  for (std::size_t c = 0; c < network.curves.size(); ++c) {
    SparseMatrix B(static_cast<Eigen::Index>(network.curves[c].num_vertices()), K);
    B.setFromTriplets(trip[c].begin(), trip[c].end());
    out.push_back(std::move(B));
  }
  return out;
}

std::vector<SparseMatrix> assemble_cross_mass_lumped(const BulkMesh& mesh, const CurveNetwork& network,
                                                     const TriangleLocator& locator) {
  const auto K = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<SparseMatrix> out;
  out.reserve(network.curves.size());
  for (const Curve& curve : network.curves) {
    const std::vector<double> m = lumped_masses(curve);
    std::vector<Triplet> trip;
    for (std::size_t k = 0; k < curve.num_vertices(); ++k) {
      const int t = locator.locate(curve.vertices[k], 1e-10);
      if (t < 0) throw Error("interface left domain");
      const auto lam = mesh.barycentric(static_cast<std::size_t>(t), curve.vertices[k]);
      const auto& T = mesh.triangles[static_cast<std::size_t>(t)];
      for (int r = 0; r < 3; ++r)
        if (lam[r] != 0.0) trip.emplace_back(static_cast<Eigen::Index>(k), T[r], m[k] * lam[r]);
    }
    SparseMatrix B(static_cast<Eigen::Index>(curve.num_vertices()), K);
    B.setFromTriplets(trip.begin(), trip.end());
    out.push_back(std::move(B));
  }
  return out;
}

std::vector<SparseMatrix> assemble_N(const std::vector<SparseMatrix>& cross_mass, const CurveField<Vec2>& omega,
                                     double tau) {
  if (!(tau > 0.0)) throw Error("assemble_N: tau must be positive");
  if (omega.size() != cross_mass.size()) throw Error("assemble_N: one normal field per curve required");
  std::vector<SparseMatrix> out;
  out.reserve(cross_mass.size());
  for (std::size_t c = 0; c < cross_mass.size(); ++c) {
    const SparseMatrix& B = cross_mass[c];
    if (static_cast<std::size_t>(B.rows()) != omega[c].size()) throw Error("assemble_N: normal field size mismatch");
    std::vector<Triplet> trip;
    trip.reserve(2 * static_cast<std::size_t>(B.nonZeros()));
    for (Eigen::Index col = 0; col < B.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(B, col); it; ++it) {
        const Vec2& w = omega[c][static_cast<std::size_t>(it.row())];
        trip.emplace_back(2 * it.row(), col, it.value() * w.x() / tau);
        trip.emplace_back(2 * it.row() + 1, col, it.value() * w.y() / tau);
      }
    }
    SparseMatrix N(2 * B.rows(), B.cols());
    N.setFromTriplets(trip.begin(), trip.end());
    out.push_back(std::move(N));
  }
  return out;
}

}  // namespace msflow

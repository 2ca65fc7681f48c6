#include "msflow/system_assembly.hpp"

#include <algorithm>
#include <cmath>

namespace msflow {

DofLayout make_layout(const BulkMesh& mesh, const CurveNetwork& network) {
  DofLayout layout;
  layout.bulk = mesh.num_vertices();
  layout.phases = network.num_phases();
  if (layout.phases < 2) throw Error("make_layout: at least two phases required");
  for (const Curve& c : network.curves) {
    layout.curve_offset.push_back(layout.curve_vertices);
    layout.curve_vertices += c.num_vertices();
  }
  return layout;
}

ProjectionP::ProjectionP(const CurveNetwork& network, const DofLayout& layout) {
  std::vector<std::vector<double>> masses;
  masses.reserve(network.curves.size());
  for (const Curve& c : network.curves) masses.push_back(lumped_masses(c));
  for (const JunctionMap& J : network.junctions) {
    Group g;
    double total = 0.0;
    for (int r = 0; r < 3; ++r) {
      g.vertex[r] = layout.curve_offset[J.curves[r]] + J.vertices[r];
      g.weight[r] = masses[J.curves[r]][J.vertices[r]];
      total += g.weight[r];
    }
    for (double& w : g.weight) w /= total;
    groups_.push_back(g);
  }
}

void ProjectionP::apply_in_place(Eigen::Ref<Eigen::VectorXd> x) const {
  for (const Group& g : groups_) {
    for (int d = 0; d < 2; ++d) {
      double avg = 0.0;
      for (int r = 0; r < 3; ++r) avg += g.weight[r] * x[static_cast<Eigen::Index>(2 * g.vertex[r] + d)];
      for (int r = 0; r < 3; ++r) x[static_cast<Eigen::Index>(2 * g.vertex[r] + d)] = avg;
    }
  }
}

void ProjectionP::apply_transpose_in_place(Eigen::Ref<Eigen::VectorXd> x) const {
  for (const Group& g : groups_) {
    for (int d = 0; d < 2; ++d) {
      double sum = 0.0;
      for (int r = 0; r < 3; ++r) sum += x[static_cast<Eigen::Index>(2 * g.vertex[r] + d)];
      for (int r = 0; r < 3; ++r) x[static_cast<Eigen::Index>(2 * g.vertex[r] + d)] = g.weight[r] * sum;
    }
  }
}

Eigen::VectorXd ProjectionP::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  apply_in_place(y);
  return y;
}

Eigen::VectorXd ProjectionP::apply_transpose(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  apply_transpose_in_place(y);
  return y;
}

SparseMatrix ProjectionP::matrix(std::size_t n) const {
  std::vector<bool> grouped(n, false);
  std::vector<Triplet> trip;
  for (const Group& g : groups_) {
    for (int d = 0; d < 2; ++d) {
      for (int r = 0; r < 3; ++r) {
        const auto row = static_cast<Eigen::Index>(2 * g.vertex[r] + d);
        grouped[static_cast<std::size_t>(row)] = true;
        for (int s = 0; s < 3; ++s) trip.emplace_back(row, static_cast<Eigen::Index>(2 * g.vertex[s] + d), g.weight[s]);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!grouped[i]) trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), 1.0);
  SparseMatrix P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

Eigen::VectorXd expand(const Eigen::VectorXd& reduced, std::size_t phases) {
  const Eigen::Index K = reduced.size() / static_cast<Eigen::Index>(phases - 1);
  if (K * static_cast<Eigen::Index>(phases - 1) != reduced.size()) throw Error("expand: size mismatch");
  Eigen::VectorXd full(K * static_cast<Eigen::Index>(phases));
  full.head(reduced.size()) = reduced;
  Eigen::VectorXd last = Eigen::VectorXd::Zero(K);
  for (std::size_t l = 0; l + 1 < phases; ++l) last -= reduced.segment(static_cast<Eigen::Index>(l) * K, K);
  full.tail(K) = last;
  return full;
}

Eigen::VectorXd reduce(const Eigen::VectorXd& full, std::size_t phases) {
  const Eigen::Index K = full.size() / static_cast<Eigen::Index>(phases);
  if (K * static_cast<Eigen::Index>(phases) != full.size()) throw Error("reduce: size mismatch");
  return full.head(K * static_cast<Eigen::Index>(phases - 1));
}

Mat2 segment_stiffness(const Vec2& q1, const Vec2& q2, const AnisotropyComponent& component, double scale) {
  const Vec2 h = q2 - q1;
  const double q = h.dot(component.G_tilde() * h);
  if (!(q > 0.0)) throw Error("zero-length segment");
  return scale * component.G_tilde() / std::sqrt(q);
}

BlockSystem assemble_blocks(const BulkMesh& mesh, const CurveNetwork& network, const std::vector<CurveParams>& params,
                            const AssemblyOptions& options) {
  if (!(options.tau > 0.0)) throw Error("assemble_blocks: tau must be positive");
  if (params.size() != network.curves.size()) throw Error("assemble_blocks: one parameter set per curve required");
  if (network.orientation.curves() != network.curves.size()) throw Error("assemble_blocks: dimension mismatch");

  BlockSystem s;
  s.layout = make_layout(mesh, network);
  s.orientation = network.orientation;
  s.options = options;
  const std::size_t n = s.layout.curve_vertices;

  s.A = assemble_stiffness(mesh);

  CurveField<Vec2> omega(network.curves.size());
  for (std::size_t c = 0; c < network.curves.size(); ++c) omega[c] = vertex_normals(network.curves[c]);
  if (options.quadrature == Quadrature::Exact) {
    const TriangleLocator locator(mesh);
    s.B = assemble_cross_mass(mesh, network, clip_segments(mesh, network, locator), Quadrature::Exact);
  } else {
    const TriangleLocator locator(mesh);
    s.B = assemble_cross_mass_lumped(mesh, network, locator);
  }
  s.N = assemble_N(s.B, omega, options.tau);

  s.mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.kinetic_mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.omega.resize(n);
  s.X.resize(static_cast<Eigen::Index>(2 * n));
  std::vector<Triplet> etrip;
  for (std::size_t c = 0; c < network.curves.size(); ++c) {
    const Curve& curve = network.curves[c];
    const std::size_t off = s.layout.curve_offset[c];
    for (std::size_t k = 0; k < curve.num_vertices(); ++k) {
      s.omega[off + k] = omega[c][k];
      s.X.segment<2>(static_cast<Eigen::Index>(2 * (off + k))) = curve.vertices[k];
    }
    for (std::size_t j = 0; j < curve.num_segments(); ++j) {
      const auto [a, b] = curve.segment(j);
      const Vec2& qa = curve.vertices[a];
      const Vec2& qb = curve.vertices[b];
      const double len = (qb - qa).norm();
      const auto ga = static_cast<Eigen::Index>(off + a);
      const auto gb = static_cast<Eigen::Index>(off + b);
      s.mass[ga] += 0.5 * len;
      s.mass[gb] += 0.5 * len;
      const double kin = 0.5 * len * params[c].rho / params[c].beta.eval(segment_normal(qa, qb));
      s.kinetic_mass[ga] += kin;
      s.kinetic_mass[gb] += kin;
      Mat2 K = Mat2::Zero();
      for (const auto& comp : params[c].gamma.components()) K += segment_stiffness(qa, qb, comp, params[c].gamma.scale());
      for (int r = 0; r < 2; ++r) {
        for (int q = 0; q < 2; ++q) {
          etrip.emplace_back(2 * ga + r, 2 * ga + q, K(r, q));
          etrip.emplace_back(2 * gb + r, 2 * gb + q, K(r, q));
          etrip.emplace_back(2 * ga + r, 2 * gb + q, -K(r, q));
          etrip.emplace_back(2 * gb + r, 2 * ga + q, -K(r, q));
        }
      }
    }
  }
  s.E.resize(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
  s.E.setFromTriplets(etrip.begin(), etrip.end());

  s.dirichlet.assign(mesh.num_vertices(), false);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) s.dirichlet[v] = options.boundary.is_dirichlet(mesh, v);
  s.P = ProjectionP(network, s.layout);
  return s;
}

ReducedSystem build_reduced_system(const BlockSystem& s) {
  const DofLayout& L = s.layout;
  const std::size_t R = L.phases;
  const auto K = static_cast<Eigen::Index>(L.bulk);
  const auto kap = static_cast<Eigen::Index>(L.kappa_offset());
  const auto xo = static_cast<Eigen::Index>(L.x_offset());
  const double tau = s.options.tau;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(s.A.nonZeros()) * (R - 1) + 8 * L.curve_vertices +
               static_cast<std::size_t>(s.E.nonZeros()));
  for (std::size_t l = 0; l + 1 < R; ++l) {
    const Eigen::Index off = static_cast<Eigen::Index>(l) * K;
    for (Eigen::Index col = 0; col < s.A.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(s.A, col); it; ++it) trip.emplace_back(off + it.row(), off + col, it.value());
  }
  for (std::size_t c = 0; c < s.B.size(); ++c) {
    const auto coff = static_cast<Eigen::Index>(L.curve_offset[c]);
    const int last = s.orientation(R - 1, c);
    for (std::size_t l = 0; l + 1 < R; ++l) {
      const Eigen::Index off = static_cast<Eigen::Index>(l) * K;
      const int o = s.orientation(l, c);
      if (o != 0) {
        for (Eigen::Index col = 0; col < s.N[c].outerSize(); ++col)
          for (SparseMatrix::InnerIterator it(s.N[c], col); it; ++it)
            trip.emplace_back(off + col, xo + 2 * coff + it.row(), o * it.value());
      }
      const int ob = o - last;
      if (ob != 0) {
        for (Eigen::Index col = 0; col < s.B[c].outerSize(); ++col)
          for (SparseMatrix::InnerIterator it(s.B[c], col); it; ++it)
            trip.emplace_back(kap + coff + it.row(), off + col, ob * it.value());
      }
    }
  }
  for (std::size_t g = 0; g < L.curve_vertices; ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    trip.emplace_back(kap + gi, kap + gi, s.mass[gi]);
    for (int d = 0; d < 2; ++d) {
      if (s.kinetic_mass[gi] != 0.0) trip.emplace_back(kap + gi, xo + 2 * gi + d, -s.kinetic_mass[gi] * s.omega[g][d] / tau);
      trip.emplace_back(xo + 2 * gi + d, kap + gi, s.mass[gi] * s.omega[g][d]);
    }
  }
  for (Eigen::Index col = 0; col < s.E.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.E, col); it; ++it) trip.emplace_back(xo + it.row(), xo + col, it.value());

  ReducedSystem out;
  out.layout = L;
  out.P = s.P;
  const auto n = static_cast<Eigen::Index>(L.size());
  out.rhs0 = Eigen::VectorXd::Zero(n);
  out.rhs0.tail(static_cast<Eigen::Index>(2 * L.curve_vertices)) = -(s.E * s.X);

  const BoundarySpec& bc = s.options.boundary;
  if (bc.side != DirichletSide::None) {
    std::vector<bool> fixed_row(static_cast<std::size_t>(n), false);
    for (std::size_t l = 0; l + 1 < R; ++l)
      for (std::size_t v = 0; v < L.bulk; ++v)
        if (s.dirichlet[v]) fixed_row[l * L.bulk + v] = true;
    std::erase_if(trip, [&](const Triplet& t) { return fixed_row[static_cast<std::size_t>(t.row())]; });
    for (std::size_t l = 0; l + 1 < R; ++l) {
      for (std::size_t v = 0; v < L.bulk; ++v) {
        if (!s.dirichlet[v]) continue;
        const auto r = static_cast<Eigen::Index>(l * L.bulk + v);
        trip.emplace_back(r, r, 1.0);
        out.rhs0[r] = bc.w_D[l];
      }
    }
  }
  out.M0.resize(n, n);
  out.M0.setFromTriplets(trip.begin(), trip.end());
  out.M0.makeCompressed();
  return out;
}

void ReducedSystem::project_unknowns(Eigen::Ref<Eigen::VectorXd> x) const {
  P.apply_in_place(x.tail(static_cast<Eigen::Index>(2 * layout.curve_vertices)));
}

void ReducedSystem::project_rows(Eigen::Ref<Eigen::VectorXd> r) const {
  P.apply_transpose_in_place(r.tail(static_cast<Eigen::Index>(2 * layout.curve_vertices)));
}

Eigen::VectorXd ReducedSystem::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  project_unknowns(y);
  Eigen::VectorXd r = M0 * y;
  project_rows(r);
  return r;
}

Eigen::VectorXd ReducedSystem::rhs() const {
  Eigen::VectorXd r = rhs0;
  project_rows(r);
  return r;
}

SchemeResidual scheme_residual(const BlockSystem& s, const Eigen::VectorXd& W_full, const Eigen::VectorXd& kappa,
                               const Eigen::VectorXd& deltaX) {
  const DofLayout& L = s.layout;
  const std::size_t R = L.phases;
  const auto K = static_cast<Eigen::Index>(L.bulk);
  const auto n = static_cast<Eigen::Index>(L.curve_vertices);
  if (W_full.size() != K * static_cast<Eigen::Index>(R) || kappa.size() != n || deltaX.size() != 2 * n) {
    throw Error("scheme_residual: size mismatch");
  }
  SchemeResidual res;

  // Motion law, tested with sum-free vector test functions vanishing on the Dirichlet part.
  std::vector<Eigen::VectorXd> r(R);
  double scale = 0.0;
  for (std::size_t l = 0; l < R; ++l) {
    const Eigen::VectorXd AW = s.A * W_full.segment(static_cast<Eigen::Index>(l) * K, K);
    Eigen::VectorXd coupling = Eigen::VectorXd::Zero(K);
    for (std::size_t c = 0; c < s.N.size(); ++c) {
      const int o = s.orientation(l, c);
      if (o == 0) continue;
      const auto coff = static_cast<Eigen::Index>(L.curve_offset[c]);
      coupling += o * (s.N[c].transpose() * deltaX.segment(2 * coff, s.N[c].rows()));
    }
    scale = std::max({scale, AW.cwiseAbs().maxCoeff(), coupling.cwiseAbs().maxCoeff()});
    r[l] = AW + coupling;
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(K);
  for (const auto& v : r) mean += v / static_cast<double>(R);
  double motion = 0.0;
  for (std::size_t l = 0; l < R; ++l) {
    for (Eigen::Index v = 0; v < K; ++v) {
      if (s.dirichlet[static_cast<std::size_t>(v)]) {
        const double wd = s.options.boundary.w_D[l];
        motion = std::max(motion, std::abs(W_full[static_cast<Eigen::Index>(l) * K + v] - wd) / std::max(1.0, std::abs(wd)));
      } else {
        motion = std::max(motion, std::abs(r[l][v] - mean[v]) / std::max(scale, 1e-300));
      }
    }
  }
  res.motion = motion;

  // Gibbs-Thomson law on every curve vertex.
  Eigen::VectorXd gt = s.mass.cwiseProduct(kappa);
  double gscale = gt.cwiseAbs().maxCoeff();
  for (std::size_t c = 0; c < s.B.size(); ++c) {
    const auto coff = static_cast<Eigen::Index>(L.curve_offset[c]);
    const Eigen::Index nc = s.B[c].rows();
    for (std::size_t l = 0; l < R; ++l) {
      const int o = s.orientation(l, c);
      if (o == 0) continue;
      gt.segment(coff, nc) += o * (s.B[c] * W_full.segment(static_cast<Eigen::Index>(l) * K, K));
    }
  }
  for (Eigen::Index g = 0; g < n; ++g) {
    const double kin = s.kinetic_mass[g] / s.options.tau * s.omega[static_cast<std::size_t>(g)].dot(deltaX.segment<2>(2 * g));
    gscale = std::max(gscale, std::abs(kin));
    gt[g] -= kin;
  }
  res.gibbs_thomson = gt.cwiseAbs().maxCoeff() / std::max(gscale, 1e-300);

  // Curvature equation on the junction-matched space.
  Eigen::VectorXd cv = s.E * (s.X + deltaX);
  const double cscale = std::max((s.E * s.X).cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index g = 0; g < n; ++g) cv.segment<2>(2 * g) += s.mass[g] * kappa[g] * s.omega[static_cast<std::size_t>(g)];
  s.P.apply_transpose_in_place(cv);
  res.curvature = cv.cwiseAbs().maxCoeff() / cscale;
  return res;
}

}  // namespace msflow

#pragma once

#include "msflow/anisotropy.hpp"
#include "msflow/bulk_mesh.hpp"
#include "msflow/common.hpp"
#include "msflow/coupling.hpp"
#include "msflow/curve_network.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <vector>

namespace msflow {

/// Material data attached to one curve.
struct CurveParams {
  Anisotropy gamma = Anisotropy::isotropic();
  double rho = 0.0;
  Mobility beta = Mobility::constant(1.0);
};

/// Unknown layout of the reduced system: (W_1..W_{I_R-1}, kappa, deltaX) with deltaX
/// interleaved (x, y) per curve vertex and curves concatenated.
struct DofLayout {
  std::size_t bulk = 0;    ///< K
  std::size_t phases = 0;  ///< I_R
  std::vector<std::size_t> curve_offset;  ///< first global curve vertex of each curve
  std::size_t curve_vertices = 0;         ///< N

  std::size_t reduced_bulk() const { return (phases - 1) * bulk; }
  std::size_t kappa_offset() const { return reduced_bulk(); }
  std::size_t x_offset() const { return reduced_bulk() + curve_vertices; }
  std::size_t size() const { return reduced_bulk() + 3 * curve_vertices; }
};

DofLayout make_layout(const BulkMesh& mesh, const CurveNetwork& network);

/// Lumped-mass orthogonal projection onto vertex fields that agree at every junction.
class ProjectionP {
 public:
  struct Group {
    std::array<std::size_t, 3> vertex;  ///< global curve vertex ids
    std::array<double, 3> weight;       ///< lumped masses normalised to sum one
  };

  ProjectionP() = default;
  ProjectionP(const CurveNetwork& network, const DofLayout& layout);

  /// x holds 2N interleaved components.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;
  void apply_in_place(Eigen::Ref<Eigen::VectorXd> x) const;
  void apply_transpose_in_place(Eigen::Ref<Eigen::VectorXd> x) const;
  SparseMatrix matrix(std::size_t n) const;

  const std::vector<Group>& groups() const { return groups_; }

 private:
  std::vector<Group> groups_;
};

/// expand: (W_1..W_{I_R-1}) -> (W_1, .., W_{I_R-1}, -sum W_l); component-major storage.
Eigen::VectorXd expand(const Eigen::VectorXd& reduced, std::size_t phases);
Eigen::VectorXd reduce(const Eigen::VectorXd& full, std::size_t phases);

struct AssemblyOptions {
  double tau = 1e-3;
  Quadrature quadrature = Quadrature::Exact;
  BoundarySpec boundary;
};

struct BlockSystem {
  DofLayout layout;
  OrientationMatrix orientation;
  AssemblyOptions options;
  SparseMatrix A;                   ///< K x K stiffness, no boundary conditions
  std::vector<SparseMatrix> B;      ///< per curve, n_c x K
  std::vector<SparseMatrix> N;      ///< per curve, 2 n_c x K, includes 1/tau
  Eigen::VectorXd mass;             ///< N, lumped vertex masses (C is diag(mass))
  std::vector<Vec2> omega;          ///< N, vertex normals
  Eigen::VectorXd kinetic_mass;     ///< N, (1/2) sum |sigma| rho / beta(nu_sigma)
  SparseMatrix E;                   ///< 2N x 2N anisotropic curve stiffness
  Eigen::VectorXd X;                ///< 2N, current vertex positions
  std::vector<bool> dirichlet;      ///< K, Dirichlet node flags
  ProjectionP P;
};

/// Element stiffness of E on one segment for one anisotropy: K = scale * G~ / sqrt(h . G~ h);
/// the 4x4 element matrix is [[K, -K], [-K, K]].
Mat2 segment_stiffness(const Vec2& q1, const Vec2& q2, const AnisotropyComponent& component, double scale);

BlockSystem assemble_blocks(const BulkMesh& mesh, const CurveNetwork& network, const std::vector<CurveParams>& params,
                            const AssemblyOptions& options);

/// Reduced system with P acting on the deltaX unknowns (right) and P^T on the
/// position rows (left): op(x) = L(M0 R x), rhs = L(rhs0).
struct ReducedSystem {
  DofLayout layout;
  SparseMatrix M0;  ///< reduced block matrix without projections, Dirichlet rows applied
  Eigen::VectorXd rhs0;
  ProjectionP P;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd rhs() const;
  void project_unknowns(Eigen::Ref<Eigen::VectorXd> x) const;
  void project_rows(Eigen::Ref<Eigen::VectorXd> r) const;
};

ReducedSystem build_reduced_system(const BlockSystem& blocks);

/// Residuals of the three discrete equations, re-evaluated from the blocks with the
/// full set of I_R potentials. Each entry is a max-norm scaled by the matching RHS size.
struct SchemeResidual {
  double motion = 0.0;
  double gibbs_thomson = 0.0;
  double curvature = 0.0;
};

SchemeResidual scheme_residual(const BlockSystem& blocks, const Eigen::VectorXd& W_full,
                               const Eigen::VectorXd& kappa, const Eigen::VectorXd& deltaX);

}  // namespace msflow

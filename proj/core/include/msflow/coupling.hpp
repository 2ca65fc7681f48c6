#pragma once

#include "msflow/bulk_mesh.hpp"
#include "msflow/common.hpp"
#include "msflow/curve_network.hpp"

#include <cstddef>
#include <vector>

namespace msflow {

/// Piece of a curve segment lying in a single bulk triangle.
struct SubSegment {
  std::size_t curve;
  std::size_t segment;
  double a;  ///< parameter interval [a, b] within the segment, t in [0, 1]
  double b;
  int host;
};

/// Splits every curve segment at the bulk triangle edges it crosses.
/// Throws "interface left domain" if a segment leaves the closed square.
std::vector<SubSegment> clip_segments(const BulkMesh& mesh, const CurveNetwork& network);
std::vector<SubSegment> clip_segments(const BulkMesh& mesh, const CurveNetwork& network,
                                      const TriangleLocator& locator);

enum class Quadrature { Exact, Lumped };

/// [B_c]_{k,j} = (Psi_j, Phi_{c,k})^{(h)} on curve c; one (n_c x K) matrix per curve.
std::vector<SparseMatrix> assemble_cross_mass(const BulkMesh& mesh, const CurveNetwork& network,
                                              const std::vector<SubSegment>& pieces, Quadrature quadrature);
/// Lumped variant only needs point location.
std::vector<SparseMatrix> assemble_cross_mass_lumped(const BulkMesh& mesh, const CurveNetwork& network,
                                                     const TriangleLocator& locator);

/// [N_c]_{l,i} = (1/tau) [B_c]_{l,i} omega_c(q_l), stored as a (2 n_c x K) matrix whose
/// rows 2l and 2l+1 hold the x and y components.
std::vector<SparseMatrix> assemble_N(const std::vector<SparseMatrix>& cross_mass,
                                     const CurveField<Vec2>& omega, double tau);

}  // namespace msflow

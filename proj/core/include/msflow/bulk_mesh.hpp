#pragma once

#include "msflow/common.hpp"
#include "msflow/curve_network.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace msflow {

/// Conforming triangulation of (-4,4)^2. Triangles are stored counter-clockwise as
/// (v0, v1, v2) with v0 the newest vertex, so v1-v2 is the refinement edge.
struct BulkMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> levels;  ///< bisection generation relative to the coarse base
  int coarse_level = 0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double area(std::size_t t) const;
  double diameter(std::size_t t) const;
  bool on_boundary(std::size_t v) const;
  /// Barycentric coordinates of x with respect to triangle t.
  std::array<double, 3> barycentric(std::size_t t, const Vec2& x) const;
};

/// Uniform criss-cross triangulation with 2^level squares per side (two triangles each).
BulkMesh build_initial(int level);

struct AdaptParams {
  int coarse_level = 4;        ///< base squares of side 8/2^coarse_level
  double h_fine = 8.0 / 128.0;  ///< max diameter of triangles near the interface
  double band_width = 2.0 * 8.0 / 128.0;
};

struct AdaptResult {
  BulkMesh mesh;
  bool warning = false;  ///< nothing was flagged for refinement
};

/// Refines the coarse base by newest-vertex bisection until every triangle within
/// band_width of the network has diameter <= h_fine. Always starts over from the base,
/// so triangles that left the band are coarsened automatically.
AdaptResult adapt(const BulkMesh& base, const CurveNetwork& network, const AdaptParams& params);
AdaptResult adapt(const CurveNetwork& network, const AdaptParams& params);

/// Checks conformity (every interior edge shared by exactly two triangles), positive
/// areas and total area; returns an empty string when valid.
std::string check_mesh(const BulkMesh& mesh);

/// P1 stiffness matrix (no boundary conditions).
SparseMatrix assemble_stiffness(const BulkMesh& mesh);

/// Uniform bucket grid over the triangles, for point and segment queries.
class TriangleLocator {
 public:
  explicit TriangleLocator(const BulkMesh& mesh);

  /// Lowest-index triangle containing x (tolerance tol in barycentric coordinates), or -1.
  int locate(const Vec2& x, double tol = 1e-12) const;
  /// Triangles whose bounding box meets the bounding box of segment a-b.
  std::vector<int> candidates(const Vec2& a, const Vec2& b) const;

 private:
  std::size_t cell_index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n_ + ix; }
  int clamp_cell(double coord) const;

  const BulkMesh* mesh_;
  int n_ = 1;
  double cell_ = 8.0;
  std::vector<std::vector<int>> buckets_;
};

/// Nodal interpolation of a P1 field from one mesh onto another.
std::vector<double> transfer(const BulkMesh& from, const std::vector<double>& values, const BulkMesh& to);

enum class DirichletSide { None, All, Right };

struct BoundarySpec {
  DirichletSide side = DirichletSide::None;
  std::vector<double> w_D;  ///< one value per phase, summing to zero

  bool is_dirichlet(const BulkMesh& mesh, std::size_t v) const;
  /// Throws ConfigError when w_D does not sum to zero.
  void validate(std::size_t phases) const;
};

std::string to_string(DirichletSide side);
DirichletSide dirichlet_side_from_string(const std::string& name);

/// Replaces rows of the Dirichlet nodes of a square system block by identity rows
/// and writes the boundary values into rhs. `offset` locates the block inside the system.
void dirichlet_apply(std::vector<Triplet>& triplets, Eigen::VectorXd& rhs, const BulkMesh& mesh,
                     const BoundarySpec& spec, std::size_t offset, double value);

}  // namespace msflow

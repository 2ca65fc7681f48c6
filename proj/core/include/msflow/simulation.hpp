#pragma once

#include "msflow/bulk_mesh.hpp"
#include "msflow/common.hpp"
#include "msflow/curve_network.hpp"
#include "msflow/solver.hpp"
#include "msflow/system_assembly.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace msflow {

struct SurgeryConfig {
  bool enabled = true;
  double min_length_factor = 5.0;  ///< epsilon_s = factor * mean initial segment length
  std::size_t min_vertices = 4;
};

struct SimulationConfig {
  AssemblyOptions assembly;
  AdaptParams mesh;
  SolverConfig solver;
  SurgeryConfig surgery;
  double T = 1.0;
  bool timing = true;  ///< record wall-clock times (off for byte-identical outputs)
};

/// Terms of the discrete stability estimate for one step.
struct DissipationTerms {
  double length_before = 0.0;  ///< |Gamma^m|_gamma
  double length_after = 0.0;   ///< |Gamma^{m+1}|_gamma
  double grad_w_sq = 0.0;      ///< tau ||grad W^{m+1}||^2
  double kinetic = 0.0;        ///< tau (rho/beta |deltaX . omega / tau|^2)^h
  double wd_term = 0.0;        ///< sum_l w_D,l sum_i [chi_l]_{Gamma_i} (deltaX . omega, 1)^h
  double slack = 0.0;          ///< length_before - (everything else)
  bool ok = true;              ///< slack >= -1e-9 max(1, length_before)
};

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double aniso_length = 0.0;
  double energy = 0.0;
  std::vector<double> areas;
  DissipationTerms dissipation;
  SolverStats solver;
  SchemeResidual scheme;
  double wall_ms = 0.0;
  std::vector<SurgeryEvent> surgery;
};

struct ExtinctionRecord {
  std::size_t step;
  double t;
  SurgeryEvent event;
};

struct SimulationState {
  std::size_t step = 0;
  double t = 0.0;
  CurveNetwork network;
  std::vector<CurveParams> params;
  BulkMesh mesh;
  Eigen::VectorXd W;  ///< all I_R components on `mesh`, component-major
  CurveField<double> kappa;
  double surgery_min_length = 0.0;
  std::vector<StepRecord> history;
  std::vector<ExtinctionRecord> extinctions;
  std::shared_ptr<PreconditionerCache> preconditioner = std::make_shared<PreconditionerCache>();
};

/// E^m = |Gamma^m|_gamma - sum_l w_D,l vol(R_l^m); w_D counts only with a Dirichlet part.
double discrete_energy(const CurveNetwork& network, const std::vector<CurveParams>& params,
                       const BoundarySpec& boundary);

/// Builds the initial mesh and diagnostics record (step 0).
SimulationState initialize(CurveNetwork network, std::vector<CurveParams> params, const SimulationConfig& config);

/// Evaluates the stability estimate for a step computed from `blocks` (assembled on Gamma^m).
DissipationTerms check_dissipation(const BlockSystem& blocks, const CurveNetwork& before, const CurveNetwork& after,
                                   const std::vector<CurveParams>& params, const Eigen::VectorXd& W_full,
                                   const Eigen::VectorXd& deltaX);

/// Result of one solve on a fixed network and mesh, before moving the curves.
struct StepSolution {
  BlockSystem blocks;
  Eigen::VectorXd W_full;
  Eigen::VectorXd kappa;
  Eigen::VectorXd deltaX;
  SolverStats stats;
};

/// Key for reusing the least-squares factorisation: mesh and curve topology.
std::size_t topology_key(const BulkMesh& mesh, const CurveNetwork& network);

StepSolution solve_step(const BulkMesh& mesh, const CurveNetwork& network, const std::vector<CurveParams>& params,
                        const SimulationConfig& config, PreconditionerCache* cache = nullptr);

/// Moves every vertex by its displacement (interleaved, curves concatenated).
CurveNetwork displace(const CurveNetwork& network, const Eigen::VectorXd& deltaX);

/// One time step: solve, move the curves, check stability, apply surgery, adapt the mesh.
const StepRecord& step(SimulationState& state, const SimulationConfig& config);

/// Number of uniform steps to reach T.
std::size_t num_steps(const SimulationConfig& config);

}  // namespace msflow

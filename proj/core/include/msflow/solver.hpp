#pragma once

#include "msflow/common.hpp"
#include "msflow/system_assembly.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>

namespace msflow {

enum class SolverMethod { GmresLsq, GmresNone, MergedDirect };

std::string to_string(SolverMethod method);
SolverMethod solver_method_from_string(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::GmresLsq;
  double tol = 1e-10;  ///< relative residual
  int max_iterations = 2000;
  int restart = 100;
  bool fallback = true;  ///< use the merged direct solve when GMRES fails
  bool reuse_preconditioner = true;  ///< keep the factorisation while the cache key is unchanged
};

struct SolverStats {
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual ||b - Ax|| / ||b||
  bool converged = false;
  bool used_fallback = false;
  bool refactorized = false;
  std::string message;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Restarted GMRES with right preconditioning (modified Gram-Schmidt, Givens rotations).
/// `precond` may be empty. Returns the best iterate; stats.converged tells whether tol was met.
Eigen::VectorXd gmres_solve(const LinearOperator& op, const Eigen::VectorXd& b, const LinearOperator& precond,
                            const SolverConfig& config, SolverStats& stats);

/// Minimum-norm least-squares solve with a sparse QR factorisation of the unprojected
/// reduced matrix. The numerical null space (tangential modes of straight curves, for
/// instance) is projected out of the basic solution.
class LsqPreconditioner {
 public:
  LsqPreconditioner();
  ~LsqPreconditioner();
  LsqPreconditioner(const LsqPreconditioner&) = delete;
  LsqPreconditioner& operator=(const LsqPreconditioner&) = delete;

  /// Returns false (and leaves the preconditioner as identity) if factorisation fails or
  /// does not reproduce a consistent right-hand side.
  bool compute(const SparseMatrix& M0);
  Eigen::VectorXd apply(const Eigen::VectorXd& b) const;
  bool ok() const { return ok_; }
  long rank() const;
  long nullity() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  bool ok_ = false;
};

/// Factorises a well-conditioned banded matrix and checks the solve. Fails on hosts whose
/// BLAS kernels return wrong results.
bool lsq_factorization_self_test();

/// Identifies the three matched position dofs of every junction, solves the
/// resulting square system directly and expands back; junction images coincide bitwise.
Eigen::VectorXd merged_dof_solve(const ReducedSystem& system);

/// Least-squares factorisation kept between solves. `key` identifies the mesh and curve
/// topology it was computed for.
struct PreconditionerCache {
  LsqPreconditioner pre;
  std::size_t key = 0;
  bool valid = false;
  std::size_t factorizations = 0;
};

/// Solves the reduced system with the configured method. The returned vector has
/// P already applied to the position block. With a cache and an unchanged key the old
/// factorisation preconditions the new matrix; if GMRES then fails it is recomputed once.
Eigen::VectorXd solve_reduced(const ReducedSystem& system, const SolverConfig& config, SolverStats& stats,
                              PreconditionerCache* cache = nullptr, std::size_t key = 0);

}  // namespace msflow

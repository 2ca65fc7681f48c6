#include "msflow/solver.hpp"

#include <Eigen/Householder>
#include <Eigen/QR>
#include <Eigen/SparseLU>

#include <SuiteSparseQR.hpp>

#include <cmath>
#include <vector>

namespace msflow {

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::GmresLsq:
      return "gmres+lsq-precond";
    case SolverMethod::GmresNone:
      return "gmres+none";
    case SolverMethod::MergedDirect:
      return "merged-direct";
  }
  return "gmres+lsq-precond";
}

SolverMethod solver_method_from_string(const std::string& name) {
  if (name == "gmres+lsq-precond") return SolverMethod::GmresLsq;
  if (name == "gmres+none") return SolverMethod::GmresNone;
  if (name == "merged-direct") return SolverMethod::MergedDirect;
  throw ConfigError("unknown solver method '" + name + "'");
}

Eigen::VectorXd gmres_solve(const LinearOperator& op, const Eigen::VectorXd& b, const LinearOperator& precond,
                            const SolverConfig& config, SolverStats& stats) {
  if (!(config.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const Eigen::Index n = b.size();
  const int m = std::max(1, config.restart);
  stats = SolverStats{};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    stats.converged = true;
    return x;
  }
  auto M = [&](const Eigen::VectorXd& v) { return precond ? precond(v) : v; };

  Eigen::MatrixXd V(n, m + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);
  Eigen::VectorXd r = b - op(x);
  double rnorm = r.norm();
  while (stats.iterations < config.max_iterations) {
    if (rnorm <= config.tol * bnorm) break;
    V.col(0) = r / rnorm;
    g.setZero();
    g[0] = rnorm;
    H.setZero();
    int j = 0;
    bool breakdown = false;
    for (; j < m && stats.iterations < config.max_iterations; ++j) {
      ++stats.iterations;
      Eigen::VectorXd w = op(M(V.col(j)));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V.col(i));
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);
      else breakdown = true;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double d = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = d > 0.0 ? H(j, j) / d : 1.0;
      sn[j] = d > 0.0 ? H(j + 1, j) / d : 0.0;
      H(j, j) = d;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= config.tol * bnorm || breakdown) {
        ++j;
        break;
      }
    }
    // Solve the upper-triangular least-squares system, skipping zero pivots.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = H(i, i) != 0.0 ? s / H(i, i) : 0.0;
    }
    x += M(V.leftCols(j) * y);
    r = b - op(x);
    rnorm = r.norm();
    if (breakdown) {
      if (rnorm > config.tol * bnorm) stats.message = "GMRES breakdown";
      break;
    }
  }
  stats.residual = rnorm / bnorm;
  stats.converged = stats.residual <= config.tol;
  if (!stats.converged && stats.message.empty()) stats.message = "GMRES did not converge";
  return x;
}

struct LsqPreconditioner::Impl {
  using LongMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, SuiteSparse_long>;

  cholmod_common cc{};
  SuiteSparseQR_factorization<double>* qr = nullptr;
  LongMatrix M;
  Eigen::MatrixXd Z;  ///< orthonormal basis of the numerical null space
  long rank = 0;

  Impl() { cholmod_l_start(&cc); }
  ~Impl() {
    release();
    cholmod_l_finish(&cc);
  }
  void release() {
    if (qr) SuiteSparseQR_free<double>(&qr, &cc);
    qr = nullptr;
  }

  /// Basic least-squares solution E [R11^{-1} (Q^T b)_1; 0].
  Eigen::VectorXd basic(const Eigen::VectorXd& b) {
    Eigen::VectorXd rhs = b;
    cholmod_dense B{};
    B.nrow = B.d = B.nzmax = static_cast<std::size_t>(rhs.size());
    B.ncol = 1;
    B.x = rhs.data();
    B.xtype = CHOLMOD_REAL;
    B.dtype = CHOLMOD_DOUBLE;
    cholmod_dense* y = SuiteSparseQR_qmult<double>(SPQR_QTX, qr, &B, &cc);
    if (!y) throw Error("sparse QR: applying Q^T failed");
    cholmod_dense* x = SuiteSparseQR_solve<double>(SPQR_RETX_EQUALS_B, qr, y, &cc);
    cholmod_l_free_dense(&y, &cc);
    if (!x) throw Error("sparse QR: triangular solve failed");
    Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(static_cast<const double*>(x->x), rhs.size());
    cholmod_l_free_dense(&x, &cc);
    return out;
  }

  Eigen::VectorXd min_norm(const Eigen::VectorXd& b) {
    Eigen::VectorXd x = basic(b);
    if (Z.cols() > 0) x -= Z * (Z.transpose() * x);
    return x;
  }
};

LsqPreconditioner::LsqPreconditioner() : impl_(std::make_unique<Impl>()) {}
LsqPreconditioner::~LsqPreconditioner() = default;

bool LsqPreconditioner::compute(const SparseMatrix& M0) {
  Impl& d = *impl_;
  d.release();
  d.Z.resize(0, 0);
  ok_ = false;
  d.M = M0;
  d.M.makeCompressed();
  const Eigen::Index n = d.M.cols();
  if (d.M.rows() != n || n == 0) return false;

  cholmod_sparse A{};
  A.nrow = A.ncol = static_cast<std::size_t>(n);
  A.nzmax = static_cast<std::size_t>(d.M.nonZeros());
  A.p = d.M.outerIndexPtr();
  A.i = d.M.innerIndexPtr();
  A.x = d.M.valuePtr();
  A.stype = 0;
  A.itype = CHOLMOD_LONG;
  A.xtype = CHOLMOD_REAL;
  A.dtype = CHOLMOD_DOUBLE;
  A.sorted = 1;
  A.packed = 1;
  d.qr = SuiteSparseQR_factorize<double>(SPQR_ORDERING_DEFAULT, SPQR_DEFAULT_TOL, &A, &d.cc);
  if (!d.qr || d.cc.status != CHOLMOD_OK) {
    d.release();
    return false;
  }
  d.rank = static_cast<long>(d.qr->rank);

  try {
    // Columns beyond the numerical rank give null vectors p - S(M0 p).
    const long k = static_cast<long>(n) - d.rank;
    if (k > 0) {
      // Dead columns are those that Rmap squeezes past the live block of R.
      Eigen::MatrixXd Z(n, k);
      long found = 0;
      for (long j = 0; j < static_cast<long>(n) && found < k; ++j) {
        if (!d.qr->Rmap || d.qr->Rmap[j] < d.rank) continue;
        const long col = d.qr->Q1fill ? static_cast<long>(d.qr->Q1fill[j]) : j;
        Eigen::VectorXd p = Eigen::VectorXd::Unit(n, col);
        Z.col(found++) = p - d.basic(d.M * p);
      }
      if (found != k) throw Error("sparse QR: dead columns not found");
      Eigen::HouseholderQR<Eigen::MatrixXd> hqr(Z);
      d.Z = hqr.householderQ() * Eigen::MatrixXd::Identity(n, k);
    }

    // A consistent right-hand side must be reproduced; this also catches a defective BLAS.
    Eigen::VectorXd probe(n);
    for (Eigen::Index i = 0; i < n; ++i) probe[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
    const Eigen::VectorXd b = d.M * probe;
    const Eigen::VectorXd x = d.min_norm(b);
    if (!x.allFinite() || (d.M * x - b).norm() > 1e-8 * b.norm()) {
      d.release();
      return false;
    }
  } catch (const Error&) {
    d.release();
    return false;
  }
  ok_ = true;
  return true;
}

Eigen::VectorXd LsqPreconditioner::apply(const Eigen::VectorXd& b) const {
  if (!ok_) return b;
  return impl_->min_norm(b);
}

long LsqPreconditioner::rank() const { return ok_ ? impl_->rank : 0; }

long LsqPreconditioner::nullity() const { return ok_ ? static_cast<long>(impl_->Z.cols()) : 0; }

bool lsq_factorization_self_test() {
  // Banded nonsingular test matrix large enough to exercise blocked dense kernels.
  const int n = 300;
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - 40); j < std::min(n, i + 41); ++j) {
      t.emplace_back(i, j, i == j ? 100.0 : std::cos(0.37 * i + 1.3 * j));
    }
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  LsqPreconditioner pre;
  return pre.compute(A);
}

namespace {

/// Selection matrix S (full x merged) identifying matched position dofs.
SparseMatrix merge_matrix(const ReducedSystem& system) {
  const std::size_t n = system.layout.size();
  const std::size_t xo = system.layout.x_offset();
  std::vector<long> target(n, -1);
  for (const auto& g : system.P.groups()) {
    for (int d = 0; d < 2; ++d) {
      const std::size_t keep = xo + 2 * g.vertex[0] + d;
      for (int r = 1; r < 3; ++r) target[xo + 2 * g.vertex[r] + d] = static_cast<long>(keep);
    }
  }
  std::vector<long> col(n, -1);
  long next = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (target[i] < 0) col[i] = next++;
  std::vector<Triplet> trip;
  trip.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long c = target[i] < 0 ? col[i] : col[static_cast<std::size_t>(target[i])];
    trip.emplace_back(static_cast<Eigen::Index>(i), c, 1.0);
  }
  SparseMatrix S(static_cast<Eigen::Index>(n), next);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

}  // namespace

Eigen::VectorXd merged_dof_solve(const ReducedSystem& system) {
  const SparseMatrix S = merge_matrix(system);
  const SparseMatrix St = S.transpose();
  SparseMatrix Mm = St * system.M0 * S;
  Mm.makeCompressed();
  const Eigen::VectorXd bm = St * system.rhs0;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(Mm);
  lu.factorize(Mm);
  if (lu.info() != Eigen::Success) throw Error("merged system is singular: " + lu.lastErrorMessage());
  const Eigen::VectorXd y = lu.solve(bm);
  if (lu.info() != Eigen::Success || !y.allFinite()) throw Error("merged system solve failed");
  return S * y;
}

Eigen::VectorXd solve_reduced(const ReducedSystem& system, const SolverConfig& config, SolverStats& stats,
                              PreconditionerCache* cache, std::size_t key) {
  const Eigen::VectorXd b = system.rhs();
  const double bnorm = b.norm();
  auto finish_direct = [&](bool fallback) {
    Eigen::VectorXd x = merged_dof_solve(system);
    SolverStats direct;
    direct.iterations = stats.iterations;
    direct.refactorized = stats.refactorized;
    direct.residual = bnorm > 0.0 ? (b - system.apply(x)).norm() / bnorm : 0.0;
    direct.converged = true;
    direct.used_fallback = fallback;
    stats = direct;
    return x;
  };
  stats = SolverStats{};
  if (config.method == SolverMethod::MergedDirect) return finish_direct(false);

  const LinearOperator op = [&system](const Eigen::VectorXd& v) { return system.apply(v); };
  if (config.method == SolverMethod::GmresNone) {
    Eigen::VectorXd x = gmres_solve(op, b, LinearOperator{}, config, stats);
    if (!stats.converged && config.fallback) return finish_direct(true);
    system.project_unknowns(x);
    return x;
  }

  PreconditionerCache local;
  PreconditionerCache& c = cache ? *cache : local;
  auto factorize = [&] {
    c.valid = c.pre.compute(system.M0);
    c.key = key;
    ++c.factorizations;
    stats.refactorized = true;
  };
  const bool reuse = cache && config.reuse_preconditioner && c.valid && c.key == key;
  if (!reuse) factorize();

  auto attempt = [&] {
    LinearOperator precond;
    if (c.valid) precond = [&c](const Eigen::VectorXd& v) { return c.pre.apply(v); };
    SolverStats run;
    Eigen::VectorXd x = gmres_solve(op, b, precond, config, run);
    run.iterations += stats.iterations;
    run.refactorized = stats.refactorized;
    stats = run;
    return x;
  };
  Eigen::VectorXd x = attempt();
  if (!stats.converged && reuse) {
    factorize();
    x = attempt();
  }
  if (!c.valid) stats.message = "least-squares factorisation failed; identity preconditioner used";
  if (!stats.converged && config.fallback) return finish_direct(true);
  system.project_unknowns(x);
  return x;
}

}  // namespace msflow

#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "gstokes/ichol.hpp"
#include "gstokes/krylov.hpp"
#include "gstokes/stokes_assembly.hpp"

namespace gstokes {

enum class PrecondMode { pr, pgr };

struct PrecondConfig {
    double beta = 1.0;
    PrecondMode mode = PrecondMode::pr;
    /// Inner tolerance of the velocity-block solves.
    double tol_a = 1e-12;
    /// Inner tolerance of the pressure Schur solve.
    double tol_s = 1e-12;
    index_t max_inner = 200;
    /// Estimate the positive-definiteness certificate at setup. A violation
    /// is recorded, not thrown: the Schur solve itself reports indefiniteness.
    bool check_certificate = true;
    unsigned seed = 1234;
};

struct BetaEstimate {
    double value = 0.0;
    bool stagnated = false;
};

/// Automatic regularization weight:
///   max( trace(C)/trace(Q),
///        safety * lambda_max of the (B (A^{-1} x I3) B^T, Q) pencil,
///        1e-8 ).
/// The trace ratio matches beta Q to the stabilization block on average so
/// the preconditioned spectrum clusters at 1; the pencil term keeps the
/// Schur operator beta Q - B (A^{-1} x I3) B^T positive definite. The pencil
/// extreme comes from 30 generalized power iterations with PCG inner solves.
BetaEstimate beta_heuristic(const SaddleSystem& sys, double safety = 1.1,
                            unsigned seed = 1234);

/// Block-elimination application of the regularized saddle preconditioner:
/// the saddle operator with the stabilization block C replaced by beta Q.
/// Velocity solves run through IC(0)-preconditioned CG, one system per
/// component in pr mode or one three-column system in pgr mode; the pressure
/// stage is CG on the matrix-free Schur operator beta Q - sum_i B_i A^{-1}
/// B_i^T, preconditioned with IC(0) of the sparse surrogate
/// beta Q + B diag(A)^{-1} B^T.
///
/// Immutable after construction; concurrent apply/solve calls are safe and
/// share only the atomic work counters.
class RegularizedPrecond {
public:
    RegularizedPrecond(const SaddleSystem& sys, const PrecondConfig& cfg);

    /// z with P z = (saddle matrix) v up to the inner tolerances, computed in
    /// the fused form that never forms the saddle product explicitly. Used as
    /// the operator of the left-preconditioned outer iteration.
    BlockVector apply(const BlockVector& v) const;

    /// z approximating P^{-1} w for an arbitrary block vector. Used as the
    /// right preconditioner of the flexible outer iteration.
    BlockVector solve(const BlockVector& w) const;

    /// beta Q p - sum_i B_i A^{-1} (B_i^T p), matrix-free.
    std::vector<double> schur_apply(std::span<const double> p) const;

    /// Flattened adapters over [u1;u2;u3;p] vectors.
    LinOp fused_operator() const;  // v -> apply(v)
    LinOp solver_operator() const; // w -> solve(w)

    const SaddleSystem& system() const { return sys_; }
    const PrecondConfig& config() const { return cfg_; }
    double beta() const { return cfg_.beta; }
    PrecondMode mode() const { return cfg_.mode; }

    /// True when the setup estimate found beta * lambda_min(Q) strictly above
    /// lambda_max(B (A^{-1} x I3) B^T); meaningful only with check_certificate.
    bool certificate_ok() const { return certificate_ok_; }
    double certificate_lambda_max() const { return cert_lambda_max_; }
    double certificate_lambda_min_q() const { return cert_lambda_min_q_; }

    /// Passes over A's nonzeros inside inner solves since the last reset.
    /// One scalar matvec counts 1; one three-column block matvec counts 1,
    /// since it streams the matrix entries once.
    long long inner_a_sweeps() const;
    long long schur_iterations() const { return schur_iters_.load(); }
    long long inner_failures() const { return inner_failures_.load(); }
    void reset_counters() const;

private:
    std::vector<double> solve_a_scalar(std::span<const double> b,
                                       std::span<const double> x0) const;
    MultiVector solve_a_block(const MultiVector& H, const MultiVector* X0) const;
    std::vector<double> solve_schur(std::span<const double> rhs) const;
    void estimate_certificate();

    const SaddleSystem& sys_;
    PrecondConfig cfg_;
    ICholFactor ichol_a_;
    ICholFactor ichol_s_;
    bool certificate_ok_ = false;
    double cert_lambda_max_ = 0.0;
    double cert_lambda_min_q_ = 0.0;

    mutable std::atomic<long long> a_scalar_applies_{0};
    mutable std::atomic<long long> a_block_column_applies_{0};
    mutable std::atomic<long long> schur_iters_{0};
    mutable std::atomic<long long> inner_failures_{0};
};

/// Mode-checked entry points; the mode of pc must match.
BlockVector apply_pr(const RegularizedPrecond& pc, const BlockVector& v);
BlockVector apply_pgr(const RegularizedPrecond& pc, const BlockVector& v);

/// Sparse surrogate beta Q + B diag(A)^{-1} B^T used to precondition the
/// Schur stage; exposed for tests.
CsrMatrix schur_surrogate(const SaddleSystem& sys, double beta);

} // namespace gstokes

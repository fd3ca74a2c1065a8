#pragma once

#include <string>
#include <vector>

#include "gstokes/dense_matrix.hpp"
#include "gstokes/global_cg.hpp"
#include "gstokes/ichol.hpp"
#include "gstokes/lanczos.hpp"
#include "gstokes/multivector.hpp"

namespace gstokes {

// Recorded artifacts of a preconditioned global CG run on A X = R0 with zero
// start. The Krylov blocks use the split product P = G G^T (identity when G
// is null): K_1 = R0 and K_{i+1} = A (P^{-1} K_i). Desk-scale only, capped at
// n <= 500; all Gram matrices are built with dense factorizations.
struct DiagnosticsState {
    std::vector<MultiVector> K_blocks; // K_1 .. K_{k+1}
    std::vector<MultiVector> R_history; // R_0 .. R_k from the run
    MultiVector X_final;
    DenseMatrix gram_ainv; // (k+1)x(k+1), entries Trace(K_i^T A^{-1} K_j)
    DenseMatrix gram_pap;  // k x k, entries Trace(K_i^T P^{-1}AP^{-1} K_j)
    std::vector<double> psi; // Galerkin coefficients; empty if gram_pap singular
};

struct ErrorIdentityResult {
    double lhs = 0.0; // Trace(E_k^T A E_k) against a dense direct solution
    double rhs = 0.0; // 1 / (e1^T gram_ainv^{-1} e1)
    bool gram_singular = false;
};

struct LanczosData {
    TridiagMatrix T;     // from the recurrence in the P^{-1} inner product
    TridiagMatrix T_hat; // tridiagonal part of the inverted A^{-1} Gram
    double theta = 0.0;       // min eigenvalue of T_k (1.0 stands in at k = 0)
    double theta_tilde = 0.0; // max eigenvalue of the inverted Gram
    bool breakdown = false;
};

struct ResidualBoundResult {
    double residual_sq = 0.0; // Trace(R_k^T P^{-1} R_k) from the run
    double bound = 0.0;       // vandermonde_term * theta_tilde^{k+1} / theta^k
    double vandermonde_term = 0.0;
    double gram_term = 0.0; // same quantity from the A^{-1} Gram, cross-check
    LanczosData lanczos;
    bool degenerate = false; // singular Gram or Lanczos breakdown
};

// Run k iterations (no early stopping) and capture blocks, residuals, Grams.
DiagnosticsState record_pgcg_diagnostics(const CsrMatrix& A, const ICholFactor* G,
                                         const MultiVector& R0, index_t k);

// Largest normalized |<R_k, K_i>_{P^{-1}}| over i = 1..k at the given step.
// Once the residual has collapsed below 1e-13 of the initial one, violations
// are measured against the initial residual scale instead (a roundoff-sized
// residual has no meaningful direction).
double pgcg_orthogonality_check_at(const DiagnosticsState& state, const ICholFactor* G,
                                   index_t step);
double pgcg_orthogonality_check(const DiagnosticsState& state, const ICholFactor* G);

// Both sides of the error-norm formula at iteration k.
ErrorIdentityResult error_norm_identity(const CsrMatrix& A, const ICholFactor* G,
                                        const MultiVector& R0, index_t k);

// Actual squared P^{-1}-norm of R_k next to its spectral upper bound.
ResidualBoundResult residual_bound_check(const CsrMatrix& A, const ICholFactor* G,
                                         const MultiVector& R0, index_t k);

// Gram matrices, coefficients, and Lanczos data as CSV for offline inspection.
void write_diagnostics_csv(const std::string& path, const DiagnosticsState& state,
                           const LanczosData* lanczos = nullptr);

} // namespace gstokes

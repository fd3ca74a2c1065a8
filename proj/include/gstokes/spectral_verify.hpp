#pragma once

#include <string>
#include <vector>

#include "gstokes/dense_matrix.hpp"
#include "gstokes/stokes_assembly.hpp"

namespace gstokes {

/// Full saddle matrix [u1;u2;u3;p] as a dense oracle (N <= 2000).
DenseMatrix dense_saddle(const SaddleSystem& sys);

/// The regularized preconditioner: the saddle matrix with the stabilization
/// block replaced by beta Q.
DenseMatrix dense_pr(const SaddleSystem& sys, double beta);

/// S0 = B (A^{-1} x I3) B^T = sum_j B_j A^{-1} B_j^T, dense.
DenseMatrix dense_schur_s0(const SaddleSystem& sys);

struct EigenReport {
    double lambda = 0.0;
    double a = 0.0; // Rayleigh quotient of S0 at the eigenvector
    double c = 0.0; // of the stabilization block
    double q = 0.0; // of the pressure mass matrix
    double formula_residual = 0.0; // |lambda - (a - c)/(a + beta q)|
};

struct SignCheckReport {
    bool triggered = false;        // hypothesis threshold met on this system
    bool conclusion_holds = true;  // predicted sign observed (vacuous if untriggered)
    double lhs = 0.0;
    double rhs = 0.0;
};

struct Theorem21Report {
    double beta = 0.0;
    index_t n_u = 0;
    index_t n_p = 0;
    /// N - rank(C - beta Q): the eigenvalue-1 multiplicity of the
    /// preconditioned matrix, obtained structurally.
    index_t multiplicity_one = 0;
    bool stab_shift_nonsingular = false; // C - beta Q has full rank
    /// max over random u of ||Pr^{-1} A (u;0) - (u;0)|| / ||u||.
    double family_residual = 0.0;
    std::vector<EigenReport> pressure_modes;
    double max_formula_residual = 0.0;
    /// lambda_max(S0) < lambda_min(C)  =>  every pressure eigenvalue > 0.
    SignCheckReport positive_case;
    /// lambda_min(S0) > lambda_max(C)  =>  every pressure eigenvalue < 0.
    SignCheckReport negative_case;
    double limit_beta = 1e-8;
    /// max |lambda_i - (1 - c_i/a_i)| over the pencil at limit_beta,
    /// skipping modes with a vanishing velocity-coupling quotient a.
    double limit_max_deviation = 0.0;
    index_t limit_excluded_modes = 0;
};

Theorem21Report verify_theorem21(const SaddleSystem& sys, double beta);

struct Prop1Report {
    double beta = 0.0;
    /// Relative Frobenius gap between the three-factor product and Pr.
    double factorization_gap = 0.0;
    double lambda_min_q = 0.0;
    double lambda_max_s0 = 0.0;
    double lambda_min_s = 0.0;
    bool certificate_holds = false; // beta lambda_min(Q) > lambda_max(S0)
    bool spd_checked = false;       // Cholesky attempted under the certificate
    bool schur_spd = false;
    bool s_indefinite = false;      // recorded when the certificate fails
};

Prop1Report verify_proposition1(const SaddleSystem& sys, double beta);

std::string theorem21_report_text(const Theorem21Report& rep);
std::string prop1_report_text(const Prop1Report& rep);
void write_theorem21_csv(const Theorem21Report& rep, const std::string& path);

} // namespace gstokes

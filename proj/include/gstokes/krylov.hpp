#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gstokes/csr_matrix.hpp"
#include "gstokes/types.hpp"

namespace gstokes {

/// Square linear operator given by a callback; y = op(x).
struct LinOp {
    index_t n = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
};

LinOp make_operator(const CsrMatrix& A);
LinOp identity_operator(index_t n);

struct KrylovConfig {
    double tol = 1e-6;
    index_t max_iters = 200;
    /// Cycle length. The default matches max_iters, so restarts only engage
    /// when the iteration cap is raised; short cycles stagnate on saddle
    /// spectra with eigenvalues on both sides of zero.
    index_t restart = 200;
    index_t max_restarts = 100;
};

struct SolveReport {
    index_t iterations = 0;
    bool converged = false;
    /// Residual norm per iteration; 2-norm of the recurrence residual for CG,
    /// the least-squares residual for GMRES variants (preconditioned norm for
    /// the left-preconditioned solver, true norm for the flexible one).
    std::vector<double> residual_history;
    /// Recomputed unpreconditioned values ||b - A x|| and ||b - A x|| / ||b||.
    double final_res = 0.0;
    double final_rres = 0.0;
    double wall_time_sec = 0.0;
};

void write_history_csv(const SolveReport& report, const std::string& path);

} // namespace gstokes

#pragma once

#include <span>
#include <vector>

#include "gstokes/krylov.hpp"

namespace gstokes {

struct GmresResult {
    std::vector<double> x;
    SolveReport report;
};

/// Restarted GMRES on precond(op(x)) = precond(b) with modified Gram-Schmidt
/// Arnoldi. Stops when the preconditioned relative residual drops below
/// cfg.tol; final_res/final_rres are recomputed from the unpreconditioned
/// residual. The preconditioner must act as a fixed linear operator.
GmresResult gmres_left(const LinOp& op, const LinOp& precond,
                       std::span<const double> b, const KrylovConfig& cfg);

/// Flexible GMRES with right preconditioning: the preconditioner may change
/// between iterations (an inner iterative solve, for instance), and the
/// preconditioned vectors are kept as the solution basis. Stops on the true
/// relative residual.
GmresResult fgmres(const LinOp& op, const LinOp& precond,
                   std::span<const double> b, const KrylovConfig& cfg);

} // namespace gstokes

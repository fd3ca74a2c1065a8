#pragma once

#include <functional>

#include "gstokes/ichol.hpp"
#include "gstokes/krylov.hpp"
#include "gstokes/multivector.hpp"

namespace gstokes {

struct GlobalCgResult {
    MultiVector X;
    SolveReport report;
};

// Called with (iteration, current iterate, current residual block). Invoked
// once with k = 0 for the initial state, then after every update.
using GlobalCgObserver =
    std::function<void(index_t, const MultiVector&, const MultiVector&)>;

// Conjugate gradients for A X = B with a block of right-hand sides, using the
// trace inner product <Y, Z> = sum_j y_j . z_j. With precond == nullptr this
// is the plain block recurrence; otherwise each residual block is passed
// through the incomplete-Cholesky solve column by column. Convergence is
// declared when ||R||_F / ||B||_F <= cfg.tol. Throws std::domain_error on
// nonpositive curvature.
GlobalCgResult global_cg(const LinOp& op, const ICholFactor* precond,
                         const MultiVector& B, const KrylovConfig& cfg,
                         const MultiVector* X0 = nullptr,
                         const GlobalCgObserver& observer = nullptr);

} // namespace gstokes

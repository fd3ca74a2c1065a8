#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gstokes/ichol.hpp"
#include "gstokes/krylov.hpp"

namespace gstokes {

struct PcgResult {
    std::vector<double> x;
    SolveReport report;
};

/// Observes each iterate; used by diagnostics and side-by-side tests.
using PcgObserver = std::function<void(index_t k, std::span<const double> x,
                                       std::span<const double> r)>;

/// Conjugate gradients on an SPD operator, optionally preconditioned with an
/// incomplete Cholesky factor. Stops when ||r|| / ||b|| <= tol. Throws
/// std::domain_error when a direction has nonpositive curvature, which
/// signals a non-SPD operator.
PcgResult pcg(const LinOp& A, const ICholFactor* M, std::span<const double> b,
              const KrylovConfig& cfg, std::span<const double> x0 = {},
              const PcgObserver& observer = nullptr);

} // namespace gstokes

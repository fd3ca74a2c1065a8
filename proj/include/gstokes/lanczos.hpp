#pragma once

#include <span>
#include <vector>

#include "gstokes/krylov.hpp"

namespace gstokes {

/// Symmetric tridiagonal matrix stored by diagonals.
struct TridiagMatrix {
    std::vector<double> diag;
    std::vector<double> off; // one entry shorter than diag

    index_t size() const { return static_cast<index_t>(diag.size()); }
};

struct LanczosResult {
    TridiagMatrix T;
    /// Orthonormal basis vectors, one per column of T.
    std::vector<std::vector<double>> basis;
    /// Set when the recurrence hit an invariant subspace before k steps.
    bool breakdown = false;
};

/// k steps of the symmetric Lanczos recurrence on op, started from v0,
/// single-pass orthogonalization without reorthogonalization. Returns early
/// with a smaller T when the next residual vanishes.
LanczosResult lanczos(const LinOp& op, std::span<const double> v0, index_t k);

} // namespace gstokes

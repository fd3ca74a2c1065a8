#pragma once

#include <span>

#include "gstokes/csr_matrix.hpp"

namespace gstokes {

/// Lower-triangular factor G of a no-fill incomplete Cholesky factorization.
/// G G^T matches A exactly on the lower-triangular sparsity pattern of A.
struct ICholFactor {
    CsrMatrix G;

    /// z = (G G^T)^{-1} r via a forward and a backward triangular solve.
    void solve(std::span<const double> r, std::span<double> z) const;
    void lower_solve(std::span<const double> r, std::span<double> y) const;
    void upper_solve(std::span<const double> y, std::span<double> z) const;
};

/// IC(0) of a symmetric positive definite matrix. Throws std::domain_error
/// naming the failing row when a pivot becomes nonpositive.
ICholFactor ichol0(const CsrMatrix& A);

} // namespace gstokes

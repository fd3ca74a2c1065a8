#pragma once

#include <span>
#include <vector>

#include "gstokes/dense_matrix.hpp"
#include "gstokes/types.hpp"

namespace gstokes {

struct EigenResult {
    std::vector<double> values; // ascending
    DenseMatrix vectors;        // column i pairs with values[i]
};

// Cyclic Jacobi rotations for a symmetric matrix. Sweeps until the
// off-diagonal Frobenius norm drops below tol * ||M||_F. Throws
// std::invalid_argument when the input is visibly asymmetric.
EigenResult jacobi_eigen(const DenseMatrix& M, double tol = 1e-12);

// Generalized symmetric problem Mleft x = lambda Mright x with Mright SPD,
// reduced to standard form through the Cholesky factor of Mright. Returned
// vectors are Mright-orthonormal.
EigenResult gen_sym_eigen(const DenseMatrix& Mleft, const DenseMatrix& Mright);

// Number of eigenvalues of a symmetric matrix with |lambda| above
// rel_tol * max|lambda|.
index_t symmetric_rank(const DenseMatrix& M, double rel_tol = 1e-10);

// Dense Cholesky A = L L^T, lower triangular. Throws std::domain_error when a
// pivot is not positive.
class DenseCholesky {
public:
    explicit DenseCholesky(const DenseMatrix& A);

    const DenseMatrix& lower() const { return L_; }
    void solve(std::span<const double> b, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> b) const;
    // Column-wise L y = b and L^T x = y.
    void lower_solve(std::span<const double> b, std::span<double> y) const;
    void upper_solve(std::span<const double> y, std::span<double> x) const;

private:
    DenseMatrix L_;
};

// Dense LU with partial pivoting.
class DenseLu {
public:
    explicit DenseLu(const DenseMatrix& A);

    void solve(std::span<const double> b, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> b) const;
    double determinant() const;
    bool singular() const { return singular_; }

private:
    DenseMatrix lu_;
    std::vector<index_t> perm_;
    double det_sign_ = 1.0;
    bool singular_ = false;
};

// X = A^{-1} B column by column through LU.
DenseMatrix dense_inverse_times(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix dense_inverse(const DenseMatrix& A);

} // namespace gstokes

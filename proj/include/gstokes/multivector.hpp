#pragma once

#include <span>
#include <vector>

#include "gstokes/csr_matrix.hpp"
#include "gstokes/dense_matrix.hpp"
#include "gstokes/types.hpp"

namespace gstokes {

/// Dense block of s column vectors sharing one length, stored column-major.
class MultiVector {
public:
    MultiVector() = default;
    MultiVector(index_t rows, index_t cols);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    std::span<double> col(index_t j);
    std::span<const double> col(index_t j) const;

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double& at(index_t i, index_t j) { return data_[static_cast<std::size_t>(j * rows_ + i)]; }
    double at(index_t i, index_t j) const { return data_[static_cast<std::size_t>(j * rows_ + i)]; }

    void set_zero();

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

/// Y = A * X, column by column; column j equals spmv(A, X.col(j)) exactly.
void mv_apply(const CsrMatrix& A, const MultiVector& X, MultiVector& Y);
MultiVector mv_apply(const CsrMatrix& A, const MultiVector& X);

/// Trace(X^T Y); shapes must agree.
double frobenius_inner(const MultiVector& X, const MultiVector& Y);
double frobenius_norm(const MultiVector& X);

/// Gram matrix of two block lists: entry (i, j) = Trace(Y_i^T Z_j).
/// All blocks must share the row count; Y blocks and Z blocks each share a width.
DenseMatrix diamond(std::span<const MultiVector> Y, std::span<const MultiVector> Z);

/// Grouped vector for the four-field saddle systems: three velocity
/// components of length n_u and a pressure part of length n_p.
struct BlockVector {
    std::vector<double> u1;
    std::vector<double> u2;
    std::vector<double> u3;
    std::vector<double> p;

    static BlockVector zero(index_t n_u, index_t n_p);
    index_t size() const;
    std::vector<double> flatten() const;
    static BlockVector from_flat(index_t n_u, index_t n_p, std::span<const double> x);
};

double norm2(const BlockVector& x);

} // namespace gstokes

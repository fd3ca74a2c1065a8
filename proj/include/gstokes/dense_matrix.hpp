#pragma once

#include <span>
#include <vector>

#include "gstokes/types.hpp"

namespace gstokes {

class CsrMatrix;

/// Row-major dense matrix for desk-scale reference computations.
/// Dimensions are capped at 2000 so oracle work stays cheap by construction.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(index_t rows, index_t cols);

    static DenseMatrix identity(index_t n);
    static DenseMatrix from_csr(const CsrMatrix& A);

    index_t rows() const { return rows_; }
    index_t cols() const { return cols_; }

    double& at(index_t i, index_t j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
    double at(index_t i, index_t j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    DenseMatrix transposed() const;
    double frobenius_norm() const;
    double max_abs() const;
    /// Largest |m_ij - m_ji|; 0 for a symmetric matrix.
    double symmetry_gap() const;

private:
    index_t rows_ = 0;
    index_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix add(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B);
std::vector<double> matvec(const DenseMatrix& A, std::span<const double> x);

} // namespace gstokes

#include "gstokes/dense_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "gstokes/csr_matrix.hpp"

namespace gstokes {

namespace {
constexpr index_t kMaxDenseDim = 2000;
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("DenseMatrix: negative dimension");
    }
    if (rows > kMaxDenseDim || cols > kMaxDenseDim) {
        throw std::invalid_argument("DenseMatrix: oracle scale exceeded (max dim 2000)");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix I(n, n);
    for (index_t i = 0; i < n; ++i) I.at(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& A) {
    DenseMatrix M(A.rows(), A.cols());
    const auto row_ptr = A.row_ptr();
    const auto col_idx = A.col_idx();
    const auto values = A.values();
    for (index_t i = 0; i < A.rows(); ++i) {
        for (index_t k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            M.at(i, col_idx[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
        }
    }
    return M;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix T(cols_, rows_);
    for (index_t i = 0; i < rows_; ++i) {
        for (index_t j = 0; j < cols_; ++j) {
            T.at(j, i) = at(i, j);
        }
    }
    return T;
}

double DenseMatrix::frobenius_norm() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double DenseMatrix::symmetry_gap() const {
    if (rows_ != cols_) {
        throw std::invalid_argument("symmetry_gap: matrix not square");
    }
    double gap = 0.0;
    for (index_t i = 0; i < rows_; ++i) {
        for (index_t j = i + 1; j < cols_; ++j) {
            gap = std::max(gap, std::abs(at(i, j) - at(j, i)));
        }
    }
    return gap;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.rows()) {
        throw std::invalid_argument("matmul: dimension mismatch");
    }
    DenseMatrix C(A.rows(), B.cols());
    for (index_t i = 0; i < A.rows(); ++i) {
        for (index_t k = 0; k < A.cols(); ++k) {
            const double a = A.at(i, k);
            if (a == 0.0) continue;
            for (index_t j = 0; j < B.cols(); ++j) {
                C.at(i, j) += a * B.at(k, j);
            }
        }
    }
    return C;
}

DenseMatrix add(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("add: dimension mismatch");
    }
    DenseMatrix C = A;
    for (std::size_t i = 0; i < C.data().size(); ++i) {
        C.data()[i] += B.data()[i];
    }
    return C;
}

DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw std::invalid_argument("subtract: dimension mismatch");
    }
    DenseMatrix C = A;
    for (std::size_t i = 0; i < C.data().size(); ++i) {
        C.data()[i] -= B.data()[i];
    }
    return C;
}

std::vector<double> matvec(const DenseMatrix& A, std::span<const double> x) {
    if (static_cast<index_t>(x.size()) != A.cols()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(A.rows()), 0.0);
    for (index_t i = 0; i < A.rows(); ++i) {
        double sum = 0.0;
        for (index_t j = 0; j < A.cols(); ++j) {
            sum += A.at(i, j) * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = sum;
    }
    return y;
}

} // namespace gstokes

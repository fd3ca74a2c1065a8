#include "gstokes/multivector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gstokes {

MultiVector::MultiVector(index_t rows, index_t cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("MultiVector: negative dimension");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

std::span<double> MultiVector::col(index_t j) {
    if (j < 0 || j >= cols_) {
        throw std::invalid_argument("MultiVector::col: index out of range");
    }
    return std::span<double>(data_).subspan(static_cast<std::size_t>(j * rows_),
                                            static_cast<std::size_t>(rows_));
}

std::span<const double> MultiVector::col(index_t j) const {
    if (j < 0 || j >= cols_) {
        throw std::invalid_argument("MultiVector::col: index out of range");
    }
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(j * rows_),
                                                  static_cast<std::size_t>(rows_));
}

void MultiVector::set_zero() {
    std::fill(data_.begin(), data_.end(), 0.0);
}

void mv_apply(const CsrMatrix& A, const MultiVector& X, MultiVector& Y) {
    if (X.rows() != A.cols()) {
        throw std::invalid_argument("mv_apply: dimension mismatch");
    }
    if (Y.rows() != A.rows() || Y.cols() != X.cols()) {
        Y = MultiVector(A.rows(), X.cols());
    }
    for (index_t j = 0; j < X.cols(); ++j) {
        spmv(A, X.col(j), Y.col(j));
    }
}

MultiVector mv_apply(const CsrMatrix& A, const MultiVector& X) {
    MultiVector Y(A.rows(), X.cols());
    mv_apply(A, X, Y);
    return Y;
}

double frobenius_inner(const MultiVector& X, const MultiVector& Y) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
        throw std::invalid_argument("frobenius_inner: shape mismatch");
    }
    const auto xd = X.data();
    const auto yd = Y.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < xd.size(); ++i) {
        sum += xd[i] * yd[i];
    }
    return sum;
}

double frobenius_norm(const MultiVector& X) {
    return std::sqrt(frobenius_inner(X, X));
}

DenseMatrix diamond(std::span<const MultiVector> Y, std::span<const MultiVector> Z) {
    DenseMatrix G(static_cast<index_t>(Y.size()), static_cast<index_t>(Z.size()));
    for (index_t i = 0; i < G.rows(); ++i) {
        for (index_t j = 0; j < G.cols(); ++j) {
            G.at(i, j) = frobenius_inner(Y[static_cast<std::size_t>(i)],
                                         Z[static_cast<std::size_t>(j)]);
        }
    }
    return G;
}

BlockVector BlockVector::zero(index_t n_u, index_t n_p) {
    BlockVector x;
    x.u1.assign(static_cast<std::size_t>(n_u), 0.0);
    x.u2.assign(static_cast<std::size_t>(n_u), 0.0);
    x.u3.assign(static_cast<std::size_t>(n_u), 0.0);
    x.p.assign(static_cast<std::size_t>(n_p), 0.0);
    return x;
}

index_t BlockVector::size() const {
    return static_cast<index_t>(u1.size() + u2.size() + u3.size() + p.size());
}

std::vector<double> BlockVector::flatten() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(size()));
    out.insert(out.end(), u1.begin(), u1.end());
    out.insert(out.end(), u2.begin(), u2.end());
    out.insert(out.end(), u3.begin(), u3.end());
    out.insert(out.end(), p.begin(), p.end());
    return out;
}

BlockVector BlockVector::from_flat(index_t n_u, index_t n_p, std::span<const double> x) {
    if (static_cast<index_t>(x.size()) != 3 * n_u + n_p) {
        throw std::invalid_argument("BlockVector::from_flat: size mismatch");
    }
    BlockVector out = zero(n_u, n_p);
    const std::size_t nu = static_cast<std::size_t>(n_u);
    std::copy(x.begin(), x.begin() + nu, out.u1.begin());
    std::copy(x.begin() + nu, x.begin() + 2 * nu, out.u2.begin());
    std::copy(x.begin() + 2 * nu, x.begin() + 3 * nu, out.u3.begin());
    std::copy(x.begin() + 3 * nu, x.end(), out.p.begin());
    return out;
}

double norm2(const BlockVector& x) {
    double sum = 0.0;
    for (const auto* part : {&x.u1, &x.u2, &x.u3, &x.p}) {
        for (double v : *part) sum += v * v;
    }
    return std::sqrt(sum);
}

} // namespace gstokes

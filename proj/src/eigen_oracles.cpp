#include "gstokes/eigen_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gstokes {

namespace {

double offdiag_norm(const DenseMatrix& M) {
    double s = 0.0;
    for (index_t i = 0; i < M.rows(); ++i) {
        for (index_t j = 0; j < M.cols(); ++j) {
            if (i != j) s += M.at(i, j) * M.at(i, j);
        }
    }
    return std::sqrt(s);
}

void require_square(const DenseMatrix& M, const char* who) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
}

} // namespace

EigenResult jacobi_eigen(const DenseMatrix& M, double tol) {
    require_square(M, "jacobi_eigen");
    const index_t n = M.rows();
    if (M.symmetry_gap() > 1e-10 * std::max(1.0, M.max_abs())) {
        throw std::invalid_argument("jacobi_eigen: asymmetric input");
    }

    // Work on the symmetrized copy so tiny input skew cannot accumulate.
    DenseMatrix A(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < n; ++j) {
            A.at(i, j) = 0.5 * (M.at(i, j) + M.at(j, i));
        }
    }
    DenseMatrix V = DenseMatrix::identity(n);

    const double norm = std::max(A.frobenius_norm(), 1e-300);
    const int max_sweeps = 100;
    int sweep = 0;
    while (offdiag_norm(A) > tol * norm) {
        if (++sweep > max_sweeps) {
            throw std::runtime_error("jacobi_eigen: sweep limit reached");
        }
        for (index_t p = 0; p < n - 1; ++p) {
            for (index_t q = p + 1; q < n; ++q) {
                const double apq = A.at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = A.at(p, p);
                const double aqq = A.at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (index_t k = 0; k < n; ++k) {
                    const double akp = A.at(k, p);
                    const double akq = A.at(k, q);
                    A.at(k, p) = c * akp - s * akq;
                    A.at(k, q) = s * akp + c * akq;
                }
                for (index_t k = 0; k < n; ++k) {
                    const double apk = A.at(p, k);
                    const double aqk = A.at(q, k);
                    A.at(p, k) = c * apk - s * aqk;
                    A.at(q, k) = s * apk + c * aqk;
                }
                for (index_t k = 0; k < n; ++k) {
                    const double vkp = V.at(k, p);
                    const double vkq = V.at(k, q);
                    V.at(k, p) = c * vkp - s * vkq;
                    V.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<index_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(),
              [&](index_t a, index_t b) { return A.at(a, a) < A.at(b, b); });

    EigenResult out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors = DenseMatrix(n, n);
    for (index_t j = 0; j < n; ++j) {
        const index_t src = order[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(j)] = A.at(src, src);
        for (index_t i = 0; i < n; ++i) {
            out.vectors.at(i, j) = V.at(i, src);
        }
    }
    return out;
}

EigenResult gen_sym_eigen(const DenseMatrix& Mleft, const DenseMatrix& Mright) {
    require_square(Mleft, "gen_sym_eigen");
    if (Mright.rows() != Mleft.rows() || Mright.cols() != Mleft.cols()) {
        throw std::invalid_argument("gen_sym_eigen: shape mismatch");
    }
    const index_t n = Mleft.rows();
    DenseCholesky chol(Mright); // throws if Mright is not SPD

    // C = L^{-1} Mleft L^{-T}: forward-solve the columns, transpose, repeat.
    DenseMatrix C(n, n);
    std::vector<double> col(static_cast<std::size_t>(n));
    std::vector<double> sol(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = Mleft.at(i, j);
        chol.lower_solve(col, sol);
        for (index_t i = 0; i < n; ++i) C.at(i, j) = sol[static_cast<std::size_t>(i)];
    }
    DenseMatrix Ct = C.transposed();
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = Ct.at(i, j);
        chol.lower_solve(col, sol);
        for (index_t i = 0; i < n; ++i) C.at(i, j) = sol[static_cast<std::size_t>(i)];
    }
    // C is symmetric up to roundoff; jacobi_eigen symmetrizes internally.
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (C.at(i, j) + C.at(j, i));
            C.at(i, j) = v;
            C.at(j, i) = v;
        }
    }

    EigenResult std_form = jacobi_eigen(C);
    EigenResult out;
    out.values = std::move(std_form.values);
    out.vectors = DenseMatrix(n, n);
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = std_form.vectors.at(i, j);
        chol.upper_solve(col, sol);
        for (index_t i = 0; i < n; ++i) out.vectors.at(i, j) = sol[static_cast<std::size_t>(i)];
    }
    return out;
}

index_t symmetric_rank(const DenseMatrix& M, double rel_tol) {
    EigenResult eig = jacobi_eigen(M);
    double top = 0.0;
    for (double v : eig.values) top = std::max(top, std::abs(v));
    if (top == 0.0) return 0;
    index_t rank = 0;
    for (double v : eig.values) {
        if (std::abs(v) > rel_tol * top) ++rank;
    }
    return rank;
}

DenseCholesky::DenseCholesky(const DenseMatrix& A) {
    require_square(A, "DenseCholesky");
    const index_t n = A.rows();
    L_ = DenseMatrix(n, n);
    for (index_t j = 0; j < n; ++j) {
        double d = A.at(j, j);
        for (index_t k = 0; k < j; ++k) d -= L_.at(j, k) * L_.at(j, k);
        if (!(d > 0.0)) {
            throw std::domain_error("DenseCholesky: nonpositive pivot at row " + std::to_string(j));
        }
        L_.at(j, j) = std::sqrt(d);
        for (index_t i = j + 1; i < n; ++i) {
            double s = A.at(i, j);
            for (index_t k = 0; k < j; ++k) s -= L_.at(i, k) * L_.at(j, k);
            L_.at(i, j) = s / L_.at(j, j);
        }
    }
}

void DenseCholesky::lower_solve(std::span<const double> b, std::span<double> y) const {
    const index_t n = L_.rows();
    for (index_t i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (index_t k = 0; k < i; ++k) s -= L_.at(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / L_.at(i, i);
    }
}

void DenseCholesky::upper_solve(std::span<const double> y, std::span<double> x) const {
    const index_t n = L_.rows();
    for (index_t i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (index_t k = i + 1; k < n; ++k) s -= L_.at(k, i) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / L_.at(i, i);
    }
}

void DenseCholesky::solve(std::span<const double> b, std::span<double> x) const {
    std::vector<double> y(b.size());
    lower_solve(b, y);
    upper_solve(y, x);
}

std::vector<double> DenseCholesky::solve(std::span<const double> b) const {
    std::vector<double> x(b.size());
    solve(b, x);
    return x;
}

DenseLu::DenseLu(const DenseMatrix& A) {
    require_square(A, "DenseLu");
    const index_t n = A.rows();
    lu_ = A;
    perm_.resize(static_cast<std::size_t>(n));
    std::iota(perm_.begin(), perm_.end(), index_t{0});

    for (index_t k = 0; k < n; ++k) {
        index_t piv = k;
        double best = std::abs(lu_.at(k, k));
        for (index_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_.at(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best == 0.0) {
            singular_ = true;
            continue;
        }
        if (piv != k) {
            for (index_t j = 0; j < n; ++j) std::swap(lu_.at(k, j), lu_.at(piv, j));
            std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(piv)]);
            det_sign_ = -det_sign_;
        }
        for (index_t i = k + 1; i < n; ++i) {
            const double m = lu_.at(i, k) / lu_.at(k, k);
            lu_.at(i, k) = m;
            for (index_t j = k + 1; j < n; ++j) {
                lu_.at(i, j) -= m * lu_.at(k, j);
            }
        }
    }
}

void DenseLu::solve(std::span<const double> b, std::span<double> x) const {
    if (singular_) {
        throw std::domain_error("DenseLu: matrix is singular");
    }
    const index_t n = lu_.rows();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
        for (index_t k = 0; k < i; ++k) s -= lu_.at(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s;
    }
    for (index_t i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (index_t k = i + 1; k < n; ++k) s -= lu_.at(i, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / lu_.at(i, i);
    }
}

std::vector<double> DenseLu::solve(std::span<const double> b) const {
    std::vector<double> x(b.size());
    solve(b, x);
    return x;
}

double DenseLu::determinant() const {
    if (singular_) return 0.0;
    double d = det_sign_;
    for (index_t i = 0; i < lu_.rows(); ++i) d *= lu_.at(i, i);
    return d;
}

DenseMatrix dense_inverse_times(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != B.rows()) {
        throw std::invalid_argument("dense_inverse_times: shape mismatch");
    }
    DenseLu lu(A);
    const index_t n = B.rows();
    DenseMatrix X(n, B.cols());
    std::vector<double> col(static_cast<std::size_t>(n));
    std::vector<double> sol(static_cast<std::size_t>(n));
    for (index_t j = 0; j < B.cols(); ++j) {
        for (index_t i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = B.at(i, j);
        lu.solve(col, sol);
        for (index_t i = 0; i < n; ++i) X.at(i, j) = sol[static_cast<std::size_t>(i)];
    }
    return X;
}

DenseMatrix dense_inverse(const DenseMatrix& A) {
    return dense_inverse_times(A, DenseMatrix::identity(A.rows()));
}

} // namespace gstokes

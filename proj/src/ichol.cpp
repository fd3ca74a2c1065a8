#include "gstokes/ichol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gstokes {

ICholFactor ichol0(const CsrMatrix& A) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("ichol0: matrix not square");
    }
    const index_t n = A.rows();
    const auto a_row_ptr = A.row_ptr();
    const auto a_col_idx = A.col_idx();
    const auto a_values = A.values();

    // Keep the lower triangle of A's pattern, diagonal included.
    std::vector<index_t> row_ptr(static_cast<std::size_t>(n) + 1, 0);
    std::vector<index_t> col_idx;
    std::vector<double> rhs; // entries of A on the kept pattern
    for (index_t i = 0; i < n; ++i) {
        bool has_diag = false;
        for (index_t k = a_row_ptr[static_cast<std::size_t>(i)];
             k < a_row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const index_t j = a_col_idx[static_cast<std::size_t>(k)];
            if (j > i) break;
            col_idx.push_back(j);
            rhs.push_back(a_values[static_cast<std::size_t>(k)]);
            if (j == i) has_diag = true;
        }
        if (!has_diag) {
            throw std::domain_error("ichol0: missing diagonal entry in row " + std::to_string(i));
        }
        row_ptr[static_cast<std::size_t>(i) + 1] = static_cast<index_t>(col_idx.size());
    }

    std::vector<double> values(rhs.size(), 0.0);
    for (index_t i = 0; i < n; ++i) {
        const index_t begin = row_ptr[static_cast<std::size_t>(i)];
        const index_t end = row_ptr[static_cast<std::size_t>(i) + 1];
        for (index_t k = begin; k < end; ++k) {
            const index_t j = col_idx[static_cast<std::size_t>(k)];
            // Dot of rows i and j of G over columns < j, merged over the
            // sorted patterns.
            double sum = 0.0;
            index_t pi = begin;
            index_t pj = row_ptr[static_cast<std::size_t>(j)];
            const index_t jend = row_ptr[static_cast<std::size_t>(j) + 1];
            while (pi < k && pj < jend) {
                const index_t ci = col_idx[static_cast<std::size_t>(pi)];
                const index_t cj = col_idx[static_cast<std::size_t>(pj)];
                if (ci >= j || cj >= j) break;
                if (ci == cj) {
                    sum += values[static_cast<std::size_t>(pi)] * values[static_cast<std::size_t>(pj)];
                    ++pi;
                    ++pj;
                } else if (ci < cj) {
                    ++pi;
                } else {
                    ++pj;
                }
            }
            if (j < i) {
                const double gjj = values[static_cast<std::size_t>(row_ptr[static_cast<std::size_t>(j) + 1] - 1)];
                values[static_cast<std::size_t>(k)] = (rhs[static_cast<std::size_t>(k)] - sum) / gjj;
            } else {
                const double radicand = rhs[static_cast<std::size_t>(k)] - sum;
                if (radicand <= 0.0) {
                    throw std::domain_error("ichol0: nonpositive pivot in row " + std::to_string(i));
                }
                values[static_cast<std::size_t>(k)] = std::sqrt(radicand);
            }
        }
    }

    ICholFactor factor;
    factor.G = CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
    return factor;
}

void ICholFactor::lower_solve(std::span<const double> r, std::span<double> y) const {
    const index_t n = G.rows();
    const auto row_ptr = G.row_ptr();
    const auto col_idx = G.col_idx();
    const auto values = G.values();
    for (index_t i = 0; i < n; ++i) {
        double sum = r[static_cast<std::size_t>(i)];
        const index_t end = row_ptr[static_cast<std::size_t>(i) + 1];
        for (index_t k = row_ptr[static_cast<std::size_t>(i)]; k < end - 1; ++k) {
            sum -= values[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(i)] = sum / values[static_cast<std::size_t>(end - 1)];
    }
}

void ICholFactor::upper_solve(std::span<const double> y, std::span<double> z) const {
    const index_t n = G.rows();
    const auto row_ptr = G.row_ptr();
    const auto col_idx = G.col_idx();
    const auto values = G.values();
    std::copy(y.begin(), y.end(), z.begin());
    for (index_t i = n - 1; i >= 0; --i) {
        const index_t end = row_ptr[static_cast<std::size_t>(i) + 1];
        const double zi = z[static_cast<std::size_t>(i)] / values[static_cast<std::size_t>(end - 1)];
        z[static_cast<std::size_t>(i)] = zi;
        for (index_t k = row_ptr[static_cast<std::size_t>(i)]; k < end - 1; ++k) {
            z[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])] -= values[static_cast<std::size_t>(k)] * zi;
        }
    }
}

void ICholFactor::solve(std::span<const double> r, std::span<double> z) const {
    std::vector<double> y(r.size());
    lower_solve(r, y);
    upper_solve(y, z);
}

} // namespace gstokes

#include "gstokes/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gstokes {

CsrMatrix::CsrMatrix(index_t nrows, index_t ncols,
                     std::vector<index_t> row_ptr,
                     std::vector<index_t> col_idx,
                     std::vector<double> values)
    : nrows_(nrows), ncols_(ncols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    validate();
}

CsrMatrix CsrMatrix::from_triplets(index_t nrows, index_t ncols,
                                   std::vector<Triplet> entries) {
    if (nrows < 0 || ncols < 0) {
        throw std::invalid_argument("from_triplets: negative dimension");
    }
    for (const Triplet& t : entries) {
        if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols) {
            throw std::invalid_argument("from_triplets: entry out of bounds");
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Triplet& a, const Triplet& b) {
                  return a.row != b.row ? a.row < b.row : a.col < b.col;
              });

    std::vector<index_t> row_ptr(static_cast<std::size_t>(nrows) + 1, 0);
    std::vector<index_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());

    std::size_t i = 0;
    while (i < entries.size()) {
        const index_t r = entries[i].row;
        const index_t c = entries[i].col;
        double sum = 0.0;
        while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
            sum += entries[i].value;
            ++i;
        }
        col_idx.push_back(c);
        values.push_back(sum);
        row_ptr[static_cast<std::size_t>(r) + 1] += 1;
    }
    for (index_t r = 0; r < nrows; ++r) {
        row_ptr[static_cast<std::size_t>(r) + 1] += row_ptr[static_cast<std::size_t>(r)];
    }
    return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(index_t n) {
    std::vector<index_t> row_ptr(static_cast<std::size_t>(n) + 1);
    std::vector<index_t> col_idx(static_cast<std::size_t>(n));
    std::vector<double> values(static_cast<std::size_t>(n), 1.0);
    for (index_t i = 0; i <= n; ++i) row_ptr[static_cast<std::size_t>(i)] = i;
    for (index_t i = 0; i < n; ++i) col_idx[static_cast<std::size_t>(i)] = i;
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
    const index_t n = static_cast<index_t>(d.size());
    CsrMatrix I = identity(n);
    std::copy(d.begin(), d.end(), I.values_.begin());
    return I;
}

double CsrMatrix::at(index_t i, index_t j) const {
    if (i < 0 || i >= nrows_ || j < 0 || j >= ncols_) {
        throw std::invalid_argument("at: index out of bounds");
    }
    const index_t begin = row_ptr_[static_cast<std::size_t>(i)];
    const index_t end = row_ptr_[static_cast<std::size_t>(i) + 1];
    const auto first = col_idx_.begin() + begin;
    const auto last = col_idx_.begin() + end;
    const auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) {
        return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    }
    return 0.0;
}

std::vector<double> CsrMatrix::diag() const {
    const index_t n = std::min(nrows_, ncols_);
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    for (index_t i = 0; i < n; ++i) {
        for (index_t k = row_ptr_[static_cast<std::size_t>(i)];
             k < row_ptr_[static_cast<std::size_t>(i) + 1]; ++k) {
            if (col_idx_[static_cast<std::size_t>(k)] == i) {
                d[static_cast<std::size_t>(i)] = values_[static_cast<std::size_t>(k)];
            }
        }
    }
    return d;
}

CsrMatrix CsrMatrix::transposed() const {
    std::vector<index_t> row_ptr(static_cast<std::size_t>(ncols_) + 1, 0);
    for (index_t c : col_idx_) {
        row_ptr[static_cast<std::size_t>(c) + 1] += 1;
    }
    for (index_t c = 0; c < ncols_; ++c) {
        row_ptr[static_cast<std::size_t>(c) + 1] += row_ptr[static_cast<std::size_t>(c)];
    }
    std::vector<index_t> col_idx(values_.size());
    std::vector<double> values(values_.size());
    std::vector<index_t> next(row_ptr.begin(), row_ptr.end() - 1);
    for (index_t r = 0; r < nrows_; ++r) {
        for (index_t k = row_ptr_[static_cast<std::size_t>(r)];
             k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
            const index_t c = col_idx_[static_cast<std::size_t>(k)];
            const index_t pos = next[static_cast<std::size_t>(c)]++;
            col_idx[static_cast<std::size_t>(pos)] = r;
            values[static_cast<std::size_t>(pos)] = values_[static_cast<std::size_t>(k)];
        }
    }
    return CsrMatrix(ncols_, nrows_, std::move(row_ptr), std::move(col_idx), std::move(values));
}

double CsrMatrix::symmetry_gap() const {
    if (nrows_ != ncols_) {
        throw std::invalid_argument("symmetry_gap: matrix not square");
    }
    double gap = 0.0;
    for (index_t r = 0; r < nrows_; ++r) {
        for (index_t k = row_ptr_[static_cast<std::size_t>(r)];
             k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
            const index_t c = col_idx_[static_cast<std::size_t>(k)];
            gap = std::max(gap, std::abs(values_[static_cast<std::size_t>(k)] - at(c, r)));
        }
    }
    return gap;
}

void CsrMatrix::validate() const {
    if (nrows_ < 0 || ncols_ < 0) {
        throw std::invalid_argument("CsrMatrix: negative dimension");
    }
    if (row_ptr_.size() != static_cast<std::size_t>(nrows_) + 1) {
        throw std::invalid_argument("CsrMatrix: row_ptr size mismatch");
    }
    if (row_ptr_.front() != 0 ||
        row_ptr_.back() != static_cast<index_t>(values_.size()) ||
        col_idx_.size() != values_.size()) {
        throw std::invalid_argument("CsrMatrix: array length mismatch");
    }
    for (index_t r = 0; r < nrows_; ++r) {
        const index_t begin = row_ptr_[static_cast<std::size_t>(r)];
        const index_t end = row_ptr_[static_cast<std::size_t>(r) + 1];
        if (begin > end) {
            throw std::invalid_argument("CsrMatrix: row_ptr not monotone at row " + std::to_string(r));
        }
        for (index_t k = begin; k < end; ++k) {
            const index_t c = col_idx_[static_cast<std::size_t>(k)];
            if (c < 0 || c >= ncols_) {
                throw std::invalid_argument("CsrMatrix: column index out of range in row " + std::to_string(r));
            }
            if (k > begin && col_idx_[static_cast<std::size_t>(k) - 1] >= c) {
                throw std::invalid_argument("CsrMatrix: columns not strictly increasing in row " + std::to_string(r));
            }
        }
    }
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    if (static_cast<index_t>(x.size()) != A.cols() ||
        static_cast<index_t>(y.size()) != A.rows()) {
        throw std::invalid_argument("spmv: dimension mismatch");
    }
    const auto row_ptr = A.row_ptr();
    const auto col_idx = A.col_idx();
    const auto values = A.values();
    for (index_t i = 0; i < A.rows(); ++i) {
        double sum = 0.0;
        for (index_t k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            sum += values[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(col_idx[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(i)] = sum;
    }
}

std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(A.rows()), 0.0);
    spmv(A, x, y);
    return y;
}

} // namespace gstokes

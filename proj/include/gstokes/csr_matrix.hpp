#pragma once

#include <span>
#include <vector>

#include "gstokes/types.hpp"

namespace gstokes {

/// One coordinate-format entry, used to build matrices incrementally.
struct Triplet {
    index_t row = 0;
    index_t col = 0;
    double value = 0.0;
};

/// Sparse matrix in compressed sparse row format.
///
/// Invariants: row_ptr has nrows+1 monotone entries, column indices are
/// strictly increasing within each row, and no entry is stored twice.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(index_t nrows, index_t ncols,
              std::vector<index_t> row_ptr,
              std::vector<index_t> col_idx,
              std::vector<double> values);

    /// Sorts entries, sums duplicates, and compresses to CSR.
    static CsrMatrix from_triplets(index_t nrows, index_t ncols,
                                   std::vector<Triplet> entries);
    static CsrMatrix identity(index_t n);
    static CsrMatrix diagonal(std::span<const double> d);

    index_t rows() const { return nrows_; }
    index_t cols() const { return ncols_; }
    index_t nnz() const { return static_cast<index_t>(values_.size()); }

    std::span<const index_t> row_ptr() const { return row_ptr_; }
    std::span<const index_t> col_idx() const { return col_idx_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Value at (i, j), zero when outside the stored pattern.
    double at(index_t i, index_t j) const;

    std::vector<double> diag() const;
    CsrMatrix transposed() const;

    /// Largest |a_ij - a_ji| over the pattern; 0 for a symmetric matrix.
    double symmetry_gap() const;

    /// Throws std::invalid_argument when a structural invariant is broken.
    void validate() const;

private:
    index_t nrows_ = 0;
    index_t ncols_ = 0;
    std::vector<index_t> row_ptr_ = {0};
    std::vector<index_t> col_idx_;
    std::vector<double> values_;
};

/// y = A * x
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& A, std::span<const double> x);

} // namespace gstokes

#include "gstokes/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gstokes {

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

CsrMatrix mm_read(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("mm_read: cannot open " + path);
    }
    std::string banner;
    if (!std::getline(in, banner)) {
        throw std::runtime_error("mm_read: empty file " + path);
    }
    std::istringstream bs(banner);
    std::string head, object, format, field, symmetry;
    bs >> head >> object >> format >> field >> symmetry;
    if (head != "%%MatrixMarket" || to_lower(object) != "matrix") {
        throw std::runtime_error("mm_read: malformed header in " + path);
    }
    if (to_lower(format) != "coordinate") {
        throw std::runtime_error("mm_read: only coordinate format is supported");
    }
    if (to_lower(field) != "real") {
        throw std::runtime_error("mm_read: only real entries are supported, got " + field);
    }
    const std::string sym = to_lower(symmetry);
    if (sym != "general" && sym != "symmetric") {
        throw std::runtime_error("mm_read: unsupported symmetry " + symmetry);
    }

    std::string line;
    index_t nrows = 0, ncols = 0, nnz = 0;
    bool have_sizes = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        if (!(ls >> nrows >> ncols >> nnz)) {
            throw std::runtime_error("mm_read: malformed size line in " + path);
        }
        have_sizes = true;
        break;
    }
    if (!have_sizes) {
        throw std::runtime_error("mm_read: missing size line in " + path);
    }

    std::vector<Triplet> entries;
    entries.reserve(static_cast<std::size_t>(nnz));
    index_t seen = 0;
    while (seen < nnz) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("mm_read: fewer entries than declared in " + path);
        }
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        index_t i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v)) {
            throw std::runtime_error("mm_read: malformed entry line in " + path);
        }
        if (i < 1 || i > nrows || j < 1 || j > ncols) {
            throw std::runtime_error("mm_read: index out of bounds in " + path);
        }
        entries.push_back({i - 1, j - 1, v});
        if (sym == "symmetric" && i != j) {
            entries.push_back({j - 1, i - 1, v});
        }
        ++seen;
    }
    return CsrMatrix::from_triplets(nrows, ncols, std::move(entries));
}

void mm_write(const std::string& path, const CsrMatrix& A) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) {
        throw std::runtime_error("mm_write: cannot open " + path);
    }
    std::fprintf(out, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(out, "%lld %lld %lld\n",
                 static_cast<long long>(A.rows()),
                 static_cast<long long>(A.cols()),
                 static_cast<long long>(A.nnz()));
    const auto row_ptr = A.row_ptr();
    const auto col_idx = A.col_idx();
    const auto values = A.values();
    for (index_t i = 0; i < A.rows(); ++i) {
        for (index_t k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            std::fprintf(out, "%lld %lld %.17g\n",
                         static_cast<long long>(i + 1),
                         static_cast<long long>(col_idx[static_cast<std::size_t>(k)] + 1),
                         values[static_cast<std::size_t>(k)]);
        }
    }
    std::fclose(out);
}

} // namespace gstokes

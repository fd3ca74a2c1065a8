#include "gstokes/krylov.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gstokes {

LinOp make_operator(const CsrMatrix& A) {
    if (A.rows() != A.cols()) {
        throw std::invalid_argument("make_operator: matrix not square");
    }
    return LinOp{A.rows(), [&A](std::span<const double> x, std::span<double> y) {
        spmv(A, x, y);
    }};
}

LinOp identity_operator(index_t n) {
    return LinOp{n, [](std::span<const double> x, std::span<double> y) {
        std::copy(x.begin(), x.end(), y.begin());
    }};
}

void write_history_csv(const SolveReport& report, const std::string& path) {
    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) {
        throw std::runtime_error("write_history_csv: cannot open " + path);
    }
    std::fprintf(out, "iteration,residual\n");
    for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
        std::fprintf(out, "%zu,%.17g\n", k + 1, report.residual_history[k]);
    }
    std::fclose(out);
}

} // namespace gstokes

#include "gstokes/lanczos.hpp"

#include <stdexcept>

#include "gstokes/vector_ops.hpp"

namespace gstokes {

LanczosResult lanczos(const LinOp& op, std::span<const double> v0, index_t k) {
    const std::size_t n = static_cast<std::size_t>(op.n);
    if (v0.size() != n) {
        throw std::invalid_argument("lanczos: start vector size mismatch");
    }
    if (k < 1 || k > op.n) {
        throw std::invalid_argument("lanczos: step count out of range");
    }
    const double v0norm = nrm2(v0);
    if (v0norm == 0.0) {
        throw std::invalid_argument("lanczos: zero start vector");
    }

    LanczosResult result;
    std::vector<double> q(v0.begin(), v0.end());
    scal(1.0 / v0norm, q);
    std::vector<double> q_prev(n, 0.0);
    std::vector<double> w(n);
    double eta = 0.0;

    for (index_t step = 0; step < k; ++step) {
        result.basis.push_back(q);
        op.apply(q, w);
        const double alpha = dot(w, q);
        result.T.diag.push_back(alpha);
        axpy(-alpha, q, w);
        if (step > 0) {
            axpy(-eta, q_prev, w);
        }
        if (step + 1 == k) break;
        eta = nrm2(w);
        if (eta <= 1e-14 * std::abs(alpha) + 1e-300) {
            result.breakdown = true;
            break;
        }
        result.T.off.push_back(eta);
        q_prev = q;
        for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / eta;
    }
    return result;
}

} // namespace gstokes

#include "gstokes/pcg.hpp"

#include <chrono>
#include <stdexcept>

#include "gstokes/vector_ops.hpp"

namespace gstokes {

PcgResult pcg(const LinOp& A, const ICholFactor* M, std::span<const double> b,
              const KrylovConfig& cfg, std::span<const double> x0,
              const PcgObserver& observer) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = static_cast<std::size_t>(A.n);
    if (b.size() != n) {
        throw std::invalid_argument("pcg: rhs size mismatch");
    }

    PcgResult result;
    result.x.assign(n, 0.0);
    std::vector<double> r(b.begin(), b.end());
    if (!x0.empty()) {
        if (x0.size() != n) {
            throw std::invalid_argument("pcg: x0 size mismatch");
        }
        std::copy(x0.begin(), x0.end(), result.x.begin());
        std::vector<double> ax(n);
        A.apply(result.x, ax);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    }

    const double bnorm = nrm2(b);
    if (bnorm == 0.0) {
        result.x.assign(n, 0.0);
        result.report.converged = true;
        return result;
    }

    std::vector<double> z(n), p(n), w(n);
    auto precondition = [&](std::span<const double> rr, std::span<double> zz) {
        if (M != nullptr) {
            M->solve(rr, zz);
        } else {
            std::copy(rr.begin(), rr.end(), zz.begin());
        }
    };

    precondition(r, z);
    std::copy(z.begin(), z.end(), p.begin());
    double rz = dot(r, z);

    double rnorm = nrm2(r);
    while (true) {
        if (rnorm / bnorm <= cfg.tol) {
            result.report.converged = true;
            break;
        }
        if (result.report.iterations >= cfg.max_iters) {
            break;
        }
        A.apply(p, w);
        const double pw = dot(p, w);
        if (pw <= 0.0) {
            throw std::domain_error("pcg: nonpositive curvature, operator not SPD");
        }
        const double step = rz / pw;
        axpy(step, p, result.x);
        axpy(-step, w, r);
        rnorm = nrm2(r);
        result.report.iterations += 1;
        result.report.residual_history.push_back(rnorm);
        if (observer) {
            observer(result.report.iterations, result.x, r);
        }
        precondition(r, z);
        const double rz_next = dot(r, z);
        const double dir_scale = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + dir_scale * p[i];
        }
    }

    A.apply(result.x, w);
    for (std::size_t i = 0; i < n; ++i) w[i] = b[i] - w[i];
    result.report.final_res = nrm2(w);
    result.report.final_rres = result.report.final_res / bnorm;
    result.report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace gstokes

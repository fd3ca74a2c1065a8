#include "gstokes/gmres.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gstokes/vector_ops.hpp"

namespace gstokes {

namespace {

// One engine serves both variants. In left mode the Arnoldi operator is
// precond(op(v)) and the tracked residual is the preconditioned one; in
// flexible mode it is op(precond(v)) with the preconditioned vectors kept
// for the solution update, and the tracked residual is the true one.
GmresResult gmres_engine(const LinOp& op, const LinOp& precond,
                         std::span<const double> b, const KrylovConfig& cfg,
                         bool flexible) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = static_cast<std::size_t>(op.n);
    if (b.size() != n) {
        throw std::invalid_argument("gmres: rhs size mismatch");
    }
    if (cfg.restart < 1) {
        throw std::invalid_argument("gmres: restart must be at least 1");
    }

    GmresResult result;
    result.x.assign(n, 0.0);

    const double bnorm = nrm2(b);
    if (bnorm == 0.0) {
        result.report.converged = true;
        return result;
    }

    // Reference norm for the stopping test: ||P^{-1} b|| in left mode,
    // ||b|| in flexible mode.
    double ref_norm = bnorm;
    if (!flexible) {
        std::vector<double> pb(n);
        precond.apply(b, pb);
        ref_norm = nrm2(pb);
        if (ref_norm == 0.0) {
            throw std::domain_error("gmres: preconditioner annihilates the right-hand side");
        }
    }

    const std::size_t m = static_cast<std::size_t>(cfg.restart);
    std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> Z; // flexible solution basis
    if (flexible) {
        Z.assign(m, std::vector<double>(n));
    }
    std::vector<double> H((m + 1) * m, 0.0);
    auto h = [&](std::size_t i, std::size_t j) -> double& { return H[i * m + j]; };
    std::vector<double> cs(m), sn(m), g(m + 1);
    std::vector<double> w(n), tmp(n);

    index_t cycles = 0;
    bool converged = false;

    while (!converged && result.report.iterations < cfg.max_iters &&
           cycles <= cfg.max_restarts) {
        // Residual entering this cycle.
        op.apply(result.x, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
        if (!flexible) {
            precond.apply(tmp, w);
        } else {
            std::copy(tmp.begin(), tmp.end(), w.begin());
        }
        const double beta = nrm2(w);
        if (beta / ref_norm <= cfg.tol) {
            converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) V[0][i] = w[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        std::size_t j = 0;
        bool cycle_done = false;
        while (j < m && result.report.iterations < cfg.max_iters && !cycle_done) {
            if (flexible) {
                precond.apply(V[j], Z[j]);
                op.apply(Z[j], w);
            } else {
                op.apply(V[j], tmp);
                precond.apply(tmp, w);
            }
            result.report.iterations += 1;

            for (std::size_t i = 0; i <= j; ++i) {
                h(i, j) = dot(w, V[i]);
                axpy(-h(i, j), V[i], w);
            }
            const double hnext = nrm2(w);
            h(j + 1, j) = hnext;

            // Apply the accumulated rotations, then a new one to clear the
            // subdiagonal.
            for (std::size_t i = 0; i < j; ++i) {
                const double t = cs[i] * h(i, j) + sn[i] * h(i + 1, j);
                h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
                h(i, j) = t;
            }
            const double denom = std::hypot(h(j, j), h(j + 1, j));
            if (denom == 0.0) {
                throw std::domain_error("gmres: breakdown with zero Hessenberg column");
            }
            cs[j] = h(j, j) / denom;
            sn[j] = h(j + 1, j) / denom;
            h(j, j) = denom;
            h(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            const double resid = std::abs(g[j + 1]);
            result.report.residual_history.push_back(resid);

            if (resid / ref_norm <= cfg.tol) {
                converged = true;
                cycle_done = true;
            } else if (hnext <= 1e-14 * std::abs(denom)) {
                // Invariant subspace reached; the least-squares solve below
                // extracts the best iterate and the outer loop decides.
                cycle_done = true;
            }
            if (hnext > 0.0 && j + 1 <= m) {
                for (std::size_t i = 0; i < n; ++i) V[j + 1][i] = w[i] / hnext;
            }
            ++j;
        }

        // Back-substitute R y = g over the j columns built in this cycle.
        std::vector<double> y(j, 0.0);
        for (std::size_t ii = j; ii-- > 0;) {
            double sum = g[ii];
            for (std::size_t kk = ii + 1; kk < j; ++kk) {
                sum -= h(ii, kk) * y[kk];
            }
            y[ii] = sum / h(ii, ii);
        }
        for (std::size_t kk = 0; kk < j; ++kk) {
            axpy(y[kk], flexible ? Z[kk] : V[kk], result.x);
        }
        ++cycles;
    }

    result.report.converged = converged;
    op.apply(result.x, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
    result.report.final_res = nrm2(tmp);
    result.report.final_rres = result.report.final_res / bnorm;
    result.report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace

GmresResult gmres_left(const LinOp& op, const LinOp& precond,
                       std::span<const double> b, const KrylovConfig& cfg) {
    return gmres_engine(op, precond, b, cfg, false);
}

GmresResult fgmres(const LinOp& op, const LinOp& precond,
                   std::span<const double> b, const KrylovConfig& cfg) {
    return gmres_engine(op, precond, b, cfg, true);
}

} // namespace gstokes

#include "gstokes/global_cg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gstokes/vector_ops.hpp"

namespace gstokes {

namespace {

void apply_precond(const ICholFactor* M, const MultiVector& R, MultiVector& Z) {
    if (M == nullptr) {
        std::copy(R.data().begin(), R.data().end(), Z.data().begin());
        return;
    }
    std::vector<double> z(static_cast<std::size_t>(R.rows()));
    for (index_t j = 0; j < R.cols(); ++j) {
        M->solve(R.col(j), z);
        std::copy(z.begin(), z.end(), Z.col(j).begin());
    }
}

} // namespace

GlobalCgResult global_cg(const LinOp& op, const ICholFactor* precond,
                         const MultiVector& B, const KrylovConfig& cfg,
                         const MultiVector* X0, const GlobalCgObserver& observer) {
    if (B.rows() != op.n) {
        throw std::invalid_argument("global_cg: right-hand side row count mismatch");
    }
    if (X0 != nullptr && (X0->rows() != B.rows() || X0->cols() != B.cols())) {
        throw std::invalid_argument("global_cg: initial guess shape mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const index_t n = B.rows();
    const index_t s = B.cols();

    GlobalCgResult out;
    out.X = MultiVector(n, s);
    MultiVector& X = out.X;
    SolveReport& rep = out.report;

    const double ref = frobenius_norm(B);
    if (ref == 0.0) {
        X.set_zero();
        rep.converged = true;
        rep.final_res = 0.0;
        rep.final_rres = 0.0;
        rep.residual_history.push_back(0.0);
        rep.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    MultiVector R(n, s);
    // Residual R = B - A X. With a zero start this is just B.
    if (X0 != nullptr) {
        std::copy(X0->data().begin(), X0->data().end(), X.data().begin());
        MultiVector AX(n, s);
        for (index_t j = 0; j < s; ++j) {
            op.apply(X.col(j), AX.col(j));
        }
        for (std::size_t i = 0; i < R.data().size(); ++i) {
            R.data()[i] = B.data()[i] - AX.data()[i];
        }
    } else {
        X.set_zero();
        std::copy(B.data().begin(), B.data().end(), R.data().begin());
    }

    MultiVector Z(n, s);
    MultiVector P(n, s);
    MultiVector W(n, s);

    double res = frobenius_norm(R);
    rep.residual_history.push_back(res);
    if (observer) observer(0, X, R);

    if (res / ref <= cfg.tol) {
        rep.converged = true;
        rep.final_res = res;
        rep.final_rres = res / ref;
        rep.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return out;
    }

    apply_precond(precond, R, Z);
    std::copy(Z.data().begin(), Z.data().end(), P.data().begin());
    double rho = frobenius_inner(R, Z);

    for (index_t k = 1; k <= cfg.max_iters; ++k) {
        for (index_t j = 0; j < s; ++j) {
            op.apply(P.col(j), W.col(j));
        }
        const double denom = frobenius_inner(P, W);
        if (!(denom > 0.0)) {
            throw std::domain_error("global_cg: nonpositive curvature, operator not SPD");
        }
        const double gamma = rho / denom;
        axpy(gamma, P.data(), X.data());
        axpy(-gamma, W.data(), R.data());

        res = frobenius_norm(R);
        rep.residual_history.push_back(res);
        rep.iterations = k;
        if (observer) observer(k, X, R);

        if (res / ref <= cfg.tol) {
            rep.converged = true;
            break;
        }

        apply_precond(precond, R, Z);
        const double rho_next = frobenius_inner(R, Z);
        const double beta = rho_next / rho;
        rho = rho_next;
        // P = Z + beta P
        for (std::size_t i = 0; i < P.data().size(); ++i) {
            P.data()[i] = Z.data()[i] + beta * P.data()[i];
        }
    }

    rep.final_res = res;
    rep.final_rres = res / ref;
    rep.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace gstokes

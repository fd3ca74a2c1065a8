#include "gstokes/global_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "gstokes/eigen_oracles.hpp"

namespace gstokes {

namespace {

constexpr index_t kDiagnosticsCap = 500;

MultiVector apply_pinv(const ICholFactor* G, const MultiVector& X) {
    MultiVector Z(X.rows(), X.cols());
    if (G == nullptr) {
        std::copy(X.data().begin(), X.data().end(), Z.data().begin());
        return Z;
    }
    std::vector<double> z(static_cast<std::size_t>(X.rows()));
    for (index_t j = 0; j < X.cols(); ++j) {
        G->solve(X.col(j), z);
        std::copy(z.begin(), z.end(), Z.col(j).begin());
    }
    return Z;
}

void axpy_block(double a, const MultiVector& X, MultiVector& Y) {
    auto x = X.data();
    auto y = Y.data();
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale_block(double a, MultiVector& X) {
    for (double& v : X.data()) v *= a;
}

DenseMatrix dense_pinv(const ICholFactor* G, index_t n) {
    DenseMatrix P = DenseMatrix::identity(n);
    if (G == nullptr) return P;
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::vector<double> z(static_cast<std::size_t>(n));
    for (index_t j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        G->solve(e, z);
        for (index_t i = 0; i < n; ++i) P.at(i, j) = z[static_cast<std::size_t>(i)];
        e[static_cast<std::size_t>(j)] = 0.0;
    }
    return P;
}

std::vector<MultiVector> ainv_blocks(const DenseCholesky& chol,
                                     const std::vector<MultiVector>& blocks) {
    std::vector<MultiVector> out;
    out.reserve(blocks.size());
    std::vector<double> sol;
    for (const MultiVector& K : blocks) {
        MultiVector Y(K.rows(), K.cols());
        sol.resize(static_cast<std::size_t>(K.rows()));
        for (index_t j = 0; j < K.cols(); ++j) {
            chol.solve(K.col(j), sol);
            std::copy(sol.begin(), sol.end(), Y.col(j).begin());
        }
        out.push_back(std::move(Y));
    }
    return out;
}

TridiagMatrix extract_tridiag(const DenseMatrix& M) {
    TridiagMatrix T;
    for (index_t i = 0; i < M.rows(); ++i) {
        T.diag.push_back(M.at(i, i));
        if (i + 1 < M.rows()) T.off.push_back(0.5 * (M.at(i, i + 1) + M.at(i + 1, i)));
    }
    return T;
}

DenseMatrix densify(const TridiagMatrix& T) {
    const index_t m = static_cast<index_t>(T.diag.size());
    DenseMatrix M(m, m);
    for (index_t i = 0; i < m; ++i) {
        M.at(i, i) = T.diag[static_cast<std::size_t>(i)];
        if (i + 1 < m) {
            M.at(i, i + 1) = T.off[static_cast<std::size_t>(i)];
            M.at(i + 1, i) = T.off[static_cast<std::size_t>(i)];
        }
    }
    return M;
}

} // namespace

DiagnosticsState record_pgcg_diagnostics(const CsrMatrix& A, const ICholFactor* G,
                                         const MultiVector& R0, index_t k) {
    if (A.rows() > kDiagnosticsCap) {
        throw std::invalid_argument("record_pgcg_diagnostics: capped at n <= 500");
    }
    if (R0.rows() != A.rows()) {
        throw std::invalid_argument("record_pgcg_diagnostics: block size mismatch");
    }
    if (k < 0) {
        throw std::invalid_argument("record_pgcg_diagnostics: negative step count");
    }

    DiagnosticsState st;
    st.K_blocks.push_back(R0);
    for (index_t i = 0; i < k; ++i) {
        MultiVector Pk = apply_pinv(G, st.K_blocks.back());
        st.K_blocks.push_back(mv_apply(A, Pk));
    }

    LinOp op = make_operator(A);
    KrylovConfig cfg;
    cfg.tol = 0.0; // always run the full k iterations
    cfg.max_iters = k;
    auto observer = [&st](index_t, const MultiVector& X, const MultiVector& R) {
        (void)X;
        st.R_history.push_back(R);
    };
    GlobalCgResult run = global_cg(op, G, R0, cfg, nullptr, observer);
    st.X_final = run.X;

    DenseCholesky chol(DenseMatrix::from_csr(A));
    std::vector<MultiVector> AinvK = ainv_blocks(chol, st.K_blocks);
    st.gram_ainv = diamond(st.K_blocks, AinvK);

    if (k > 0) {
        std::vector<MultiVector> PinvK;
        std::vector<MultiVector> APinvK;
        for (index_t i = 0; i < k; ++i) {
            PinvK.push_back(apply_pinv(G, st.K_blocks[static_cast<std::size_t>(i)]));
            APinvK.push_back(mv_apply(A, PinvK.back()));
        }
        st.gram_pap = diamond(PinvK, APinvK);

        std::vector<double> b(static_cast<std::size_t>(k));
        for (index_t i = 0; i < k; ++i) {
            b[static_cast<std::size_t>(i)] = frobenius_inner(PinvK[static_cast<std::size_t>(i)], R0);
        }
        DenseLu lu(st.gram_pap);
        if (!lu.singular()) {
            st.psi = lu.solve(b);
        }
    }
    return st;
}

double pgcg_orthogonality_check_at(const DiagnosticsState& state, const ICholFactor* G,
                                   index_t step) {
    if (step < 0 || static_cast<std::size_t>(step) >= state.R_history.size()) {
        throw std::invalid_argument("pgcg_orthogonality_check: step out of range");
    }
    if (step == 0) return 0.0;

    const MultiVector& Rk = state.R_history[static_cast<std::size_t>(step)];
    const MultiVector PinvRk = apply_pinv(G, Rk);
    const double rk_norm = std::sqrt(std::max(0.0, frobenius_inner(PinvRk, Rk)));

    const MultiVector& R0 = state.R_history.front();
    const MultiVector PinvR0 = apply_pinv(G, R0);
    const double r0_norm = std::sqrt(std::max(0.0, frobenius_inner(PinvR0, R0)));
    const double scale = (rk_norm > 1e-13 * r0_norm) ? rk_norm : r0_norm;

    double worst = 0.0;
    for (index_t i = 0; i < step; ++i) {
        const MultiVector& Ki = state.K_blocks[static_cast<std::size_t>(i)];
        const MultiVector PinvKi = apply_pinv(G, Ki);
        const double ki_norm = std::sqrt(std::max(0.0, frobenius_inner(PinvKi, Ki)));
        if (ki_norm == 0.0 || scale == 0.0) continue;
        const double ip = frobenius_inner(PinvRk, Ki);
        worst = std::max(worst, std::abs(ip) / (scale * ki_norm));
    }
    return worst;
}

double pgcg_orthogonality_check(const DiagnosticsState& state, const ICholFactor* G) {
    if (state.R_history.empty()) {
        throw std::invalid_argument("pgcg_orthogonality_check: empty state");
    }
    return pgcg_orthogonality_check_at(state, G,
                                       static_cast<index_t>(state.R_history.size()) - 1);
}

ErrorIdentityResult error_norm_identity(const CsrMatrix& A, const ICholFactor* G,
                                        const MultiVector& R0, index_t k) {
    DiagnosticsState st = record_pgcg_diagnostics(A, G, R0, k);

    DenseCholesky chol(DenseMatrix::from_csr(A));
    MultiVector E(R0.rows(), R0.cols());
    std::vector<double> sol(static_cast<std::size_t>(R0.rows()));
    for (index_t j = 0; j < R0.cols(); ++j) {
        chol.solve(R0.col(j), sol); // exact solution of A x = r0 column
        for (index_t i = 0; i < R0.rows(); ++i) {
            E.at(i, j) = sol[static_cast<std::size_t>(i)] - st.X_final.at(i, j);
        }
    }
    ErrorIdentityResult out;
    out.lhs = frobenius_inner(E, mv_apply(A, E));

    DenseLu lu(st.gram_ainv);
    if (lu.singular()) {
        out.gram_singular = true;
        out.rhs = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    std::vector<double> e1(static_cast<std::size_t>(k) + 1, 0.0);
    e1[0] = 1.0;
    std::vector<double> y = lu.solve(e1);
    if (y[0] == 0.0) {
        out.gram_singular = true;
        out.rhs = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.rhs = 1.0 / y[0];
    return out;
}

ResidualBoundResult residual_bound_check(const CsrMatrix& A, const ICholFactor* G,
                                         const MultiVector& R0, index_t k) {
    DiagnosticsState st = record_pgcg_diagnostics(A, G, R0, k);
    const index_t n = A.rows();

    ResidualBoundResult out;
    {
        const MultiVector& Rk = st.R_history.back();
        const MultiVector PinvRk = apply_pinv(G, Rk);
        out.residual_sq = frobenius_inner(PinvRk, Rk);
    }

    DenseMatrix Adense = DenseMatrix::from_csr(A);
    DenseCholesky chol(Adense);
    const DenseMatrix& L = chol.lower();
    DenseMatrix Pinv = dense_pinv(G, n);

    // Spectrum of L^T P^{-1} L, the similarity image of A P^{-1}.
    DenseMatrix Meig = matmul(matmul(L.transposed(), Pinv), L);
    EigenResult eig = jacobi_eigen(Meig);

    // gamma = V^T L^{-1} R0, then the diagonal weights are its row sums of squares.
    std::vector<double> dtilde(static_cast<std::size_t>(n), 0.0);
    {
        std::vector<double> y(static_cast<std::size_t>(n));
        for (index_t j = 0; j < R0.cols(); ++j) {
            chol.lower_solve(R0.col(j), y);
            for (index_t i = 0; i < n; ++i) {
                double g = 0.0;
                for (index_t r = 0; r < n; ++r) {
                    g += eig.vectors.at(r, i) * y[static_cast<std::size_t>(r)];
                }
                dtilde[static_cast<std::size_t>(i)] += g * g;
            }
        }
    }

    // W[a][b] = sum_i dtilde_i lambda_i^(a+b), the weighted Vandermonde Gram.
    DenseMatrix W(k + 1, k + 1);
    {
        std::vector<double> pw(static_cast<std::size_t>(n), 1.0);
        std::vector<double> moments(static_cast<std::size_t>(2 * k) + 1, 0.0);
        for (index_t m = 0; m <= 2 * k; ++m) {
            double s = 0.0;
            for (index_t i = 0; i < n; ++i) {
                s += dtilde[static_cast<std::size_t>(i)] * pw[static_cast<std::size_t>(i)];
                pw[static_cast<std::size_t>(i)] *= eig.values[static_cast<std::size_t>(i)];
            }
            moments[static_cast<std::size_t>(m)] = s;
        }
        for (index_t a = 0; a <= k; ++a) {
            for (index_t b = 0; b <= k; ++b) {
                W.at(a, b) = moments[static_cast<std::size_t>(a + b)];
            }
        }
    }
    {
        DenseLu lu(W);
        std::vector<double> e1(static_cast<std::size_t>(k) + 1, 0.0);
        e1[0] = 1.0;
        if (lu.singular()) {
            out.degenerate = true;
        } else {
            std::vector<double> y = lu.solve(e1);
            if (y[0] == 0.0) {
                out.degenerate = true;
            } else {
                out.vandermonde_term = 1.0 / y[0];
            }
        }
    }
    {
        DenseLu lu(st.gram_ainv);
        std::vector<double> e1(static_cast<std::size_t>(k) + 1, 0.0);
        e1[0] = 1.0;
        if (!lu.singular()) {
            std::vector<double> y = lu.solve(e1);
            if (y[0] != 0.0) out.gram_term = 1.0 / y[0];
        }
    }

    // Lanczos in the P^{-1} inner product for the operator X -> A P^{-1} X,
    // started from R0: k + 1 orthonormal blocks.
    std::vector<MultiVector> U;
    std::vector<MultiVector> PinvU;
    {
        MultiVector u = R0;
        MultiVector pu = apply_pinv(G, u);
        const double nrm = std::sqrt(std::max(0.0, frobenius_inner(pu, u)));
        if (nrm == 0.0) {
            throw std::invalid_argument("residual_bound_check: zero start block");
        }
        scale_block(1.0 / nrm, u);
        scale_block(1.0 / nrm, pu);
        U.push_back(std::move(u));
        PinvU.push_back(std::move(pu));
    }
    double eta_prev = 0.0;
    for (index_t i = 0; static_cast<index_t>(U.size()) < k + 1; ++i) {
        MultiVector Wb = mv_apply(A, PinvU[static_cast<std::size_t>(i)]);
        MultiVector PWb = apply_pinv(G, Wb);
        const double alpha = frobenius_inner(PWb, U[static_cast<std::size_t>(i)]);
        out.lanczos.T.diag.push_back(alpha);
        axpy_block(-alpha, U[static_cast<std::size_t>(i)], Wb);
        axpy_block(-alpha, PinvU[static_cast<std::size_t>(i)], PWb);
        if (i > 0) {
            axpy_block(-eta_prev, U[static_cast<std::size_t>(i) - 1], Wb);
            axpy_block(-eta_prev, PinvU[static_cast<std::size_t>(i) - 1], PWb);
        }
        const double eta = std::sqrt(std::max(0.0, frobenius_inner(PWb, Wb)));
        if (eta <= 1e-14 * std::abs(alpha) + 1e-300) {
            out.lanczos.breakdown = true;
            out.degenerate = true;
            break;
        }
        out.lanczos.T.off.push_back(eta);
        scale_block(1.0 / eta, Wb);
        scale_block(1.0 / eta, PWb);
        U.push_back(std::move(Wb));
        PinvU.push_back(std::move(PWb));
        eta_prev = eta;
    }
    // T_k uses the first k diagonal and k-1 off-diagonal entries.
    if (static_cast<index_t>(out.lanczos.T.diag.size()) > k) out.lanczos.T.diag.resize(static_cast<std::size_t>(k));
    if (k > 0 && static_cast<index_t>(out.lanczos.T.off.size()) > k - 1) {
        out.lanczos.T.off.resize(static_cast<std::size_t>(k) - 1);
    }

    if (k == 0) {
        out.lanczos.theta = 1.0; // theta^0 = 1, the value never enters
    } else if (!out.lanczos.T.diag.empty()) {
        EigenResult te = jacobi_eigen(densify(out.lanczos.T));
        out.lanczos.theta = te.values.front();
    }

    if (!out.degenerate) {
        DenseMatrix gram_hat = diamond(U, ainv_blocks(chol, U));
        EigenResult ge = jacobi_eigen(gram_hat);
        if (ge.values.front() <= 0.0) {
            out.degenerate = true;
        } else {
            out.lanczos.theta_tilde = 1.0 / ge.values.front();
            out.lanczos.T_hat = extract_tridiag(dense_inverse(gram_hat));
        }
    }

    if (!out.degenerate && out.lanczos.theta > 0.0) {
        out.bound = out.vandermonde_term *
                    std::pow(out.lanczos.theta_tilde, static_cast<double>(k + 1)) /
                    std::pow(out.lanczos.theta, static_cast<double>(k));
    } else {
        out.degenerate = true;
    }
    return out;
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsState& state,
                           const LanczosData* lanczos) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_diagnostics_csv: cannot open " + path);
    }
    out << "section,i,j,value\n";
    auto dump = [&out](const char* name, const DenseMatrix& M) {
        for (index_t i = 0; i < M.rows(); ++i) {
            for (index_t j = 0; j < M.cols(); ++j) {
                out << name << ',' << i << ',' << j << ',' << M.at(i, j) << '\n';
            }
        }
    };
    dump("gram_ainv", state.gram_ainv);
    dump("gram_pap", state.gram_pap);
    for (std::size_t i = 0; i < state.psi.size(); ++i) {
        out << "psi," << i << ",0," << state.psi[i] << '\n';
    }
    if (lanczos != nullptr) {
        for (std::size_t i = 0; i < lanczos->T.diag.size(); ++i) {
            out << "T_diag," << i << ",0," << lanczos->T.diag[i] << '\n';
        }
        for (std::size_t i = 0; i < lanczos->T.off.size(); ++i) {
            out << "T_off," << i << ",0," << lanczos->T.off[i] << '\n';
        }
        out << "theta,0,0," << lanczos->theta << '\n';
        out << "theta_tilde,0,0," << lanczos->theta_tilde << '\n';
    }
}

} // namespace gstokes

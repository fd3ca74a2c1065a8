#include "gstokes/regularized_precond.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "gstokes/global_cg.hpp"
#include "gstokes/pcg.hpp"
#include "gstokes/vector_ops.hpp"

namespace gstokes {

namespace {

std::vector<double> random_unit(index_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = dist(gen);
    const double nrm = nrm2(v);
    if (nrm > 0.0) scal(1.0 / nrm, v);
    return v;
}

// lambda_max estimate of a symmetric positive semidefinite operator.
struct PowerResult {
    double value = 0.0;
    bool stagnated = false;
};

PowerResult power_iteration(const LinOp& op, unsigned seed, int iters = 50) {
    std::vector<double> v = random_unit(op.n, seed);
    std::vector<double> w(static_cast<std::size_t>(op.n));
    double lambda = 0.0;
    double lambda_prev = 0.0;
    for (int i = 0; i < iters; ++i) {
        op.apply(v, w);
        lambda_prev = lambda;
        lambda = dot(v, w);
        const double nrm = nrm2(w);
        if (nrm == 0.0) {
            return {0.0, false}; // operator annihilates the iterate: top value 0
        }
        for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / nrm;
    }
    PowerResult out;
    out.value = lambda;
    out.stagnated = std::abs(lambda - lambda_prev) > 1e-3 * std::max(std::abs(lambda), 1e-30);
    return out;
}

} // namespace

BetaEstimate beta_heuristic(const SaddleSystem& sys, double safety, unsigned seed) {
    // Two requirements pull beta in opposite directions. The Schur operator
    // beta Q - B (A^{-1} x I3) B^T must stay positive definite, which bounds
    // beta below by the largest eigenvalue of the (S0, Q) pencil. Convergence
    // wants beta Q to mimic the stabilization block C so the non-unit
    // eigenvalues of the preconditioned matrix cluster at 1; the Q-weighted
    // average of that match is trace(C)/trace(Q). Take the larger of the two.
    const std::vector<double> diag_q = sys.Q.diag();
    const std::vector<double> diag_c = sys.C.diag();
    double trace_q = 0.0;
    double trace_c = 0.0;
    for (double x : diag_q) {
        if (x <= 0.0) throw std::domain_error("beta_heuristic: nonpositive diagonal in Q");
        trace_q += x;
    }
    for (double x : diag_c) trace_c += x;
    const double match = trace_c / trace_q;

    // Generalized power iteration on S0 v = lambda Q v. Every S0 application
    // costs three A-solves; all solves run on incomplete-Cholesky PCG.
    ICholFactor ica = ichol0(sys.A);
    ICholFactor icq = ichol0(sys.Q);
    LinOp aop = make_operator(sys.A);
    LinOp qop = make_operator(sys.Q);
    KrylovConfig icfg;
    icfg.tol = 1e-10;
    icfg.max_iters = 500;

    std::vector<const CsrMatrix*> Bs = {&sys.B1, &sys.B2, &sys.B3};
    std::vector<const CsrMatrix*> Bts = {&sys.B1t, &sys.B2t, &sys.B3t};
    auto apply_s0 = [&](std::span<const double> p, std::vector<double>& y) {
        std::vector<double> t(static_cast<std::size_t>(sys.n_u));
        std::vector<double> s(static_cast<std::size_t>(sys.n_p));
        std::fill(y.begin(), y.end(), 0.0);
        for (int j = 0; j < 3; ++j) {
            spmv(*Bts[static_cast<std::size_t>(j)], p, t);
            PcgResult r = pcg(aop, &ica, t, icfg);
            spmv(*Bs[static_cast<std::size_t>(j)], r.x, s);
            for (std::size_t i = 0; i < s.size(); ++i) y[i] += s[i];
        }
    };

    std::vector<double> v = random_unit(sys.n_p, seed);
    std::vector<double> w(static_cast<std::size_t>(sys.n_p));
    double pencil_top = 0.0;
    double pencil_prev = 0.0;
    for (int i = 0; i < 30; ++i) {
        apply_s0(v, w);
        std::vector<double> qv(static_cast<std::size_t>(sys.n_p));
        spmv(sys.Q, v, qv);
        const double den = dot(v, qv);
        if (!(den > 0.0)) throw std::domain_error("beta_heuristic: Q is not positive definite");
        pencil_prev = pencil_top;
        pencil_top = dot(v, w) / den;
        PcgResult r = pcg(qop, &icq, w, icfg); // v <- Q^{-1} S0 v
        const double nrm = nrm2(r.x);
        if (nrm == 0.0) break; // iterate annihilated: pencil top is 0
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = r.x[j] / nrm;
    }

    BetaEstimate out;
    out.value = std::max({match, safety * pencil_top, 1e-8});
    out.stagnated =
        std::abs(pencil_top - pencil_prev) > 1e-3 * std::max(pencil_top, 1e-30);
    return out;
}

CsrMatrix schur_surrogate(const SaddleSystem& sys, double beta) {
    std::vector<double> dinv = sys.A.diag();
    for (double& x : dinv) {
        if (x <= 0.0) throw std::domain_error("schur_surrogate: nonpositive diagonal in A");
        x = 1.0 / x;
    }

    std::vector<Triplet> trip;
    for (index_t i = 0; i < sys.Q.rows(); ++i) {
        for (index_t k = sys.Q.row_ptr()[static_cast<std::size_t>(i)];
             k < sys.Q.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            trip.push_back({i, sys.Q.col_idx()[static_cast<std::size_t>(k)],
                            beta * sys.Q.values()[static_cast<std::size_t>(k)]});
        }
    }
    // B_j diag^{-1} B_j^T accumulated row-of-transpose by row-of-transpose:
    // velocity dof v couples every pair of pressure rows that reference it.
    const CsrMatrix* Bts[3] = {&sys.B1t, &sys.B2t, &sys.B3t};
    for (const CsrMatrix* Bt : Bts) {
        for (index_t v = 0; v < Bt->rows(); ++v) {
            const index_t begin = Bt->row_ptr()[static_cast<std::size_t>(v)];
            const index_t end = Bt->row_ptr()[static_cast<std::size_t>(v) + 1];
            const double w = dinv[static_cast<std::size_t>(v)];
            for (index_t ka = begin; ka < end; ++ka) {
                const index_t a = Bt->col_idx()[static_cast<std::size_t>(ka)];
                const double va = Bt->values()[static_cast<std::size_t>(ka)];
                for (index_t kb = begin; kb < end; ++kb) {
                    const index_t b = Bt->col_idx()[static_cast<std::size_t>(kb)];
                    const double vb = Bt->values()[static_cast<std::size_t>(kb)];
                    trip.push_back({a, b, w * va * vb});
                }
            }
        }
    }
    return CsrMatrix::from_triplets(sys.n_p, sys.n_p, trip);
}

RegularizedPrecond::RegularizedPrecond(const SaddleSystem& sys, const PrecondConfig& cfg)
    : sys_(sys), cfg_(cfg) {
    if (!(cfg_.beta > 0.0)) {
        throw std::invalid_argument("RegularizedPrecond: beta must be positive");
    }
    ichol_a_ = ichol0(sys_.A);
    ichol_s_ = ichol0(schur_surrogate(sys_, cfg_.beta));
    if (cfg_.check_certificate) {
        estimate_certificate();
    }
    reset_counters();
}

void RegularizedPrecond::estimate_certificate() {
    // lambda_max of B (A^{-1} x I3) B^T with true inner solves.
    LinOp op;
    op.n = sys_.n_p;
    op.apply = [this](std::span<const double> p, std::span<double> y) {
        std::vector<double> s = schur_apply(p);
        // schur_apply returns beta Q p - B A^{-1} B^T p; recover the product part.
        std::vector<double> qp(static_cast<std::size_t>(sys_.n_p));
        spmv(sys_.Q, p, qp);
        for (std::size_t i = 0; i < s.size(); ++i) {
            y[i] = cfg_.beta * qp[i] - s[i];
        }
    };
    PowerResult top = power_iteration(op, cfg_.seed);
    cert_lambda_max_ = top.value;

    ICholFactor icq = ichol0(sys_.Q);
    LinOp qop = make_operator(sys_.Q);
    KrylovConfig icfg;
    icfg.tol = 1e-12;
    icfg.max_iters = 500;
    std::vector<double> v = random_unit(sys_.n_p, cfg_.seed + 1);
    double qmin = 1.0;
    for (int i = 0; i < 50; ++i) {
        PcgResult r = pcg(qop, &icq, v, icfg);
        const double rq = dot(v, r.x);
        if (!(rq > 0.0)) throw std::domain_error("RegularizedPrecond: Q is not positive definite");
        qmin = 1.0 / rq;
        const double nrm = nrm2(r.x);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = r.x[j] / nrm;
    }
    cert_lambda_min_q_ = qmin;
    certificate_ok_ = cfg_.beta * qmin > cert_lambda_max_;
}

std::vector<double> RegularizedPrecond::solve_a_scalar(std::span<const double> b,
                                                       std::span<const double> x0) const {
    LinOp op;
    op.n = sys_.n_u;
    op.apply = [this](std::span<const double> x, std::span<double> y) {
        spmv(sys_.A, x, y);
        a_scalar_applies_.fetch_add(1, std::memory_order_relaxed);
    };
    KrylovConfig cfg;
    cfg.tol = cfg_.tol_a;
    cfg.max_iters = cfg_.max_inner;
    PcgResult r = pcg(op, &ichol_a_, b, cfg, x0);
    if (!r.report.converged) inner_failures_.fetch_add(1, std::memory_order_relaxed);
    return std::move(r.x);
}

MultiVector RegularizedPrecond::solve_a_block(const MultiVector& H, const MultiVector* X0) const {
    LinOp op;
    op.n = sys_.n_u;
    op.apply = [this](std::span<const double> x, std::span<double> y) {
        spmv(sys_.A, x, y);
        a_block_column_applies_.fetch_add(1, std::memory_order_relaxed);
    };
    KrylovConfig cfg;
    cfg.tol = cfg_.tol_a;
    cfg.max_iters = cfg_.max_inner;
    GlobalCgResult r = global_cg(op, &ichol_a_, H, cfg, X0);
    if (!r.report.converged) inner_failures_.fetch_add(1, std::memory_order_relaxed);
    return std::move(r.X);
}

std::vector<double> RegularizedPrecond::schur_apply(std::span<const double> p) const {
    if (static_cast<index_t>(p.size()) != sys_.n_p) {
        throw std::invalid_argument("schur_apply: size mismatch");
    }
    std::vector<double> y(static_cast<std::size_t>(sys_.n_p));
    spmv(sys_.Q, p, y);
    for (double& v : y) v *= cfg_.beta;

    const CsrMatrix* Bs[3] = {&sys_.B1, &sys_.B2, &sys_.B3};
    const CsrMatrix* Bts[3] = {&sys_.B1t, &sys_.B2t, &sys_.B3t};
    std::vector<double> s(static_cast<std::size_t>(sys_.n_p));

    if (cfg_.mode == PrecondMode::pgr) {
        MultiVector H(sys_.n_u, 3);
        for (int j = 0; j < 3; ++j) {
            std::vector<double> t(static_cast<std::size_t>(sys_.n_u));
            spmv(*Bts[j], p, t);
            std::copy(t.begin(), t.end(), H.col(j).begin());
        }
        MultiVector T = solve_a_block(H, nullptr);
        for (int j = 0; j < 3; ++j) {
            spmv(*Bs[j], T.col(j), s);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= s[i];
        }
    } else {
        std::vector<double> t(static_cast<std::size_t>(sys_.n_u));
        for (int j = 0; j < 3; ++j) {
            spmv(*Bts[j], p, t);
            std::vector<double> x = solve_a_scalar(t, {});
            spmv(*Bs[j], x, s);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= s[i];
        }
    }
    return y;
}

std::vector<double> RegularizedPrecond::solve_schur(std::span<const double> rhs) const {
    LinOp sop;
    sop.n = sys_.n_p;
    sop.apply = [this](std::span<const double> p, std::span<double> y) {
        std::vector<double> s = schur_apply(p);
        std::copy(s.begin(), s.end(), y.begin());
        schur_iters_.fetch_add(1, std::memory_order_relaxed);
    };
    KrylovConfig cfg;
    cfg.tol = cfg_.tol_s;
    cfg.max_iters = cfg_.max_inner;
    PcgResult r = pcg(sop, &ichol_s_, rhs, cfg);
    if (!r.report.converged) inner_failures_.fetch_add(1, std::memory_order_relaxed);
    return std::move(r.x);
}

BlockVector RegularizedPrecond::apply(const BlockVector& v) const {
    const CsrMatrix* Bs[3] = {&sys_.B1, &sys_.B2, &sys_.B3};
    const CsrMatrix* Bts[3] = {&sys_.B1t, &sys_.B2t, &sys_.B3t};
    const std::vector<double>* vu[3] = {&v.u1, &v.u2, &v.u3};

    // Pressure stage: S z4 = C v4 - sum_j B_j A^{-1} B_j^T v4.
    std::vector<double> rhs_s(static_cast<std::size_t>(sys_.n_p));
    spmv(sys_.C, v.p, rhs_s);
    std::vector<double> bt_v4[3];
    for (int j = 0; j < 3; ++j) {
        bt_v4[j].resize(static_cast<std::size_t>(sys_.n_u));
        spmv(*Bts[j], v.p, bt_v4[j]);
    }
    std::vector<double> s(static_cast<std::size_t>(sys_.n_p));
    if (cfg_.mode == PrecondMode::pgr) {
        MultiVector H(sys_.n_u, 3);
        for (int j = 0; j < 3; ++j) {
            std::copy(bt_v4[j].begin(), bt_v4[j].end(), H.col(j).begin());
        }
        MultiVector T = solve_a_block(H, nullptr);
        for (int j = 0; j < 3; ++j) {
            spmv(*Bs[j], T.col(j), s);
            for (std::size_t i = 0; i < rhs_s.size(); ++i) rhs_s[i] -= s[i];
        }
    } else {
        for (int j = 0; j < 3; ++j) {
            std::vector<double> t = solve_a_scalar(bt_v4[j], {});
            spmv(*Bs[j], t, s);
            for (std::size_t i = 0; i < rhs_s.size(); ++i) rhs_s[i] -= s[i];
        }
    }
    BlockVector z = BlockVector::zero(sys_.n_u, sys_.n_p);
    z.p = solve_schur(rhs_s);

    // Velocity stage: A z_j = A v_j + B_j^T (v4 - z4), warm-started at v_j.
    std::vector<double> d4(static_cast<std::size_t>(sys_.n_p));
    for (index_t i = 0; i < sys_.n_p; ++i) {
        d4[static_cast<std::size_t>(i)] = v.p[static_cast<std::size_t>(i)] - z.p[static_cast<std::size_t>(i)];
    }
    std::vector<double>* zu[3] = {&z.u1, &z.u2, &z.u3};
    if (cfg_.mode == PrecondMode::pgr) {
        MultiVector H(sys_.n_u, 3);
        MultiVector X0(sys_.n_u, 3);
        std::vector<double> h(static_cast<std::size_t>(sys_.n_u));
        std::vector<double> bt(static_cast<std::size_t>(sys_.n_u));
        for (int j = 0; j < 3; ++j) {
            spmv(sys_.A, *vu[j], h);
            spmv(*Bts[j], d4, bt);
            for (std::size_t i = 0; i < h.size(); ++i) h[i] += bt[i];
            std::copy(h.begin(), h.end(), H.col(j).begin());
            std::copy(vu[j]->begin(), vu[j]->end(), X0.col(j).begin());
        }
        MultiVector X = solve_a_block(H, &X0);
        for (int j = 0; j < 3; ++j) {
            zu[j]->assign(X.col(j).begin(), X.col(j).end());
        }
    } else {
        std::vector<double> h(static_cast<std::size_t>(sys_.n_u));
        std::vector<double> bt(static_cast<std::size_t>(sys_.n_u));
        for (int j = 0; j < 3; ++j) {
            spmv(sys_.A, *vu[j], h);
            spmv(*Bts[j], d4, bt);
            for (std::size_t i = 0; i < h.size(); ++i) h[i] += bt[i];
            *zu[j] = solve_a_scalar(h, *vu[j]);
        }
    }
    return z;
}

BlockVector RegularizedPrecond::solve(const BlockVector& w) const {
    const CsrMatrix* Bs[3] = {&sys_.B1, &sys_.B2, &sys_.B3};
    const CsrMatrix* Bts[3] = {&sys_.B1t, &sys_.B2t, &sys_.B3t};
    const std::vector<double>* wu[3] = {&w.u1, &w.u2, &w.u3};

    // t = A^{-1} [w1 w2 w3]
    std::vector<double> t[3];
    if (cfg_.mode == PrecondMode::pgr) {
        MultiVector H(sys_.n_u, 3);
        for (int j = 0; j < 3; ++j) {
            std::copy(wu[j]->begin(), wu[j]->end(), H.col(j).begin());
        }
        MultiVector T = solve_a_block(H, nullptr);
        for (int j = 0; j < 3; ++j) t[j].assign(T.col(j).begin(), T.col(j).end());
    } else {
        for (int j = 0; j < 3; ++j) t[j] = solve_a_scalar(*wu[j], {});
    }

    // S z4 = w4 - sum_j B_j t_j
    std::vector<double> rhs_s = w.p;
    std::vector<double> s(static_cast<std::size_t>(sys_.n_p));
    for (int j = 0; j < 3; ++j) {
        spmv(*Bs[j], t[j], s);
        for (std::size_t i = 0; i < rhs_s.size(); ++i) rhs_s[i] -= s[i];
    }
    BlockVector z = BlockVector::zero(sys_.n_u, sys_.n_p);
    z.p = solve_schur(rhs_s);

    // z_j = t_j - A^{-1} B_j^T z4
    std::vector<double>* zu[3] = {&z.u1, &z.u2, &z.u3};
    if (cfg_.mode == PrecondMode::pgr) {
        MultiVector H(sys_.n_u, 3);
        std::vector<double> bt(static_cast<std::size_t>(sys_.n_u));
        for (int j = 0; j < 3; ++j) {
            spmv(*Bts[j], z.p, bt);
            std::copy(bt.begin(), bt.end(), H.col(j).begin());
        }
        MultiVector Y = solve_a_block(H, nullptr);
        for (int j = 0; j < 3; ++j) {
            zu[j]->resize(t[j].size());
            for (std::size_t i = 0; i < t[j].size(); ++i) {
                (*zu[j])[i] = t[j][i] - Y.at(static_cast<index_t>(i), j);
            }
        }
    } else {
        std::vector<double> bt(static_cast<std::size_t>(sys_.n_u));
        for (int j = 0; j < 3; ++j) {
            spmv(*Bts[j], z.p, bt);
            std::vector<double> y = solve_a_scalar(bt, {});
            zu[j]->resize(t[j].size());
            for (std::size_t i = 0; i < t[j].size(); ++i) {
                (*zu[j])[i] = t[j][i] - y[i];
            }
        }
    }
    return z;
}

LinOp RegularizedPrecond::fused_operator() const {
    LinOp op;
    op.n = 3 * sys_.n_u + sys_.n_p;
    op.apply = [this](std::span<const double> x, std::span<double> y) {
        BlockVector v = BlockVector::from_flat(sys_.n_u, sys_.n_p, x);
        std::vector<double> out = apply(v).flatten();
        std::copy(out.begin(), out.end(), y.begin());
    };
    return op;
}

LinOp RegularizedPrecond::solver_operator() const {
    LinOp op;
    op.n = 3 * sys_.n_u + sys_.n_p;
    op.apply = [this](std::span<const double> x, std::span<double> y) {
        BlockVector w = BlockVector::from_flat(sys_.n_u, sys_.n_p, x);
        std::vector<double> out = solve(w).flatten();
        std::copy(out.begin(), out.end(), y.begin());
    };
    return op;
}

long long RegularizedPrecond::inner_a_sweeps() const {
    return a_scalar_applies_.load() + a_block_column_applies_.load() / 3;
}

void RegularizedPrecond::reset_counters() const {
    a_scalar_applies_.store(0);
    a_block_column_applies_.store(0);
    schur_iters_.store(0);
    inner_failures_.store(0);
}

BlockVector apply_pr(const RegularizedPrecond& pc, const BlockVector& v) {
    if (pc.mode() != PrecondMode::pr) {
        throw std::invalid_argument("apply_pr: preconditioner is not in pr mode");
    }
    return pc.apply(v);
}

BlockVector apply_pgr(const RegularizedPrecond& pc, const BlockVector& v) {
    if (pc.mode() != PrecondMode::pgr) {
        throw std::invalid_argument("apply_pgr: preconditioner is not in pgr mode");
    }
    return pc.apply(v);
}

} // namespace gstokes

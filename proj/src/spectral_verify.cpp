#include "gstokes/spectral_verify.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gstokes/eigen_oracles.hpp"

namespace gstokes {

namespace {

void place_block(DenseMatrix& M, const CsrMatrix& A, index_t roff, index_t coff) {
    for (index_t i = 0; i < A.rows(); ++i) {
        for (index_t k = A.row_ptr()[static_cast<std::size_t>(i)];
             k < A.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            M.at(roff + i, coff + A.col_idx()[static_cast<std::size_t>(k)]) +=
                A.values()[static_cast<std::size_t>(k)];
        }
    }
}

void check_oracle_scale(const SaddleSystem& sys) {
    if (3 * sys.n_u + sys.n_p > 2000) {
        throw std::invalid_argument("dense verification: oracle scale exceeded");
    }
}

} // namespace

DenseMatrix dense_saddle(const SaddleSystem& sys) {
    check_oracle_scale(sys);
    const index_t nu = sys.n_u;
    const index_t N = 3 * nu + sys.n_p;
    DenseMatrix M(N, N);
    place_block(M, sys.A, 0, 0);
    place_block(M, sys.A, nu, nu);
    place_block(M, sys.A, 2 * nu, 2 * nu);
    place_block(M, sys.B1t, 0, 3 * nu);
    place_block(M, sys.B2t, nu, 3 * nu);
    place_block(M, sys.B3t, 2 * nu, 3 * nu);
    place_block(M, sys.B1, 3 * nu, 0);
    place_block(M, sys.B2, 3 * nu, nu);
    place_block(M, sys.B3, 3 * nu, 2 * nu);
    place_block(M, sys.C, 3 * nu, 3 * nu);
    return M;
}

DenseMatrix dense_pr(const SaddleSystem& sys, double beta) {
    check_oracle_scale(sys);
    const index_t nu = sys.n_u;
    const index_t N = 3 * nu + sys.n_p;
    DenseMatrix M(N, N);
    place_block(M, sys.A, 0, 0);
    place_block(M, sys.A, nu, nu);
    place_block(M, sys.A, 2 * nu, 2 * nu);
    place_block(M, sys.B1t, 0, 3 * nu);
    place_block(M, sys.B2t, nu, 3 * nu);
    place_block(M, sys.B3t, 2 * nu, 3 * nu);
    place_block(M, sys.B1, 3 * nu, 0);
    place_block(M, sys.B2, 3 * nu, nu);
    place_block(M, sys.B3, 3 * nu, 2 * nu);
    for (index_t i = 0; i < sys.Q.rows(); ++i) {
        for (index_t k = sys.Q.row_ptr()[static_cast<std::size_t>(i)];
             k < sys.Q.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
            M.at(3 * nu + i, 3 * nu + sys.Q.col_idx()[static_cast<std::size_t>(k)]) +=
                beta * sys.Q.values()[static_cast<std::size_t>(k)];
        }
    }
    return M;
}

DenseMatrix dense_schur_s0(const SaddleSystem& sys) {
    check_oracle_scale(sys);
    DenseMatrix Ainv = dense_inverse(DenseMatrix::from_csr(sys.A));
    const CsrMatrix* Bs[3] = {&sys.B1, &sys.B2, &sys.B3};
    DenseMatrix S0(sys.n_p, sys.n_p);
    for (const CsrMatrix* B : Bs) {
        DenseMatrix Bd = DenseMatrix::from_csr(*B);
        DenseMatrix T = matmul(Bd, matmul(Ainv, Bd.transposed()));
        S0 = add(S0, T);
    }
    // Symmetrize away the multiplication roundoff.
    for (index_t i = 0; i < S0.rows(); ++i) {
        for (index_t j = i + 1; j < S0.cols(); ++j) {
            const double v = 0.5 * (S0.at(i, j) + S0.at(j, i));
            S0.at(i, j) = v;
            S0.at(j, i) = v;
        }
    }
    return S0;
}

Theorem21Report verify_theorem21(const SaddleSystem& sys, double beta) {
    check_oracle_scale(sys);
    Theorem21Report rep;
    rep.beta = beta;
    rep.n_u = sys.n_u;
    rep.n_p = sys.n_p;

    DenseMatrix Cd = DenseMatrix::from_csr(sys.C);
    DenseMatrix Qd = DenseMatrix::from_csr(sys.Q);

    // Structural multiplicity: the saddle matrix and the preconditioner agree
    // except on the pressure-pressure block, so eigenvalue 1 of the
    // preconditioned matrix has multiplicity N - rank(C - beta Q).
    DenseMatrix shift(sys.n_p, sys.n_p);
    for (index_t i = 0; i < sys.n_p; ++i) {
        for (index_t j = 0; j < sys.n_p; ++j) {
            shift.at(i, j) = Cd.at(i, j) - beta * Qd.at(i, j);
        }
    }
    const index_t rank = symmetric_rank(shift);
    rep.stab_shift_nonsingular = (rank == sys.n_p);
    rep.multiplicity_one = 3 * sys.n_u + sys.n_p - rank;

    // The eigenvector family (u; 0): apply the dense preconditioned matrix.
    {
        DenseMatrix Pr = dense_pr(sys, beta);
        DenseLu lu(Pr);
        std::mt19937 gen(2024);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 3; ++trial) {
            BlockVector v = BlockVector::zero(sys.n_u, sys.n_p);
            for (auto* part : {&v.u1, &v.u2, &v.u3}) {
                for (double& x : *part) x = dist(gen);
            }
            const std::vector<double> flat = v.flatten();
            const std::vector<double> av = apply_saddle(sys, v).flatten();
            std::vector<double> z(flat.size());
            lu.solve(av, z);
            double diff = 0.0;
            double nrm = 0.0;
            for (std::size_t i = 0; i < flat.size(); ++i) {
                diff += (z[i] - flat[i]) * (z[i] - flat[i]);
                nrm += flat[i] * flat[i];
            }
            worst = std::max(worst, std::sqrt(diff) / std::sqrt(nrm));
        }
        rep.family_residual = worst;
    }

    DenseMatrix S0 = dense_schur_s0(sys);

    auto pencil_reports = [&](double b) {
        DenseMatrix Mleft = subtract(S0, Cd);
        DenseMatrix Mright = S0;
        for (index_t i = 0; i < sys.n_p; ++i) {
            for (index_t j = 0; j < sys.n_p; ++j) {
                Mright.at(i, j) += b * Qd.at(i, j);
            }
        }
        EigenResult eig = gen_sym_eigen(Mleft, Mright);
        std::vector<EigenReport> out;
        std::vector<double> p(static_cast<std::size_t>(sys.n_p));
        for (index_t m = 0; m < sys.n_p; ++m) {
            for (index_t i = 0; i < sys.n_p; ++i) {
                p[static_cast<std::size_t>(i)] = eig.vectors.at(i, m);
            }
            double pp = 0.0;
            for (double x : p) pp += x * x;
            auto rayleigh = [&](const DenseMatrix& M) {
                const std::vector<double> Mp = matvec(M, p);
                double s = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) s += p[i] * Mp[i];
                return s / pp;
            };
            EigenReport er;
            er.lambda = eig.values[static_cast<std::size_t>(m)];
            er.a = rayleigh(S0);
            er.c = rayleigh(Cd);
            er.q = rayleigh(Qd);
            er.formula_residual = std::abs(er.lambda - (er.a - er.c) / (er.a + b * er.q));
            out.push_back(er);
        }
        return out;
    };

    rep.pressure_modes = pencil_reports(beta);
    for (const EigenReport& er : rep.pressure_modes) {
        rep.max_formula_residual = std::max(rep.max_formula_residual, er.formula_residual);
    }

    // Sign hypotheses, evaluated as conditional diagnostics.
    {
        EigenResult s0e = jacobi_eigen(S0);
        EigenResult ce = jacobi_eigen(Cd);
        const double s0_min = s0e.values.front();
        const double s0_max = s0e.values.back();
        const double c_min = ce.values.front();
        const double c_max = ce.values.back();

        rep.positive_case.lhs = s0_max;
        rep.positive_case.rhs = c_min;
        rep.positive_case.triggered = s0_max < c_min;
        if (rep.positive_case.triggered) {
            rep.positive_case.conclusion_holds = true;
            for (const EigenReport& er : rep.pressure_modes) {
                if (!(er.lambda > 0.0)) rep.positive_case.conclusion_holds = false;
            }
        }
        rep.negative_case.lhs = s0_min;
        rep.negative_case.rhs = c_max;
        rep.negative_case.triggered = s0_min > c_max;
        if (rep.negative_case.triggered) {
            rep.negative_case.conclusion_holds = true;
            for (const EigenReport& er : rep.pressure_modes) {
                if (!(er.lambda < 0.0)) rep.negative_case.conclusion_holds = false;
            }
        }
    }

    // Small-beta limit of the eigenvalue formula. The limit statement divides
    // by a, so modes whose velocity-coupling quotient vanishes (p nearly in
    // the kernel of B^T, which happens on the coarsest meshes) are excluded
    // and counted instead.
    {
        std::vector<EigenReport> lim = pencil_reports(rep.limit_beta);
        double a_max = 0.0;
        for (const EigenReport& er : lim) a_max = std::max(a_max, er.a);
        for (const EigenReport& er : lim) {
            if (er.a <= 1e-8 * a_max) {
                ++rep.limit_excluded_modes;
                continue;
            }
            const double predicted = 1.0 - er.c / er.a;
            rep.limit_max_deviation =
                std::max(rep.limit_max_deviation, std::abs(er.lambda - predicted));
        }
    }
    return rep;
}

Prop1Report verify_proposition1(const SaddleSystem& sys, double beta) {
    check_oracle_scale(sys);
    Prop1Report rep;
    rep.beta = beta;

    const index_t nu = sys.n_u;
    const index_t np = sys.n_p;
    const index_t N = 3 * nu + np;

    DenseMatrix Ainv = dense_inverse(DenseMatrix::from_csr(sys.A));
    DenseMatrix S0 = dense_schur_s0(sys);
    DenseMatrix Qd = DenseMatrix::from_csr(sys.Q);
    DenseMatrix S(np, np);
    for (index_t i = 0; i < np; ++i) {
        for (index_t j = 0; j < np; ++j) {
            S.at(i, j) = beta * Qd.at(i, j) - S0.at(i, j);
        }
    }

    // B (A^{-1} x I3) as an n_p x 3n_u block row.
    const CsrMatrix* Bs[3] = {&sys.B1, &sys.B2, &sys.B3};
    DenseMatrix BAinv(np, 3 * nu);
    for (int j = 0; j < 3; ++j) {
        DenseMatrix T = matmul(DenseMatrix::from_csr(*Bs[j]), Ainv);
        for (index_t r = 0; r < np; ++r) {
            for (index_t col = 0; col < nu; ++col) {
                BAinv.at(r, j * nu + col) = T.at(r, col);
            }
        }
    }

    DenseMatrix F1 = DenseMatrix::identity(N);
    for (index_t r = 0; r < np; ++r) {
        for (index_t col = 0; col < 3 * nu; ++col) {
            F1.at(3 * nu + r, col) = BAinv.at(r, col);
        }
    }
    DenseMatrix F2(N, N);
    {
        DenseMatrix Ad = DenseMatrix::from_csr(sys.A);
        for (int b = 0; b < 3; ++b) {
            for (index_t i = 0; i < nu; ++i) {
                for (index_t j = 0; j < nu; ++j) {
                    F2.at(b * nu + i, b * nu + j) = Ad.at(i, j);
                }
            }
        }
        for (index_t i = 0; i < np; ++i) {
            for (index_t j = 0; j < np; ++j) {
                F2.at(3 * nu + i, 3 * nu + j) = S.at(i, j);
            }
        }
    }
    DenseMatrix F3 = DenseMatrix::identity(N);
    for (index_t r = 0; r < 3 * nu; ++r) {
        for (index_t col = 0; col < np; ++col) {
            F3.at(r, 3 * nu + col) = BAinv.at(col, r); // (A^{-1} x I3) B^T
        }
    }

    DenseMatrix product = matmul(matmul(F1, F2), F3);
    DenseMatrix Pr = dense_pr(sys, beta);
    rep.factorization_gap =
        subtract(product, Pr).frobenius_norm() / std::max(Pr.frobenius_norm(), 1e-300);

    rep.lambda_min_q = jacobi_eigen(Qd).values.front();
    EigenResult s0e = jacobi_eigen(S0);
    rep.lambda_max_s0 = s0e.values.back();
    rep.certificate_holds = beta * rep.lambda_min_q > rep.lambda_max_s0;

    EigenResult se = jacobi_eigen(S);
    rep.lambda_min_s = se.values.front();
    if (rep.certificate_holds) {
        rep.spd_checked = true;
        try {
            DenseCholesky chol(S);
            (void)chol;
            rep.schur_spd = true;
        } catch (const std::domain_error&) {
            rep.schur_spd = false;
        }
    } else {
        rep.s_indefinite = rep.lambda_min_s <= 0.0;
    }
    return rep;
}

std::string theorem21_report_text(const Theorem21Report& rep) {
    std::ostringstream os;
    os << "spectral report (beta = " << rep.beta << ")\n";
    os << "  velocity dofs per component: " << rep.n_u << ", pressure dofs: " << rep.n_p << "\n";
    os << "  eigenvalue-1 multiplicity (structural): " << rep.multiplicity_one
       << " (expected " << 3 * rep.n_u << ")\n";
    os << "  C - beta Q nonsingular: " << (rep.stab_shift_nonsingular ? "yes" : "no") << "\n";
    os << "  (u;0) family residual: " << rep.family_residual << "\n";
    os << "  pressure modes: " << rep.pressure_modes.size()
       << ", formula residual max |lambda - (a-c)/(a+beta q)| = "
       << rep.max_formula_residual << "\n";
    auto sign_line = [&os](const char* name, const SignCheckReport& sc) {
        os << "  " << name << ": ";
        if (!sc.triggered) {
            os << "hypothesis not triggered (" << sc.lhs << " vs " << sc.rhs << ")\n";
        } else {
            os << "triggered; predicted sign "
               << (sc.conclusion_holds ? "observed" : "VIOLATED") << "\n";
        }
    };
    sign_line("all-positive case", rep.positive_case);
    sign_line("all-negative case", rep.negative_case);
    os << "  small-beta limit (beta = " << rep.limit_beta
       << "): max |lambda - (1 - c/a)| = " << rep.limit_max_deviation;
    if (rep.limit_excluded_modes > 0)
        os << "  (" << rep.limit_excluded_modes << " kernel modes skipped)";
    os << "\n";
    return os.str();
}

std::string prop1_report_text(const Prop1Report& rep) {
    std::ostringstream os;
    os << "factorization report (beta = " << rep.beta << ")\n";
    os << "  relative product gap: " << rep.factorization_gap << "\n";
    os << "  lambda_min(Q) = " << rep.lambda_min_q
       << ", lambda_max(S0) = " << rep.lambda_max_s0 << "\n";
    os << "  certificate beta*lambda_min(Q) > lambda_max(S0): "
       << (rep.certificate_holds ? "holds" : "fails") << "\n";
    if (rep.spd_checked) {
        os << "  Schur block SPD: " << (rep.schur_spd ? "yes" : "NO") << "\n";
    } else {
        os << "  SPD assertion skipped; lambda_min(S) = " << rep.lambda_min_s
           << (rep.s_indefinite ? " (indefinite)" : "") << "\n";
    }
    return os.str();
}

void write_theorem21_csv(const Theorem21Report& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_theorem21_csv: cannot open " + path);
    }
    out << "mode,lambda,a,c,q,formula_residual\n";
    for (std::size_t i = 0; i < rep.pressure_modes.size(); ++i) {
        const EigenReport& er = rep.pressure_modes[i];
        out << i << ',' << er.lambda << ',' << er.a << ',' << er.c << ',' << er.q << ','
            << er.formula_residual << '\n';
    }
}

} // namespace gstokes

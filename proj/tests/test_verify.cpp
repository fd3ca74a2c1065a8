#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "gstokes/eigen_oracles.hpp"
#include "gstokes/mesh.hpp"
#include "gstokes/regularized_precond.hpp"
#include "gstokes/spectral_verify.hpp"
#include "gstokes/stokes_assembly.hpp"

using namespace gstokes;

namespace {

DenseMatrix dense_from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix M(static_cast<index_t>(rows.size()),
                  static_cast<index_t>(rows.empty() ? 0 : rows[0].size()));
    for (index_t i = 0; i < M.rows(); ++i) {
        for (index_t j = 0; j < M.cols(); ++j) {
            M.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return M;
}

DenseMatrix random_symmetric(index_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix M(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j <= i; ++j) {
            M.at(i, j) = M.at(j, i) = dist(rng);
        }
    }
    return M;
}

SaddleSystem unit_cell_system() {
    auto mesh = build_box_mesh(1, 1, 1);
    StokesParams params;
    params.body_force = {1.0, 0.0, 0.0};
    return assemble(mesh, params);
}

CsrMatrix scaled(const CsrMatrix& M, double s) {
    auto out = M;
    for (double& v : out.values()) v *= s;
    return out;
}

} // namespace

TEST_CASE("Jacobi eigensolver on small hand-checked matrices") {
    auto d = jacobi_eigen(dense_from_rows({{3, 0}, {0, 1}}));
    CHECK(d.values[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(d.values[1] == doctest::Approx(3.0).epsilon(1e-13));

    auto swap = jacobi_eigen(dense_from_rows({{0, 1}, {1, 0}}));
    CHECK(swap.values[0] == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(swap.values[1] == doctest::Approx(1.0).epsilon(1e-13));
    const double s = 1.0 / std::sqrt(2.0);
    for (index_t k = 0; k < 2; ++k) {
        const double v0 = swap.vectors.at(0, k);
        const double v1 = swap.vectors.at(1, k);
        CHECK(std::abs(v0) == doctest::Approx(s).epsilon(1e-12));
        CHECK(std::abs(v1) == doctest::Approx(s).epsilon(1e-12));
        const double lambda = swap.values[static_cast<std::size_t>(k)];
        CHECK(v1 == doctest::Approx(lambda * v0).epsilon(1e-12));
    }
}

TEST_CASE("Jacobi eigensolver on the 4x4 Hilbert matrix") {
    DenseMatrix H(4, 4);
    for (index_t i = 0; i < 4; ++i) {
        for (index_t j = 0; j < 4; ++j) {
            H.at(i, j) = 1.0 / static_cast<double>(i + j + 1);
        }
    }
    auto eig = jacobi_eigen(H);

    // Eigenvector residuals pin each value far below the comparison tolerance.
    for (index_t k = 0; k < 4; ++k) {
        std::vector<double> v(4);
        for (index_t i = 0; i < 4; ++i) v[static_cast<std::size_t>(i)] = eig.vectors.at(i, k);
        auto Hv = matvec(H, v);
        double res = 0.0;
        for (index_t i = 0; i < 4; ++i) {
            res += std::pow(Hv[static_cast<std::size_t>(i)] -
                                eig.values[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(i)],
                            2);
        }
        CHECK(std::sqrt(res) <= 1e-9);
    }

    const double trace = 1.0 + 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 7.0;
    double sum = 0.0, prod = 1.0;
    for (double v : eig.values) {
        sum += v;
        prod *= v;
    }
    CHECK(sum == doctest::Approx(trace).epsilon(1e-10));
    CHECK(prod == doctest::Approx(1.0 / 6048000.0).epsilon(1e-8)); // det of Hilbert(4)

    const std::vector<double> reference = {9.67023040e-05, 6.73827361e-03, 1.69141220e-01,
                                           1.50021428e+00};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(eig.values[k] == doctest::Approx(reference[k]).epsilon(1e-6));
    }
}

TEST_CASE("Jacobi eigensolver invariants and input checking") {
    std::mt19937 rng(33);
    auto M = random_symmetric(20, rng);
    auto eig = jacobi_eigen(M);

    double trace = 0.0;
    for (index_t i = 0; i < 20; ++i) trace += M.at(i, i);
    double sum = 0.0, prod = 1.0;
    for (double v : eig.values) {
        sum += v;
        prod *= v;
    }
    CHECK(sum == doctest::Approx(trace).epsilon(1e-10));
    CHECK(prod == doctest::Approx(DenseLu(M).determinant()).epsilon(1e-8));
    CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));

    auto bad = dense_from_rows({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(jacobi_eigen(bad), std::invalid_argument);
}

TEST_CASE("generalized eigensolver trivial and constructed pencils") {
    std::mt19937 rng(35);
    auto R = random_symmetric(4, rng);
    for (index_t i = 0; i < 4; ++i) R.at(i, i) += 5.0; // SPD

    auto same = gen_sym_eigen(R, R);
    for (double v : same.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));

    DenseMatrix Z(4, 4);
    auto zero = gen_sym_eigen(Z, R);
    for (double v : zero.values) CHECK(std::abs(v) <= 1e-12);

    // Congruence construction: left = T^T D T, right = T^T T has pencil
    // eigenvalues exactly D.
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix T(3, 3);
    for (auto& v : T.data()) v = dist(rng);
    for (index_t i = 0; i < 3; ++i) T.at(i, i) += 3.0;
    const std::vector<double> D = {0.5, 0.25, -0.1};
    DenseMatrix left(3, 3), right(3, 3);
    for (index_t i = 0; i < 3; ++i) {
        for (index_t j = 0; j < 3; ++j) {
            double l = 0.0, r = 0.0;
            for (index_t k = 0; k < 3; ++k) {
                l += T.at(k, i) * D[static_cast<std::size_t>(k)] * T.at(k, j);
                r += T.at(k, i) * T.at(k, j);
            }
            left.at(i, j) = l;
            right.at(i, j) = r;
        }
    }
    auto pencil = gen_sym_eigen(left, right);
    std::vector<double> want = D;
    std::sort(want.begin(), want.end());
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(pencil.values[k] == doctest::Approx(want[k]).epsilon(1e-10));
    }

    auto indefinite = dense_from_rows({{1, 0}, {0, -1}});
    auto I2 = DenseMatrix::identity(2);
    CHECK_THROWS(gen_sym_eigen(I2, indefinite));
}

TEST_CASE("matching stabilization collapses the whole spectrum to one") {
    auto sys = unit_cell_system();
    const double beta = 1.0;
    auto matched = sys;
    matched.C = scaled(sys.Q, beta);

    auto rep = verify_theorem21(matched, beta);
    CHECK(!rep.stab_shift_nonsingular);
    CHECK(rep.multiplicity_one == 3 * sys.n_u + sys.n_p);
    CHECK(rep.family_residual <= 1e-8);
}

TEST_CASE("spectral report on the unit-cell system") {
    auto sys = unit_cell_system();
    const double beta = beta_heuristic(sys).value;
    auto rep = verify_theorem21(sys, beta);

    CHECK(rep.stab_shift_nonsingular);
    CHECK(rep.multiplicity_one == 3 * sys.n_u);
    CHECK(rep.max_formula_residual <= 1e-8);
    CHECK(rep.family_residual <= 1e-8);
    CHECK(static_cast<index_t>(rep.pressure_modes.size()) == sys.n_p);
    for (const auto& mode : rep.pressure_modes) {
        CHECK(mode.q > 0.0);
        CHECK(mode.c >= -1e-10);
        CHECK(mode.a >= -1e-10);
    }

    // Velocity-coupling kernel modes are excluded from the vanishing-weight
    // limit; everything else approaches 1 - c/a.
    CHECK(rep.limit_max_deviation <= 1e-4);
    CHECK(rep.limit_excluded_modes <= 3);

    auto text = theorem21_report_text(rep);
    CHECK(text.find("multiplicity") != std::string::npos);
    CHECK(text.find("formula") != std::string::npos);
}

TEST_CASE("without stabilization the eigenvalues drift to one as the weight vanishes") {
    auto sys = unit_cell_system();
    auto stripped = sys;
    stripped.C = CsrMatrix::from_triplets(sys.n_p, sys.n_p, {});

    double prev_min = -2.0;
    for (double beta : {1e-2, 1e-4, 1e-8}) {
        auto rep = verify_theorem21(stripped, beta);
        // The pencil's right-hand matrix approaches the singular S0 as the
        // weight vanishes, which costs the dense reduction a couple digits.
        CHECK(rep.max_formula_residual <= (beta >= 1e-4 ? 1e-8 : 1e-6));

        double a_max = 0.0;
        for (const auto& m : rep.pressure_modes) a_max = std::max(a_max, m.a);
        double lam_min = 2.0;
        for (const auto& m : rep.pressure_modes) {
            if (m.a <= 1e-8 * a_max) continue;
            lam_min = std::min(lam_min, m.lambda);
        }
        CHECK(lam_min >= prev_min - 1e-12); // monotone approach from below
        prev_min = lam_min;
    }
    CHECK(prev_min >= 0.999);
}

TEST_CASE("factorization check on the unit-cell system") {
    auto sys = unit_cell_system();
    const double beta = beta_heuristic(sys).value;
    auto rep = verify_proposition1(sys, beta);
    CHECK(rep.factorization_gap <= 1e-10);
    CHECK(rep.lambda_min_q > 0.0);

    auto text = prop1_report_text(rep);
    CHECK(text.find("certificate") != std::string::npos);
}

TEST_CASE("decoupled system satisfies the certificate with a pure mass Schur matrix") {
    auto sys = unit_cell_system();
    auto decoupled = sys;
    decoupled.B1 = CsrMatrix::from_triplets(sys.n_p, sys.n_u, {});
    decoupled.B2 = decoupled.B1;
    decoupled.B3 = decoupled.B1;
    decoupled.B1t = CsrMatrix::from_triplets(sys.n_u, sys.n_p, {});
    decoupled.B2t = decoupled.B1t;
    decoupled.B3t = decoupled.B1t;

    auto rep = verify_proposition1(decoupled, 2.0);
    CHECK(rep.factorization_gap <= 1e-12);
    CHECK(rep.lambda_max_s0 <= 1e-12);
    CHECK(rep.certificate_holds);
    CHECK(rep.spd_checked);
    CHECK(rep.schur_spd);
    CHECK(rep.lambda_min_s == doctest::Approx(2.0 * rep.lambda_min_q).epsilon(1e-8));
}

TEST_CASE("a vanishing weight is recorded as indefinite, not asserted") {
    auto mesh = build_box_mesh(2, 2, 2);
    StokesParams params;
    params.alpha = 1.0;
    params.nu = 1.0;
    auto sys = assemble(mesh, params);

    auto rep = verify_proposition1(sys, 1e-8);
    CHECK(!rep.certificate_holds);
    CHECK(rep.s_indefinite);
    CHECK(rep.factorization_gap <= 1e-10); // the factorization itself still holds
}

TEST_CASE("scalar limit of the eigenvalue formula at the negative matching weight") {
    // lambda(beta) = (a - c) / (a + beta q) equals 1 exactly at beta = -c/q.
    const double a = 2.3, c = 0.7, q = 1.1;
    const double beta = -c / q;
    const double lambda = (a - c) / (a + beta * q);
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("report CSV export writes one row per pressure mode") {
    auto sys = unit_cell_system();
    auto rep = verify_theorem21(sys, 1.0);

    auto dir = std::filesystem::temp_directory_path() / "gstokes_test_verify_csv";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    auto path = (dir / "modes.csv").string();
    write_theorem21_csv(rep, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == rep.pressure_modes.size() + 1); // header + one per mode
    std::filesystem::remove_all(dir);
}

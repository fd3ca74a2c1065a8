#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gstokes/csr_matrix.hpp"
#include "gstokes/matrix_market.hpp"
#include "gstokes/multivector.hpp"

using namespace gstokes;

namespace {

// Dense row-major initializer for small test matrices; zeros are dropped.
CsrMatrix csr_from_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<Triplet> trips;
    const index_t m = static_cast<index_t>(rows.size());
    const index_t n = m > 0 ? static_cast<index_t>(rows[0].size()) : 0;
    for (index_t i = 0; i < m; ++i) {
        for (index_t j = 0; j < n; ++j) {
            if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0.0) {
                trips.push_back({i, j, rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
            }
        }
    }
    return CsrMatrix::from_triplets(m, n, std::move(trips));
}

MultiVector mv_from_rows(const std::vector<std::vector<double>>& rows) {
    MultiVector X(static_cast<index_t>(rows.size()),
                  static_cast<index_t>(rows.empty() ? 0 : rows[0].size()));
    for (index_t i = 0; i < X.rows(); ++i) {
        for (index_t j = 0; j < X.cols(); ++j) {
            X.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    return X;
}

std::filesystem::path fresh_dir(const std::string& leaf) {
    auto dir = std::filesystem::temp_directory_path() / ("gstokes_test_" + leaf);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("csr construction, lookup, duplicates") {
    auto A = CsrMatrix::from_triplets(2, 3, {{0, 1, 2.0}, {1, 0, -1.0}, {0, 1, 3.0}});
    CHECK(A.rows() == 2);
    CHECK(A.cols() == 3);
    CHECK(A.nnz() == 2); // duplicate (0,1) summed
    CHECK(A.at(0, 1) == 5.0);
    CHECK(A.at(1, 0) == -1.0);
    CHECK(A.at(0, 0) == 0.0);
    CHECK_NOTHROW(A.validate());

    CHECK_THROWS_AS(CsrMatrix::from_triplets(2, 2, {{0, 5, 1.0}}), std::invalid_argument);
}

TEST_CASE("csr identity, diagonal, transpose, symmetry gap") {
    auto I = CsrMatrix::identity(3);
    CHECK(I.nnz() == 3);
    CHECK(I.at(2, 2) == 1.0);

    std::vector<double> d = {4.0, 9.0};
    auto D = CsrMatrix::diagonal(d);
    CHECK(D.diag() == d);

    auto A = csr_from_rows({{1, 2, 0}, {0, 3, 4}});
    auto At = A.transposed();
    CHECK(At.rows() == 3);
    CHECK(At.cols() == 2);
    CHECK(At.at(1, 0) == 2.0);
    CHECK(At.at(2, 1) == 4.0);

    CHECK(csr_from_rows({{1, 2}, {2, 5}}).symmetry_gap() == 0.0);
    CHECK(csr_from_rows({{1, 2}, {3, 5}}).symmetry_gap() == doctest::Approx(1.0));
}

TEST_CASE("spmv on a rectangular matrix") {
    auto A = csr_from_rows({{1, 0, 2}, {0, 3, 0}});
    std::vector<double> x = {1.0, 2.0, 3.0};
    auto y = spmv(A, x);
    REQUIRE(y.size() == 2);
    CHECK(y[0] == 7.0);
    CHECK(y[1] == 6.0);
}

TEST_CASE("mv_apply identity returns the block unchanged") {
    auto I = CsrMatrix::identity(2);
    auto X = mv_from_rows({{1.5, -2.0, 0.25}, {3.0, 4.0, -1.0}});
    auto Y = mv_apply(I, X);
    for (index_t i = 0; i < 2; ++i) {
        for (index_t j = 0; j < 3; ++j) {
            CHECK(Y.at(i, j) == X.at(i, j));
        }
    }
}

TEST_CASE("mv_apply diagonal scales rows") {
    std::vector<double> d = {2.0, 3.0};
    auto D = CsrMatrix::diagonal(d);
    auto X = mv_from_rows({{1, 1, 1}, {1, 1, 1}});
    auto Y = mv_apply(D, X);
    for (index_t j = 0; j < 3; ++j) {
        CHECK(Y.at(0, j) == 2.0);
        CHECK(Y.at(1, j) == 3.0);
    }
}

TEST_CASE("mv_apply columns equal spmv bit for bit") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<Triplet> trips;
    for (index_t i = 0; i < 9; ++i) {
        for (index_t j = 0; j < 9; ++j) {
            if ((i + 2 * j) % 3 == 0) trips.push_back({i, j, dist(rng)});
        }
    }
    auto A = CsrMatrix::from_triplets(9, 9, trips);
    MultiVector X(9, 4);
    for (auto& v : X.data()) v = dist(rng);

    auto Y = mv_apply(A, X);
    for (index_t j = 0; j < 4; ++j) {
        auto col = spmv(A, X.col(j));
        for (index_t i = 0; i < 9; ++i) {
            CHECK(Y.at(i, j) == col[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("frobenius inner product") {
    auto I = mv_from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(frobenius_inner(I, I) == 3.0);

    auto X = mv_from_rows({{1, 0, 0}, {0, 1, 0}});
    auto Y = mv_from_rows({{0, 1, 0}, {1, 0, 0}});
    CHECK(frobenius_inner(X, Y) == 0.0);

    auto P = mv_from_rows({{1, 2}, {3, 4}});
    auto Q = mv_from_rows({{5, 6}, {7, 8}});
    CHECK(frobenius_inner(P, Q) == 70.0);
    CHECK(frobenius_inner(Q, P) == 70.0); // symmetric
    CHECK(frobenius_norm(P) == doctest::Approx(std::sqrt(30.0)));

    MultiVector Z(2, 2);
    Z.set_zero();
    CHECK(frobenius_norm(Z) == 0.0);
}

TEST_CASE("diamond of single identity blocks reduces to frobenius_inner") {
    std::vector<MultiVector> Y = {mv_from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})};
    auto G = diamond(Y, Y);
    REQUIRE(G.rows() == 1);
    REQUIRE(G.cols() == 1);
    CHECK(G.at(0, 0) == 3.0);
}

TEST_CASE("diamond of orthonormal blocks is the identity") {
    const double s = 1.0 / std::sqrt(2.0);
    auto Y1 = mv_from_rows({{s, 0}, {0, s}, {0, 0}});
    auto Y2 = mv_from_rows({{0, s}, {0, 0}, {s, 0}});
    std::vector<MultiVector> blocks = {Y1, Y2};
    auto G = diamond(blocks, blocks);
    CHECK(G.at(0, 0) == doctest::Approx(1.0));
    CHECK(G.at(1, 1) == doctest::Approx(1.0));
    CHECK(G.at(0, 1) == doctest::Approx(0.0));
    CHECK(G.at(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("diamond matches the entrywise trace oracle and transposes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    auto rand_block = [&] {
        MultiVector M(4, 3);
        for (auto& v : M.data()) v = dist(rng);
        return M;
    };
    std::vector<MultiVector> Y = {rand_block(), rand_block()};
    std::vector<MultiVector> Z = {rand_block(), rand_block()};

    auto G = diamond(Y, Z);
    auto Gt = diamond(Z, Y);
    for (index_t i = 0; i < 2; ++i) {
        for (index_t j = 0; j < 2; ++j) {
            double trace = 0.0;
            for (index_t r = 0; r < 4; ++r) {
                for (index_t c = 0; c < 3; ++c) {
                    trace += Y[static_cast<std::size_t>(i)].at(r, c) *
                             Z[static_cast<std::size_t>(j)].at(r, c);
                }
            }
            CHECK(G.at(i, j) == doctest::Approx(trace).epsilon(1e-13));
            CHECK(G.at(i, j) == Gt.at(j, i));
        }
    }
}

TEST_CASE("matrix market identity file") {
    auto dir = fresh_dir("mm_identity");
    auto path = (dir / "eye.mtx").string();
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate real general\n"
        << "2 2 2\n"
        << "1 1 1.0\n"
        << "2 2 1.0\n";
    out.close();

    auto A = mm_read(path);
    CHECK(A.rows() == 2);
    CHECK(A.cols() == 2);
    CHECK(A.at(0, 0) == 1.0);
    CHECK(A.at(1, 1) == 1.0);
    CHECK(A.at(0, 1) == 0.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix market symmetric files expand to full storage") {
    auto dir = fresh_dir("mm_symmetric");
    auto path = (dir / "sym.mtx").string();
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate real symmetric\n"
        << "3 3 4\n"
        << "1 1 2.0\n"
        << "2 1 -1.0\n"
        << "2 2 2.0\n"
        << "3 3 5.0\n";
    out.close();

    auto A = mm_read(path);
    CHECK(A.nnz() == 5); // off-diagonal entry mirrored
    CHECK(A.at(0, 1) == -1.0);
    CHECK(A.at(1, 0) == -1.0);
    CHECK(A.at(2, 2) == 5.0);
    CHECK(A.symmetry_gap() == 0.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix market rejects unsupported and malformed input") {
    auto dir = fresh_dir("mm_reject");

    auto complex_path = (dir / "c.mtx").string();
    std::ofstream(complex_path)
        << "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n";
    CHECK_THROWS(mm_read(complex_path));

    auto oob_path = (dir / "oob.mtx").string();
    std::ofstream(oob_path)
        << "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
    CHECK_THROWS(mm_read(oob_path));

    auto junk_path = (dir / "junk.mtx").string();
    std::ofstream(junk_path) << "not a matrix\n";
    CHECK_THROWS(mm_read(junk_path));

    CHECK_THROWS(mm_read((dir / "missing.mtx").string()));
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix market round-trip is bit-identical on a generated corpus") {
    auto dir = fresh_dir("mm_roundtrip");
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> val(-10.0, 10.0);

    for (int t = 0; t < 12; ++t) {
        const index_t m = 1 + static_cast<index_t>(rng() % 12);
        const index_t n = 1 + static_cast<index_t>(rng() % 12);
        std::vector<Triplet> trips;
        for (index_t i = 0; i < m; ++i) {
            for (index_t j = 0; j < n; ++j) {
                if (rng() % 3 == 0) trips.push_back({i, j, val(rng) * std::pow(10.0, int(rng() % 7) - 3)});
            }
        }
        if (trips.empty()) trips.push_back({0, 0, val(rng)});
        auto A = CsrMatrix::from_triplets(m, n, trips);

        auto path = (dir / ("m" + std::to_string(t) + ".mtx")).string();
        mm_write(path, A);
        auto B = mm_read(path);

        REQUIRE(B.rows() == A.rows());
        REQUIRE(B.cols() == A.cols());
        REQUIRE(B.nnz() == A.nnz());
        for (std::size_t k = 0; k < A.values().size(); ++k) {
            CHECK(B.col_idx()[k] == A.col_idx()[k]);
            CHECK(B.values()[k] == A.values()[k]);
        }
    }
    std::filesystem::remove_all(dir);
}

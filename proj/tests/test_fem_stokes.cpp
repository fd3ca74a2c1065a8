#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <vector>

#include "gstokes/eigen_oracles.hpp"
#include "gstokes/matrix_market.hpp"
#include "gstokes/mesh.hpp"
#include "gstokes/spectral_verify.hpp"
#include "gstokes/stokes_assembly.hpp"

using namespace gstokes;

namespace {

const std::array<double, 3> kChannel = {2.2, 0.41, 0.41};

double max_abs(const CsrMatrix& A) {
    double m = 0.0;
    for (double v : A.values()) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("box mesh counts and volumes") {
    auto unit = build_box_mesh(1, 1, 1);
    CHECK(unit.n_tets() == 6);
    CHECK(unit.n_vertices() == 8);
    CHECK(total_volume(unit) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(validate_mesh(unit));

    auto channel = build_box_mesh(2, 1, 1, kChannel);
    CHECK(channel.n_tets() == 12);
    CHECK(total_volume(channel) == doctest::Approx(2.2 * 0.41 * 0.41).epsilon(1e-12));
    CHECK_NOTHROW(validate_mesh(channel));

    auto refined = build_box_mesh(2, 2, 2);
    CHECK(refined.n_vertices() == 27);
    CHECK(refined.n_tets() == 48);

    CHECK_THROWS(build_box_mesh(0, 1, 1));
}

TEST_CASE("every tet has positive volume and the face census holds") {
    auto mesh = build_box_mesh(3, 2, 2, kChannel);
    for (index_t t = 0; t < mesh.n_tets(); ++t) {
        CHECK(tet_volume(mesh, t) > 0.0);
    }
    CHECK_NOTHROW(validate_mesh(mesh));

    // A duplicated tet makes one face interior to three tets.
    auto broken = mesh;
    broken.tets.push_back(broken.tets.front());
    CHECK_THROWS(validate_mesh(broken));
}

TEST_CASE("barycentric monomial integration") {
    const double V = 0.37;
    // l1*l2*l3*l4 integrates to 1!1!1!1!*3!/(4+3)! * V = V/840,
    // so the quartic bubble 256*l1*l2*l3*l4 has first moment (32/105)*V.
    CHECK(tet_monomial_integral({1, 1, 1, 1}, V) == doctest::Approx(V / 840.0).epsilon(1e-15));
    CHECK(256.0 * tet_monomial_integral({1, 1, 1, 1}, V) ==
          doctest::Approx(32.0 / 105.0 * V).epsilon(1e-14));
    CHECK(tet_monomial_integral({0, 0, 0, 0}, V) == doctest::Approx(V).epsilon(1e-15));
    CHECK(tet_monomial_integral({2, 0, 0, 0}, V) == doctest::Approx(V / 10.0).epsilon(1e-15));
    CHECK(tet_monomial_integral({1, 1, 0, 0}, V) == doctest::Approx(V / 20.0).epsilon(1e-15));
}

TEST_CASE("assembled blocks are symmetric with the right definiteness") {
    auto mesh = build_box_mesh(2, 2, 2);
    StokesParams params;
    params.alpha = 1.0;
    params.nu = 1.0;
    auto sys = assemble(mesh, params);

    CHECK(sys.n_u == 27);
    CHECK(sys.n_p == 27);
    CHECK(sys.A.symmetry_gap() == 0.0);
    CHECK(sys.C.symmetry_gap() == 0.0);
    CHECK(sys.Q.symmetry_gap() == 0.0);

    CHECK_NOTHROW(DenseCholesky(DenseMatrix::from_csr(sys.A)));
    CHECK_NOTHROW(DenseCholesky(DenseMatrix::from_csr(sys.Q)));

    auto c_eigs = jacobi_eigen(DenseMatrix::from_csr(sys.C));
    CHECK(c_eigs.values.front() >= -1e-12 * std::abs(c_eigs.values.back()));
}

TEST_CASE("zero reaction leaves a stiffness matrix that kills constants") {
    auto mesh = build_box_mesh(2, 2, 2);
    StokesParams params;
    params.alpha = 0.0;
    params.nu = 1.0;
    auto sys = assemble(mesh, params); // no eliminated dofs

    std::vector<double> ones(static_cast<std::size_t>(sys.n_u), 1.0);
    auto y = spmv(sys.A, ones);
    double worst = 0.0;
    for (double v : y) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-12 * max_abs(sys.A) * static_cast<double>(sys.n_u));
}

TEST_CASE("divergence rows annihilate the interpolant of a divergence-free linear field") {
    auto mesh = build_box_mesh(2, 2, 2);
    StokesParams params;
    auto sys = assemble(mesh, params);
    REQUIRE(sys.n_u == mesh.n_vertices());

    // u = (y, z, x) has zero divergence and is reproduced exactly by P1.
    std::vector<double> u1(static_cast<std::size_t>(sys.n_u));
    std::vector<double> u2(u1), u3(u1);
    for (index_t d = 0; d < sys.n_u; ++d) {
        const auto& v = mesh.vertices[static_cast<std::size_t>(sys.dof_to_vertex[static_cast<std::size_t>(d)])];
        u1[static_cast<std::size_t>(d)] = v[1];
        u2[static_cast<std::size_t>(d)] = v[2];
        u3[static_cast<std::size_t>(d)] = v[0];
    }
    auto div = spmv(sys.B1, u1);
    auto t2 = spmv(sys.B2, u2);
    auto t3 = spmv(sys.B3, u3);
    double worst = 0.0;
    for (std::size_t k = 0; k < div.size(); ++k) {
        worst = std::max(worst, std::abs(div[k] + t2[k] + t3[k]));
    }
    const double scale = std::max({max_abs(sys.B1), max_abs(sys.B2), max_abs(sys.B3), 1.0});
    CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("apply_saddle matches the block definition and the dense oracle") {
    auto mesh = build_box_mesh(1, 1, 1);
    StokesParams params;
    params.alpha = 2.0;
    params.nu = 0.5;
    auto sys = assemble(mesh, params);

    auto zero = BlockVector::zero(sys.n_u, sys.n_p);
    auto yz = apply_saddle(sys, zero);
    CHECK(norm2(yz) == 0.0);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto x = BlockVector::zero(sys.n_u, sys.n_p);
    for (auto* part : {&x.u1, &x.u2, &x.u3}) {
        for (auto& v : *part) v = dist(rng);
    }

    // Pressure part zero: outputs are the component A-products and B u.
    auto y = apply_saddle(sys, x);
    auto au1 = spmv(sys.A, x.u1);
    for (index_t i = 0; i < sys.n_u; ++i) {
        CHECK(y.u1[static_cast<std::size_t>(i)] == au1[static_cast<std::size_t>(i)]);
    }
    auto bu = spmv(sys.B1, x.u1);
    auto bu2 = spmv(sys.B2, x.u2);
    auto bu3 = spmv(sys.B3, x.u3);
    for (index_t k = 0; k < sys.n_p; ++k) {
        CHECK(y.p[static_cast<std::size_t>(k)] ==
              doctest::Approx(bu[static_cast<std::size_t>(k)] + bu2[static_cast<std::size_t>(k)] +
                              bu3[static_cast<std::size_t>(k)]).epsilon(1e-14));
    }

    // Full random vector against the dense assembled operator.
    for (auto& v : x.p) v = dist(rng);
    y = apply_saddle(sys, x);
    auto dense = dense_saddle(sys);
    auto y_ref = matvec(dense, x.flatten());
    auto y_flat = y.flatten();
    double scale = 0.0, worst = 0.0;
    for (std::size_t k = 0; k < y_ref.size(); ++k) {
        scale = std::max(scale, std::abs(y_ref[k]));
        worst = std::max(worst, std::abs(y_ref[k] - y_flat[k]));
    }
    CHECK(worst <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("channel inflow profile values") {
    const double amp = 0.3;
    CHECK(channel_inflow_profile(0.0, 0.205, amp, 0.41, 0.41) == 0.0);
    CHECK(channel_inflow_profile(0.41, 0.205, amp, 0.41, 0.41) == 0.0);
    CHECK(channel_inflow_profile(0.205, 0.0, amp, 0.41, 0.41) == 0.0);
    // Center of the cross-section: 0.3 * 4y(0.41-y) * 4z(0.41-z) = 0.3 * 0.1681^2.
    CHECK(channel_inflow_profile(0.205, 0.205, amp, 0.41, 0.41) ==
          doctest::Approx(0.008477283).epsilon(1e-9));
}

TEST_CASE("inflow boundary data covers the boundary and drives only the x-faces") {
    auto mesh = build_box_mesh(4, 2, 2, kChannel);
    StokesParams params;
    params.dirichlet = DirichletMode::channel;
    auto bc = inflow_bc(mesh, params);
    REQUIRE(bc.vertices.size() == bc.values.size());

    std::vector<bool> listed(static_cast<std::size_t>(mesh.n_vertices()), false);
    for (std::size_t k = 0; k < bc.vertices.size(); ++k) {
        const auto vi = static_cast<std::size_t>(bc.vertices[k]);
        listed[vi] = true;
        const auto& pos = mesh.vertices[vi];
        const auto& val = bc.values[k];
        CHECK(val[1] == 0.0);
        CHECK(val[2] == 0.0);
        const bool on_x_face = pos[0] == 0.0 || pos[0] == doctest::Approx(2.2);
        if (!on_x_face || pos[1] == 0.0 || pos[1] == doctest::Approx(0.41) ||
            pos[2] == 0.0 || pos[2] == doctest::Approx(0.41)) {
            CHECK(val[0] == 0.0); // walls and their edges are no-slip
        }
        if (on_x_face && pos[1] == doctest::Approx(0.205) && pos[2] == doctest::Approx(0.205)) {
            CHECK(val[0] == doctest::Approx(0.008477283).epsilon(1e-9));
        }
    }
    for (index_t v = 0; v < mesh.n_vertices(); ++v) {
        CHECK(listed[static_cast<std::size_t>(v)] == mesh.boundary_vertex[static_cast<std::size_t>(v)]);
    }

    auto cube = build_box_mesh(2, 2, 2);
    CHECK_THROWS(inflow_bc(cube, params));
}

TEST_CASE("channel assembly eliminates boundary dofs and lifts the data") {
    auto mesh = build_box_mesh(4, 2, 2, kChannel);
    StokesParams params;
    params.alpha = 100.0;
    params.nu = 0.1;
    params.dirichlet = DirichletMode::channel;
    auto sys = assemble(mesh, params);

    CHECK(sys.n_u == 3); // (4-1)*(2-1)*(2-1) interior vertices
    CHECK(sys.n_p == 45);
    CHECK_NOTHROW(DenseCholesky(DenseMatrix::from_csr(sys.A)));

    // Dirichlet lifting must reach the divergence right-hand side.
    double g_norm = 0.0;
    for (double v : sys.rhs.p) g_norm += v * v;
    CHECK(g_norm > 0.0);

    for (index_t d = 0; d < sys.n_u; ++d) {
        const auto vert = sys.dof_to_vertex[static_cast<std::size_t>(d)];
        CHECK(!mesh.boundary_vertex[static_cast<std::size_t>(vert)]);
        CHECK(sys.vertex_to_dof[static_cast<std::size_t>(vert)] == d);
    }
}

TEST_CASE("system export writes one file per block plus a sidecar") {
    auto mesh = build_box_mesh(1, 1, 1);
    StokesParams params;
    auto sys = assemble(mesh, params);

    auto dir = std::filesystem::temp_directory_path() / "gstokes_test_export";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    export_system(sys, params, dir.string(), "unit");

    for (const char* block : {"A", "B1", "B2", "B3", "C", "Q"}) {
        auto path = dir / ("unit_" + std::string(block) + ".mtx");
        CHECK(std::filesystem::exists(path));
    }
    CHECK(std::filesystem::exists(dir / "unit_info.txt"));

    auto A = mm_read((dir / "unit_A.mtx").string());
    REQUIRE(A.nnz() == sys.A.nnz());
    for (std::size_t k = 0; k < A.values().size(); ++k) {
        CHECK(A.values()[k] == sys.A.values()[k]);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("assembly rejects invalid parameters") {
    auto mesh = build_box_mesh(1, 1, 1);
    StokesParams params;
    params.nu = 0.0;
    CHECK_THROWS(assemble(mesh, params));
    params.nu = 1.0;
    params.alpha = -1.0;
    CHECK_THROWS(assemble(mesh, params));
}

#include "gstokes/stokes_assembly.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "gstokes/matrix_market.hpp"

namespace gstokes {

namespace {

constexpr double kChannelLx = 2.2;
constexpr double kChannelLy = 0.41;
constexpr double kChannelLz = 0.41;
constexpr double kGeomTol = 1e-12;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

bool near(double a, double b) { return std::abs(a - b) <= kGeomTol * (1.0 + std::abs(b)); }

} // namespace

double tet_monomial_integral(const std::array<int, 4>& exps, double volume) {
    int total = 0;
    for (int e : exps) {
        if (e < 0) throw std::invalid_argument("tet_monomial_integral: negative exponent");
        total += e;
    }
    double num = 6.0; // 3!
    for (int e : exps) num *= factorial(e);
    return num / factorial(total + 3) * volume;
}

double channel_inflow_profile(double y, double z, double amplitude,
                              double ly, double lz) {
    return amplitude * ly * ly * (4.0 * y * (ly - y)) * (4.0 * z * (lz - z) / (lz * lz));
}

DirichletData inflow_bc(const TetMesh& mesh, const StokesParams& params) {
    if (!near(mesh.extents[0], kChannelLx) || !near(mesh.extents[1], kChannelLy) ||
        !near(mesh.extents[2], kChannelLz)) {
        throw std::invalid_argument("inflow_bc: mesh extents do not match the channel box");
    }
    DirichletData data;
    for (index_t v = 0; v < mesh.n_vertices(); ++v) {
        if (!mesh.boundary_vertex[static_cast<std::size_t>(v)]) continue;
        const auto& x = mesh.vertices[static_cast<std::size_t>(v)];
        std::array<double, 3> val = {0.0, 0.0, 0.0};
        const bool on_x_face = near(x[0], 0.0) || near(x[0], mesh.extents[0]);
        if (on_x_face) {
            val[0] = channel_inflow_profile(x[1], x[2], params.inflow_amplitude,
                                            mesh.extents[1], mesh.extents[2]);
        }
        data.vertices.push_back(v);
        data.values.push_back(val);
    }
    return data;
}

SaddleSystem assemble(const TetMesh& mesh, const StokesParams& params) {
    if (params.alpha < 0.0 || params.nu <= 0.0) {
        throw std::invalid_argument("assemble: alpha must be nonnegative and nu positive");
    }
    const index_t n_v = mesh.n_vertices();

    SaddleSystem sys;
    sys.n_p = n_v;
    sys.vertex_to_dof.assign(static_cast<std::size_t>(n_v), -1);

    std::vector<std::array<double, 3>> dirichlet(static_cast<std::size_t>(n_v),
                                                 {0.0, 0.0, 0.0});
    std::vector<bool> is_dirichlet(static_cast<std::size_t>(n_v), false);
    if (params.dirichlet == DirichletMode::channel) {
        const DirichletData data = inflow_bc(mesh, params);
        for (std::size_t i = 0; i < data.vertices.size(); ++i) {
            const auto v = static_cast<std::size_t>(data.vertices[i]);
            is_dirichlet[v] = true;
            dirichlet[v] = data.values[i];
        }
    }
    for (index_t v = 0; v < n_v; ++v) {
        if (!is_dirichlet[static_cast<std::size_t>(v)]) {
            sys.vertex_to_dof[static_cast<std::size_t>(v)] = static_cast<index_t>(sys.dof_to_vertex.size());
            sys.dof_to_vertex.push_back(v);
        }
    }
    sys.n_u = static_cast<index_t>(sys.dof_to_vertex.size());
    if (sys.n_u == 0) {
        throw std::invalid_argument("assemble: no free velocity dofs on this mesh");
    }

    std::vector<Triplet> coo_a, coo_c, coo_q;
    std::array<std::vector<Triplet>, 3> coo_b;
    sys.rhs = BlockVector::zero(sys.n_u, sys.n_p);
    std::array<std::vector<double>*, 3> f = {&sys.rhs.u1, &sys.rhs.u2, &sys.rhs.u3};

    for (index_t t = 0; t < mesh.n_tets(); ++t) {
        const auto& tet = mesh.tets[static_cast<std::size_t>(t)];
        const TetGeometry geo = tet_geometry(mesh, t);
        const double vol = geo.volume;

        // P1 mass and stiffness on the tet.
        double mass[4][4];
        double stiff[4][4];
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                std::array<int, 4> e = {0, 0, 0, 0};
                e[static_cast<std::size_t>(a)] += 1;
                e[static_cast<std::size_t>(b)] += 1;
                mass[a][b] = tet_monomial_integral(e, vol);
                stiff[a][b] = vol * (geo.grad[static_cast<std::size_t>(a)][0] * geo.grad[static_cast<std::size_t>(b)][0] +
                                     geo.grad[static_cast<std::size_t>(a)][1] * geo.grad[static_cast<std::size_t>(b)][1] +
                                     geo.grad[static_cast<std::size_t>(a)][2] * geo.grad[static_cast<std::size_t>(b)][2]);
            }
        }

        // Bubble quantities: the bubble is 256 l1 l2 l3 l4. Its moment feeds
        // the pressure coupling; its mass and stiffness set the condensation
        // scale.
        const double bubble_moment = 256.0 * tet_monomial_integral({1, 1, 1, 1}, vol);
        double s_t = 1.0;
        if (!params.unscaled_stabilization) {
            const double m_b = 256.0 * 256.0 * tet_monomial_integral({2, 2, 2, 2}, vol);
            double k_b = 0.0;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    std::array<int, 4> e = {2, 2, 2, 2};
                    e[static_cast<std::size_t>(a)] -= 1;
                    e[static_cast<std::size_t>(b)] -= 1;
                    const double dot = geo.grad[static_cast<std::size_t>(a)][0] * geo.grad[static_cast<std::size_t>(b)][0] +
                                       geo.grad[static_cast<std::size_t>(a)][1] * geo.grad[static_cast<std::size_t>(b)][1] +
                                       geo.grad[static_cast<std::size_t>(a)][2] * geo.grad[static_cast<std::size_t>(b)][2];
                    k_b += 256.0 * 256.0 * dot * tet_monomial_integral(e, vol);
                }
            }
            const double d_b = params.alpha * m_b + params.nu * k_b;
            if (d_b <= 0.0) {
                throw std::invalid_argument("assemble: vanishing bubble scale; alpha and nu both zero?");
            }
            s_t = 1.0 / d_b;
        }

        for (int a = 0; a < 4; ++a) {
            const index_t va = tet[static_cast<std::size_t>(a)];
            const index_t dof_a = sys.vertex_to_dof[static_cast<std::size_t>(va)];
            for (int b = 0; b < 4; ++b) {
                const index_t vb = tet[static_cast<std::size_t>(b)];
                const index_t dof_b = sys.vertex_to_dof[static_cast<std::size_t>(vb)];
                const double a_ab = params.alpha * mass[a][b] + params.nu * stiff[a][b];

                if (dof_a >= 0 && dof_b >= 0) {
                    coo_a.push_back({dof_a, dof_b, a_ab});
                } else if (dof_a >= 0 && dof_b < 0) {
                    for (int comp = 0; comp < 3; ++comp) {
                        (*f[static_cast<std::size_t>(comp)])[static_cast<std::size_t>(dof_a)] -=
                            a_ab * dirichlet[static_cast<std::size_t>(vb)][static_cast<std::size_t>(comp)];
                    }
                }

                // Divergence coupling: row = pressure vertex va, column =
                // velocity vertex vb; the value -grad_b[i] * vol / 4 repeats
                // for every pressure node of the tet.
                const double lam_int = tet_monomial_integral({1, 0, 0, 0}, vol); // vol / 4
                for (int comp = 0; comp < 3; ++comp) {
                    const double b_ab = -geo.grad[static_cast<std::size_t>(b)][static_cast<std::size_t>(comp)] * lam_int;
                    if (dof_b >= 0) {
                        coo_b[static_cast<std::size_t>(comp)].push_back({va, dof_b, b_ab});
                    } else {
                        sys.rhs.p[static_cast<std::size_t>(va)] -=
                            b_ab * dirichlet[static_cast<std::size_t>(vb)][static_cast<std::size_t>(comp)];
                    }
                }

                // Pressure stabilization from the condensed bubble, one
                // rank-one block per velocity component.
                double c_ab = 0.0;
                for (int comp = 0; comp < 3; ++comp) {
                    c_ab += (bubble_moment * geo.grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(comp)]) *
                            (bubble_moment * geo.grad[static_cast<std::size_t>(b)][static_cast<std::size_t>(comp)]);
                }
                coo_c.push_back({va, vb, s_t * c_ab});
                coo_q.push_back({va, vb, mass[a][b]});
            }

            if (dof_a >= 0) {
                const double load = tet_monomial_integral({1, 0, 0, 0}, vol);
                for (int comp = 0; comp < 3; ++comp) {
                    (*f[static_cast<std::size_t>(comp)])[static_cast<std::size_t>(dof_a)] +=
                        params.body_force[static_cast<std::size_t>(comp)] * load;
                }
            }
        }
    }

    sys.A = CsrMatrix::from_triplets(sys.n_u, sys.n_u, std::move(coo_a));
    sys.B1 = CsrMatrix::from_triplets(sys.n_p, sys.n_u, std::move(coo_b[0]));
    sys.B2 = CsrMatrix::from_triplets(sys.n_p, sys.n_u, std::move(coo_b[1]));
    sys.B3 = CsrMatrix::from_triplets(sys.n_p, sys.n_u, std::move(coo_b[2]));
    sys.C = CsrMatrix::from_triplets(sys.n_p, sys.n_p, std::move(coo_c));
    sys.Q = CsrMatrix::from_triplets(sys.n_p, sys.n_p, std::move(coo_q));
    sys.B1t = sys.B1.transposed();
    sys.B2t = sys.B2.transposed();
    sys.B3t = sys.B3.transposed();
    return sys;
}

BlockVector apply_saddle(const SaddleSystem& sys, const BlockVector& x) {
    if (static_cast<index_t>(x.u1.size()) != sys.n_u ||
        static_cast<index_t>(x.p.size()) != sys.n_p) {
        throw std::invalid_argument("apply_saddle: block sizes do not match the system");
    }
    BlockVector y = BlockVector::zero(sys.n_u, sys.n_p);

    spmv(sys.A, x.u1, y.u1);
    spmv(sys.A, x.u2, y.u2);
    spmv(sys.A, x.u3, y.u3);
    std::vector<double> tmp_u(static_cast<std::size_t>(sys.n_u));
    const CsrMatrix* bts[3] = {&sys.B1t, &sys.B2t, &sys.B3t};
    std::vector<double>* yu[3] = {&y.u1, &y.u2, &y.u3};
    for (int comp = 0; comp < 3; ++comp) {
        spmv(*bts[comp], x.p, tmp_u);
        for (std::size_t i = 0; i < tmp_u.size(); ++i) {
            (*yu[comp])[i] += tmp_u[i];
        }
    }

    spmv(sys.C, x.p, y.p);
    std::vector<double> tmp_p(static_cast<std::size_t>(sys.n_p));
    const CsrMatrix* bs[3] = {&sys.B1, &sys.B2, &sys.B3};
    const std::vector<double>* xu[3] = {&x.u1, &x.u2, &x.u3};
    for (int comp = 0; comp < 3; ++comp) {
        spmv(*bs[comp], *xu[comp], tmp_p);
        for (std::size_t i = 0; i < tmp_p.size(); ++i) {
            y.p[i] += tmp_p[i];
        }
    }
    return y;
}

void export_system(const SaddleSystem& sys, const StokesParams& params,
                   const std::string& dir, const std::string& tag) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string base = dir + "/" + tag;
    mm_write(base + "_A.mtx", sys.A);
    mm_write(base + "_B1.mtx", sys.B1);
    mm_write(base + "_B2.mtx", sys.B2);
    mm_write(base + "_B3.mtx", sys.B3);
    mm_write(base + "_C.mtx", sys.C);
    mm_write(base + "_Q.mtx", sys.Q);

    std::FILE* out = std::fopen((base + "_info.txt").c_str(), "w");
    if (!out) {
        throw std::runtime_error("export_system: cannot open sidecar file");
    }
    std::fprintf(out, "n_u %lld\n", static_cast<long long>(sys.n_u));
    std::fprintf(out, "n_p %lld\n", static_cast<long long>(sys.n_p));
    std::fprintf(out, "alpha %.17g\n", params.alpha);
    std::fprintf(out, "nu %.17g\n", params.nu);
    std::fclose(out);
}

} // namespace gstokes

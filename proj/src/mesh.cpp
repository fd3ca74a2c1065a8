#include "gstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace gstokes {

namespace {

double signed_volume(const std::array<double, 3>& a, const std::array<double, 3>& b,
                     const std::array<double, 3>& c, const std::array<double, 3>& d) {
    const double m[3][3] = {
        {b[0] - a[0], c[0] - a[0], d[0] - a[0]},
        {b[1] - a[1], c[1] - a[1], d[1] - a[1]},
        {b[2] - a[2], c[2] - a[2], d[2] - a[2]},
    };
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                     - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                     + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return det / 6.0;
}

} // namespace

TetMesh build_box_mesh(index_t nx, index_t ny, index_t nz,
                       const std::array<double, 3>& extents) {
    if (nx < 1 || ny < 1 || nz < 1) {
        throw std::invalid_argument("build_box_mesh: need at least one cell per axis");
    }
    if (extents[0] <= 0.0 || extents[1] <= 0.0 || extents[2] <= 0.0) {
        throw std::invalid_argument("build_box_mesh: extents must be positive");
    }

    TetMesh mesh;
    mesh.extents = extents;
    const index_t vx = nx + 1, vy = ny + 1, vz = nz + 1;
    mesh.vertices.reserve(static_cast<std::size_t>(vx * vy * vz));
    mesh.boundary_vertex.reserve(static_cast<std::size_t>(vx * vy * vz));
    const double hx = extents[0] / static_cast<double>(nx);
    const double hy = extents[1] / static_cast<double>(ny);
    const double hz = extents[2] / static_cast<double>(nz);

    auto vid = [&](index_t i, index_t j, index_t k) {
        return (k * vy + j) * vx + i;
    };

    for (index_t k = 0; k < vz; ++k) {
        for (index_t j = 0; j < vy; ++j) {
            for (index_t i = 0; i < vx; ++i) {
                mesh.vertices.push_back({static_cast<double>(i) * hx,
                                         static_cast<double>(j) * hy,
                                         static_cast<double>(k) * hz});
                const bool on_boundary = (i == 0 || i == nx || j == 0 || j == ny || k == 0 || k == nz);
                mesh.boundary_vertex.push_back(on_boundary);
            }
        }
    }

    // Six tets per cell: walk from the low corner to the high corner along
    // each permutation of the axes.
    const std::array<std::array<int, 3>, 6> orders = {{
        {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
    }};
    mesh.tets.reserve(static_cast<std::size_t>(6 * nx * ny * nz));
    for (index_t k = 0; k < nz; ++k) {
        for (index_t j = 0; j < ny; ++j) {
            for (index_t i = 0; i < nx; ++i) {
                for (const auto& order : orders) {
                    std::array<index_t, 3> pos = {i, j, k};
                    std::array<index_t, 4> tet;
                    tet[0] = vid(pos[0], pos[1], pos[2]);
                    for (int step = 0; step < 3; ++step) {
                        pos[static_cast<std::size_t>(order[static_cast<std::size_t>(step)])] += 1;
                        tet[static_cast<std::size_t>(step) + 1] = vid(pos[0], pos[1], pos[2]);
                    }
                    const auto& v = mesh.vertices;
                    if (signed_volume(v[static_cast<std::size_t>(tet[0])],
                                      v[static_cast<std::size_t>(tet[1])],
                                      v[static_cast<std::size_t>(tet[2])],
                                      v[static_cast<std::size_t>(tet[3])]) < 0.0) {
                        std::swap(tet[2], tet[3]);
                    }
                    mesh.tets.push_back(tet);
                }
            }
        }
    }
    return mesh;
}

double tet_volume(const TetMesh& mesh, index_t t) {
    const auto& tet = mesh.tets[static_cast<std::size_t>(t)];
    return signed_volume(mesh.vertices[static_cast<std::size_t>(tet[0])],
                         mesh.vertices[static_cast<std::size_t>(tet[1])],
                         mesh.vertices[static_cast<std::size_t>(tet[2])],
                         mesh.vertices[static_cast<std::size_t>(tet[3])]);
}

double total_volume(const TetMesh& mesh) {
    double sum = 0.0;
    for (index_t t = 0; t < mesh.n_tets(); ++t) {
        sum += tet_volume(mesh, t);
    }
    return sum;
}

TetGeometry tet_geometry(const TetMesh& mesh, index_t t) {
    const auto& tet = mesh.tets[static_cast<std::size_t>(t)];
    const auto& a = mesh.vertices[static_cast<std::size_t>(tet[0])];
    const auto& b = mesh.vertices[static_cast<std::size_t>(tet[1])];
    const auto& c = mesh.vertices[static_cast<std::size_t>(tet[2])];
    const auto& d = mesh.vertices[static_cast<std::size_t>(tet[3])];

    TetGeometry geo;
    geo.volume = signed_volume(a, b, c, d);
    if (geo.volume <= 0.0) {
        throw std::invalid_argument("tet_geometry: degenerate or inverted tet " + std::to_string(t));
    }

    // Rows of inv([b-a, c-a, d-a]) are the gradients of the barycentric
    // coordinates attached to vertices 1..3; vertex 0 closes the partition
    // of unity.
    const double m[3][3] = {
        {b[0] - a[0], c[0] - a[0], d[0] - a[0]},
        {b[1] - a[1], c[1] - a[1], d[1] - a[1]},
        {b[2] - a[2], c[2] - a[2], d[2] - a[2]},
    };
    const double det = 6.0 * geo.volume;
    const double inv[3][3] = {
        {(m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
         (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
         (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det},
        {(m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
         (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
         (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det},
        {(m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
         (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
         (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det},
    };
    for (int r = 1; r < 4; ++r) {
        for (int c2 = 0; c2 < 3; ++c2) {
            geo.grad[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] =
                inv[r - 1][c2];
        }
    }
    for (int c2 = 0; c2 < 3; ++c2) {
        geo.grad[0][static_cast<std::size_t>(c2)] =
            -(geo.grad[1][static_cast<std::size_t>(c2)] +
              geo.grad[2][static_cast<std::size_t>(c2)] +
              geo.grad[3][static_cast<std::size_t>(c2)]);
    }
    return geo;
}

void validate_mesh(const TetMesh& mesh) {
    std::map<std::array<index_t, 3>, int> face_count;
    const std::array<std::array<int, 3>, 4> faces = {{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
    for (const auto& tet : mesh.tets) {
        for (const auto& f : faces) {
            std::array<index_t, 3> key = {tet[static_cast<std::size_t>(f[0])],
                                          tet[static_cast<std::size_t>(f[1])],
                                          tet[static_cast<std::size_t>(f[2])]};
            std::sort(key.begin(), key.end());
            face_count[key] += 1;
        }
    }
    for (const auto& [face, count] : face_count) {
        if (count > 2) {
            throw std::runtime_error("validate_mesh: face shared by more than two tets");
        }
        if (count == 1) {
            for (index_t v : face) {
                if (!mesh.boundary_vertex[static_cast<std::size_t>(v)]) {
                    throw std::runtime_error("validate_mesh: single-tet face with interior vertex");
                }
            }
        }
    }
    for (index_t t = 0; t < mesh.n_tets(); ++t) {
        if (tet_volume(mesh, t) <= 0.0) {
            throw std::runtime_error("validate_mesh: nonpositive tet volume at " + std::to_string(t));
        }
    }
}

} // namespace gstokes

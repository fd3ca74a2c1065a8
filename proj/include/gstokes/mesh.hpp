#pragma once

#include <array>
#include <vector>

#include "gstokes/types.hpp"

namespace gstokes {

/// Conforming tetrahedral mesh of an axis-aligned box.
struct TetMesh {
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<index_t, 4>> tets;
    std::vector<bool> boundary_vertex;
    std::array<double, 3> extents = {1.0, 1.0, 1.0};

    index_t n_vertices() const { return static_cast<index_t>(vertices.size()); }
    index_t n_tets() const { return static_cast<index_t>(tets.size()); }
};

/// Subdivides an nx-by-ny-by-nz grid of box cells into six tetrahedra each,
/// all sharing the cell diagonal, which keeps neighbouring cells conforming.
/// Every tet is oriented with positive signed volume.
TetMesh build_box_mesh(index_t nx, index_t ny, index_t nz,
                       const std::array<double, 3>& extents = {1.0, 1.0, 1.0});

double tet_volume(const TetMesh& mesh, index_t t);
double total_volume(const TetMesh& mesh);

/// Gradients of the four barycentric basis functions on tet t (rows), and
/// the tet volume.
struct TetGeometry {
    double volume;
    std::array<std::array<double, 3>, 4> grad;
};
TetGeometry tet_geometry(const TetMesh& mesh, index_t t);

/// Checks the face census: each interior face is shared by exactly two tets
/// and each boundary face belongs to exactly one. Throws on violation.
void validate_mesh(const TetMesh& mesh);

} // namespace gstokes

#pragma once

#include <array>
#include <string>
#include <vector>

#include "gstokes/csr_matrix.hpp"
#include "gstokes/mesh.hpp"
#include "gstokes/multivector.hpp"

namespace gstokes {

/// Boundary treatment for the velocity unknowns.
///  - none:    every vertex carries velocity dofs, no rows are eliminated
///             (used for small reference systems driven by a body force);
///  - channel: Dirichlet data on the whole boundary with the benchmark
///             inflow/outflow profile, Dirichlet dofs eliminated and lifted
///             into the right-hand side.
enum class DirichletMode { none, channel };

struct StokesParams {
    double alpha = 1.0;
    double nu = 1.0;
    DirichletMode dirichlet = DirichletMode::none;
    /// Peak scaling constant of the inflow profile.
    double inflow_amplitude = 0.3;
    /// Constant body force; only used when no Dirichlet data drives the flow.
    std::array<double, 3> body_force = {0.0, 0.0, 0.0};
    /// When set, the pressure stabilization block skips the per-element
    /// condensation scaling and uses the raw bubble coupling.
    bool unscaled_stabilization = false;
};

/// Assembled four-field system
///   [ A        B1^T ] [u1]   [f1]
///   [   A      B2^T ] [u2] = [f2]
///   [     A    B3^T ] [u3]   [f3]
///   [ B1 B2 B3  C   ] [ p]   [ g]
/// with the scalar velocity block A shared by all three components,
/// the pressure stabilization C, and the pressure mass matrix Q.
struct SaddleSystem {
    CsrMatrix A;
    CsrMatrix B1, B2, B3;
    CsrMatrix B1t, B2t, B3t; // cached transposes
    CsrMatrix C;
    CsrMatrix Q;
    BlockVector rhs;
    index_t n_u = 0;
    index_t n_p = 0;
    /// velocity dof -> mesh vertex
    std::vector<index_t> dof_to_vertex;
    /// mesh vertex -> velocity dof, -1 for eliminated vertices
    std::vector<index_t> vertex_to_dof;
};

/// Dirichlet values at boundary vertices, aligned with `vertices`.
struct DirichletData {
    std::vector<index_t> vertices;
    std::vector<std::array<double, 3>> values;
};

/// Exact integral of a barycentric monomial over a tet:
///   l1^e0 l2^e1 l3^e2 l4^e3  ->  e0! e1! e2! e3! 3! / (sum e + 3)! * volume.
double tet_monomial_integral(const std::array<int, 4>& exps, double volume);

/// Benchmark inflow profile on the channel cross-section.
double channel_inflow_profile(double y, double z, double amplitude,
                              double ly, double lz);

/// Velocity Dirichlet data for the channel benchmark: the parabolic-in-y-and-z
/// profile on the two x-faces, zero on the walls. Throws when the mesh is not
/// the (0,2.2)x(0,0.41)x(0,0.41) channel box.
DirichletData inflow_bc(const TetMesh& mesh, const StokesParams& params);

SaddleSystem assemble(const TetMesh& mesh, const StokesParams& params);

/// y = system matrix times x, applied block-wise.
BlockVector apply_saddle(const SaddleSystem& sys, const BlockVector& x);

/// Writes every block as a Matrix Market file plus a plain-text sidecar with
/// the dimensions and parameters.
void export_system(const SaddleSystem& sys, const StokesParams& params,
                   const std::string& dir, const std::string& tag);

} // namespace gstokes

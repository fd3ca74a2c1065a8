#pragma once

#include <array>
#include <string>
#include <vector>

#include "gstokes/krylov.hpp"
#include "gstokes/regularized_precond.hpp"
#include "gstokes/stokes_assembly.hpp"

namespace gstokes {

enum class OuterMethod { rgmres, fgmres };
enum class TableFormat { csv, markdown };

struct ExperimentConfig {
    std::vector<double> alpha_list = {1e2, 1e3, 1e4};
    std::vector<double> nu_list = {1e-3, 1e-2, 1e-1};
    std::array<index_t, 3> mesh = {8, 4, 4};
    /// Used when beta_auto is false.
    double beta = 1.0;
    bool beta_auto = true;
    std::vector<OuterMethod> outers = {OuterMethod::rgmres, OuterMethod::fgmres};
    std::vector<PrecondMode> preconds = {PrecondMode::pr, PrecondMode::pgr};
    KrylovConfig cfg;
    /// Inner stage tolerances for the flexible outer method. The restarted
    /// outer method always runs its inner stages near working precision so
    /// the preconditioner acts as a fixed operator.
    double fgmres_tol_a = 1e-7;
    double fgmres_tol_s = 1e-5;
    unsigned seed = 1234;
    /// Raw (unscaled) pressure stabilization block.
    bool unscaled_stabilization = false;
    /// When nonempty, every assembled system is written here in Matrix Market
    /// form, one file set per (alpha, nu) pair.
    std::string export_dir;
};

struct ResultRow {
    double alpha = 0.0;
    double nu = 0.0;
    PrecondMode precond = PrecondMode::pr;
    OuterMethod outer = OuterMethod::rgmres;
    index_t it = 0;
    double cpu = 0.0;  // wall seconds of the outer solve
    double res = 0.0;  // ||d - (saddle matrix) x||_2, recomputed from x
    double rres = 0.0; // res / ||d||_2
    long long inner_a_solves = 0;
    bool converged = false;
    /// Converged by the solver's criterion but the recomputed relative
    /// residual exceeds 10x the requested tolerance.
    bool flagged = false;
    double beta_used = 0.0;
    std::string error; // nonempty when this row failed outright
};

/// Runs the (alpha, nu) x outer x precond grid. Each (alpha, nu) pair is
/// assembled once; pairs may run on parallel workers (BENCH_THREADS caps the
/// count), rows are returned in configuration order regardless.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Fixed column order: alpha, nu, precond, outer, IT, CPU, RES, RRES.
/// Throws std::invalid_argument on an empty row list.
std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format);

const char* to_string(OuterMethod m);
const char* to_string(PrecondMode m);

} // namespace gstokes

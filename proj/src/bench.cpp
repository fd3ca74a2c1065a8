#include "gstokes/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gstokes/gmres.hpp"
#include "gstokes/vector_ops.hpp"

namespace gstokes {

namespace {

constexpr std::array<double, 3> kChannelExtents = {2.2, 0.41, 0.41};

LinOp saddle_operator(const SaddleSystem& sys) {
    LinOp op;
    op.n = 3 * sys.n_u + sys.n_p;
    op.apply = [&sys](std::span<const double> x, std::span<double> y) {
        BlockVector xb = BlockVector::from_flat(sys.n_u, sys.n_p, x);
        BlockVector yb = apply_saddle(sys, xb);
        std::vector<double> flat = yb.flatten();
        std::copy(flat.begin(), flat.end(), y.begin());
    };
    return op;
}

double wall_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct Group {
    double alpha;
    double nu;
    std::size_t first_row; // index of the group's first row in the output
};

int worker_count(std::size_t n_groups) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    std::size_t count = std::min<std::size_t>(hw, n_groups);
    if (const char* env = std::getenv("BENCH_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0)
            count = std::min<std::size_t>(count, static_cast<std::size_t>(cap));
    }
    return static_cast<int>(std::max<std::size_t>(count, 1));
}

std::string mtx_tag(double alpha, double nu) {
    std::ostringstream oss;
    oss << "alpha" << alpha << "_nu" << nu;
    std::string tag = oss.str();
    for (char& c : tag)
        if (c == '+' || c == '.') c = (c == '+') ? 'p' : 'd';
    return tag;
}

void run_row(const SaddleSystem& sys, const ExperimentConfig& config,
             double beta, ResultRow& row) {
    PrecondConfig pcfg;
    pcfg.beta = beta;
    pcfg.mode = row.precond;
    pcfg.seed = config.seed;
    if (row.outer == OuterMethod::rgmres) {
        // The preconditioner acts as a fixed operator inside restarted GMRES,
        // so the inner stages run essentially to working precision.
        pcfg.tol_a = 1e-14;
        pcfg.tol_s = 1e-14;
        pcfg.max_inner = 500;
    } else {
        pcfg.tol_a = config.fgmres_tol_a;
        pcfg.tol_s = config.fgmres_tol_s;
        pcfg.max_inner = 200;
    }

    RegularizedPrecond pc(sys, pcfg);
    const index_t n = 3 * sys.n_u + sys.n_p;
    std::vector<double> d = sys.rhs.flatten();
    row.beta_used = beta;

    pc.reset_counters();
    GmresResult result;
    auto t0 = std::chrono::steady_clock::now();
    if (row.outer == OuterMethod::rgmres) {
        BlockVector pb = pc.solve(sys.rhs);
        std::vector<double> b = pb.flatten();
        result = gmres_left(pc.fused_operator(), identity_operator(n), b,
                            config.cfg);
    } else {
        result = fgmres(saddle_operator(sys), pc.solver_operator(), d,
                        config.cfg);
    }
    row.cpu = wall_seconds(t0);
    row.inner_a_solves = pc.inner_a_sweeps();
    row.it = result.report.iterations;
    row.converged = result.report.converged;

    // True residual of the original system, independent of the solver's
    // stopping rule.
    BlockVector xb = BlockVector::from_flat(sys.n_u, sys.n_p, result.x);
    BlockVector ax = apply_saddle(sys, xb);
    std::vector<double> r = ax.flatten();
    for (index_t i = 0; i < n; ++i) r[i] = d[i] - r[i];
    row.res = nrm2(r);
    double dnorm = nrm2(d);
    row.rres = dnorm > 0.0 ? row.res / dnorm : row.res;
    row.flagged = row.converged && row.rres > 10.0 * config.cfg.tol;
}

void run_group(const ExperimentConfig& config, const Group& group,
               std::vector<ResultRow>& rows) {
    const std::size_t rows_per_group =
        config.outers.size() * config.preconds.size();
    try {
        StokesParams params;
        params.alpha = group.alpha;
        params.nu = group.nu;
        params.dirichlet = DirichletMode::channel;
        params.unscaled_stabilization = config.unscaled_stabilization;
        TetMesh mesh = build_box_mesh(config.mesh[0], config.mesh[1],
                                      config.mesh[2], kChannelExtents);
        SaddleSystem sys = assemble(mesh, params);
        if (!config.export_dir.empty())
            export_system(sys, params, config.export_dir,
                          mtx_tag(group.alpha, group.nu));

        double beta = config.beta;
        if (config.beta_auto)
            beta = beta_heuristic(sys, 1.1, config.seed).value;

        for (std::size_t j = 0; j < rows_per_group; ++j) {
            ResultRow& row = rows[group.first_row + j];
            try {
                run_row(sys, config, beta, row);
            } catch (const std::exception& ex) {
                row.error = ex.what();
                row.converged = false;
            }
        }
    } catch (const std::exception& ex) {
        for (std::size_t j = 0; j < rows_per_group; ++j) {
            ResultRow& row = rows[group.first_row + j];
            if (row.error.empty()) row.error = ex.what();
            row.converged = false;
        }
    }
}

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", v);
    return buf;
}

std::string format_cpu(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

const char* to_string(OuterMethod m) {
    return m == OuterMethod::rgmres ? "rgmres" : "fgmres";
}

const char* to_string(PrecondMode m) {
    return m == PrecondMode::pr ? "pr" : "pgr";
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    if (config.alpha_list.empty() || config.nu_list.empty() ||
        config.outers.empty() || config.preconds.empty())
        throw std::invalid_argument("run_experiment: empty parameter list");
    if (!config.beta_auto && config.beta <= 0.0)
        throw std::invalid_argument("run_experiment: beta must be positive");

    std::vector<Group> groups;
    std::vector<ResultRow> rows;
    for (double alpha : config.alpha_list) {
        for (double nu : config.nu_list) {
            groups.push_back({alpha, nu, rows.size()});
            for (OuterMethod outer : config.outers) {
                for (PrecondMode precond : config.preconds) {
                    ResultRow row;
                    row.alpha = alpha;
                    row.nu = nu;
                    row.outer = outer;
                    row.precond = precond;
                    rows.push_back(row);
                }
            }
        }
    }

    int n_workers = worker_count(groups.size());
    if (n_workers <= 1) {
        for (const Group& g : groups) run_group(config, g, rows);
        return rows;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= groups.size()) break;
                run_group(config, groups[i], rows);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return rows;
}

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format) {
    if (rows.empty())
        throw std::invalid_argument("emit_table: no result rows");

    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "alpha,nu,precond,outer,IT,CPU,RES,RRES\n";
        for (const ResultRow& row : rows) {
            out << format_param(row.alpha) << ',' << format_param(row.nu)
                << ',' << to_string(row.precond) << ',' << to_string(row.outer)
                << ',' << row.it << ',' << format_cpu(row.cpu) << ','
                << format_sci(row.res) << ',' << format_sci(row.rres) << '\n';
        }
    } else {
        out << "| alpha | nu | precond | outer | IT | CPU | RES | RRES |\n";
        out << "|---|---|---|---|---|---|---|---|\n";
        for (const ResultRow& row : rows) {
            out << "| " << format_param(row.alpha) << " | "
                << format_param(row.nu) << " | " << to_string(row.precond)
                << " | " << to_string(row.outer) << " | " << row.it << " | "
                << format_cpu(row.cpu) << " | " << format_sci(row.res)
                << " | " << format_sci(row.rres) << " |\n";
        }
    }
    return out.str();
}

} // namespace gstokes

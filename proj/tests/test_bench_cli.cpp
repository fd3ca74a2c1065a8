#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "gstokes/bench.hpp"

using namespace gstokes;

namespace {

ExperimentConfig small_grid() {
    ExperimentConfig config;
    config.alpha_list = {100.0};
    config.nu_list = {0.1};
    config.mesh = {2, 2, 2};
    config.beta_auto = true;
    config.cfg.tol = 1e-6;
    return config;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("a single grid cell runs both preconditioners to convergence") {
    auto rows = run_experiment(small_grid());
    REQUIRE(rows.size() == 4); // two outer methods x two preconditioners
    for (const auto& row : rows) {
        CAPTURE(row.error);
        CHECK(row.error.empty());
        CHECK(row.converged);
        CHECK(!row.flagged);
        CHECK(row.it >= 1);
        CHECK(row.rres <= 1e-5);
        CHECK(row.res >= 0.0);
        CHECK(row.inner_a_solves > 0);
        CHECK(row.beta_used > 0.0);
        CHECK(row.cpu >= 0.0);
    }

    // Preconditioner rows for one cell are adjacent, pr before pgr.
    CHECK(rows[0].precond == PrecondMode::pr);
    CHECK(rows[1].precond == PrecondMode::pgr);
    CHECK(rows[0].outer == rows[1].outer);
    CHECK(rows[2].precond == PrecondMode::pr);
    CHECK(rows[3].precond == PrecondMode::pgr);
    CHECK(rows[2].outer == rows[3].outer);
    CHECK(rows[0].outer != rows[2].outer);
}

TEST_CASE("looser tolerances stop earlier") {
    auto config = small_grid();
    // A slightly longer channel: the single-cell cross-section converges in
    // one cliff-like drop, which lands both tolerances on the same count.
    config.mesh = {4, 2, 2};
    config.outers = {OuterMethod::rgmres};
    config.preconds = {PrecondMode::pr};

    config.cfg.tol = 1e-6;
    auto tight = run_experiment(config);
    config.cfg.tol = 1e-1;
    auto loose = run_experiment(config);

    REQUIRE(tight.size() == 1);
    REQUIRE(loose.size() == 1);
    CHECK(tight[0].converged);
    CHECK(loose[0].converged);
    CHECK(loose[0].it < tight[0].it);
}

TEST_CASE("identical configurations give identical iteration counts and residuals") {
    auto config = small_grid();
    auto first = run_experiment(config);
    auto second = run_experiment(config);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].it == second[i].it);
        CHECK(first[i].res == second[i].res);
        CHECK(first[i].rres == second[i].rres);
        CHECK(first[i].beta_used == second[i].beta_used);
        CHECK(first[i].inner_a_solves == second[i].inner_a_solves);
    }
}

TEST_CASE("a fixed regularization weight is honored") {
    auto config = small_grid();
    config.beta_auto = false;
    config.beta = 0.75;
    config.outers = {OuterMethod::fgmres};
    auto rows = run_experiment(config);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.beta_used == 0.75);
        CHECK(row.converged);
    }
}

TEST_CASE("csv table layout") {
    auto rows = run_experiment(small_grid());
    auto text = emit_table(rows, TableFormat::csv);
    auto ls = lines_of(text);
    REQUIRE(ls.size() == rows.size() + 1);
    CHECK(ls[0] == "alpha,nu,precond,outer,IT,CPU,RES,RRES");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        // eight comma-separated fields per data line
        std::size_t commas = 0;
        for (char c : ls[i]) commas += c == ',' ? 1 : 0;
        CHECK(commas == 7);
    }
    CHECK(ls[1].find("pr") != std::string::npos);
    CHECK(ls[2].find("pgr") != std::string::npos);

    auto single = emit_table({rows[0]}, TableFormat::csv);
    CHECK(lines_of(single).size() == 2);

    auto md = emit_table(rows, TableFormat::markdown);
    CHECK(md.find('|') != std::string::npos);

    CHECK_THROWS_AS(emit_table({}, TableFormat::csv), std::invalid_argument);
}

TEST_CASE("names of methods and preconditioners render stably") {
    CHECK(to_string(OuterMethod::rgmres) == std::string("rgmres"));
    CHECK(to_string(OuterMethod::fgmres) == std::string("fgmres"));
    CHECK(to_string(PrecondMode::pr) == std::string("pr"));
    CHECK(to_string(PrecondMode::pgr) == std::string("pgr"));
}

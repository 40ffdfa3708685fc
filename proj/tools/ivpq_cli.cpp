// Experiment harness: parameter sweeps to CSV, slope fits from CSV, single solves.

#include "ivpq/errors.hpp"
#include "ivpq/problem.hpp"
#include "ivpq/solver.hpp"
#include "ivpq/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <tuple>

namespace {

struct SweepFlags {
    std::string config;
    std::optional<std::string> problem, mode, r, rho, n_grid, seeds, out;
    std::optional<double> delta;
    std::optional<std::size_t> samples_per_step;
    bool wall_time = false;
};

ivpq::ExperimentConfig resolve(const SweepFlags& f) {
    ivpq::ExperimentConfig cfg = f.config.empty() ? ivpq::ExperimentConfig{} : ivpq::load_config(f.config);
    if (f.problem)
        cfg.problems = ivpq::parse_problem_list(*f.problem);
    if (f.mode)
        cfg.modes = ivpq::parse_modes(*f.mode);
    if (f.r)
        cfg.r_grid = ivpq::parse_int_list(*f.r);
    if (f.rho)
        cfg.rho_grid = ivpq::parse_double_list(*f.rho);
    if (f.n_grid)
        cfg.n_grid = ivpq::parse_n_grid(*f.n_grid);
    if (f.seeds)
        cfg.seeds = ivpq::parse_seeds(*f.seeds);
    if (f.delta)
        cfg.delta = *f.delta;
    if (f.samples_per_step)
        cfg.samples_per_step = *f.samples_per_step;
    if (f.out)
        cfg.output = *f.out;
    if (f.wall_time)
        cfg.record_wall_time = true;
    cfg.validate();
    return cfg;
}

int run_sweep_command(const SweepFlags& flags) {
    const auto cfg = resolve(flags);
    const auto rows = ivpq::run_sweep(cfg);
    if (cfg.output.empty() || cfg.output == "-") {
        ivpq::write_csv(std::cout, rows);
        return std::cout ? 0 : 1;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << cfg.output << "'\n";
        return 1;
    }
    ivpq::write_csv(out, rows);
    return out ? 0 : 1;
}

int run_fit_command(const std::string& csv, double delta) {
    std::ifstream in(csv);
    if (!in) {
        std::cerr << "error: cannot read '" << csv << "'\n";
        return 1;
    }
    const auto rows = ivpq::read_csv(in);
    std::map<std::tuple<std::string, std::string, int, double>, std::vector<ivpq::SweepRow>> groups;
    for (const auto& row : rows)
        groups[{row.problem, std::string(ivpq::to_string(row.mode)), row.r, row.rho}].push_back(row);

    std::cout << "problem,mode,r,rho,order,expected_order,cost_exponent\n";
    for (const auto& [key, group] : groups) {
        const auto& [problem, mode, r, rho] = key;
        std::string order = "na", cost = "na";
        try {
            order = std::to_string(ivpq::estimate_order(group));
        } catch (const ivpq::ContractViolation&) {
        }
        try {
            cost = std::to_string(ivpq::estimate_cost_exponent(group, delta));
        } catch (const ivpq::ContractViolation&) {
        }
        std::cout << problem << ',' << mode << ',' << r << ',' << rho << ',' << order << ',' << (r + rho + 1.0)
                  << ',' << cost << '\n';
    }
    return 0;
}

int run_solve_command(const std::string& problem, const std::string& mode, int r, double rho, std::size_t n,
                      std::uint64_t seed, double delta) {
    ivpq::CatalogOptions opt;
    opt.r = r;
    opt.rho = rho;
    const auto p = ivpq::catalog(problem, opt);
    ivpq::SolveConfig sc;
    sc.n = n;
    sc.mode = ivpq::parse_mode(mode);
    sc.seed = seed;
    sc.delta = delta;
    const auto traj = ivpq::solve(p, sc);

    std::cout << "t";
    for (std::size_t c = 0; c < p.dim; ++c)
        std::cout << ",y" << c;
    std::cout << '\n';
    for (std::size_t i = 0; i < traj.endpoints.size(); ++i) {
        std::cout << traj.breakpoints[i];
        for (double v : traj.endpoints[i])
            std::cout << ',' << v;
        std::cout << '\n';
    }
    std::cerr << "classical_evals=" << traj.ledger.classical_evals
              << " oracle_queries=" << traj.ledger.oracle_queries
              << " repetitions=" << traj.ledger.repetitions;
    if (p.reference)
        std::cerr << " sup_error=" << ivpq::sup_error(traj, *p.reference, 16);
    std::cerr << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integral-oracle IVP solver: sweeps, slope fits and single solves"};
    app.require_subcommand(1);

    SweepFlags flags;
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write one CSV row per cell");
    sweep->add_option("--config", flags.config, "INI configuration file")->check(CLI::ExistingFile);
    sweep->add_option("--problem", flags.problem, "Comma-separated catalog problems");
    sweep->add_option("--mode", flags.mode, "Comma-separated modes: det_exact, det_values, randomized, quantum_sim");
    sweep->add_option("--r", flags.r, "Comma-separated smoothness orders");
    sweep->add_option("--rho", flags.rho, "Comma-separated Hölder exponents");
    sweep->add_option("--n-grid", flags.n_grid, "Step counts: list or lo..hi (doubling)");
    sweep->add_option("--delta", flags.delta, "Target failure probability");
    sweep->add_option("--seeds", flags.seeds, "Seeds: list or lo..hi");
    sweep->add_option("--samples-per-step", flags.samples_per_step, "Error samples per piece");
    sweep->add_option("--out", flags.out, "Output CSV path ('-' for stdout)");
    sweep->add_flag("--wall-time", flags.wall_time, "Record wall time (makes the CSV irreproducible)");

    std::string csv;
    double fit_delta = 0.1;
    auto* fit = app.add_subcommand("fit", "Fit convergence orders and cost exponents from a sweep CSV");
    fit->add_option("--csv", csv, "Sweep CSV")->required();
    fit->add_option("--delta", fit_delta, "delta used by the sweep");

    std::string problem = "scalar-exponential", mode = "det_exact";
    int r = 1;
    double rho = 1.0, delta = 0.1;
    std::size_t n = 16;
    std::uint64_t seed = 1;
    auto* solve = app.add_subcommand("solve", "Solve one catalog problem and print the grid values");
    solve->add_option("--problem", problem, "Catalog problem");
    solve->add_option("--mode", mode, "Solve mode");
    solve->add_option("--r", r, "Smoothness order");
    solve->add_option("--rho", rho, "Hölder exponent");
    solve->add_option("--n", n, "Step count");
    solve->add_option("--seed", seed, "Seed");
    solve->add_option("--delta", delta, "Target failure probability");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep)
            return run_sweep_command(flags);
        if (*fit)
            return run_fit_command(csv, fit_delta);
        return run_solve_command(problem, mode, r, rho, n, seed, delta);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

#pragma once

#include "ivpq/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivpq {

/// One sweep: the cartesian product problems x modes x r x rho x n x seeds.
struct ExperimentConfig {
    std::vector<std::string> problems{"scalar-exponential"};
    std::optional<std::vector<double>> eta;
    std::vector<int> r_grid{0};
    std::vector<double> rho_grid{1.0};
    std::vector<SolveMode> modes{SolveMode::det_exact};
    std::vector<std::size_t> n_grid{8, 16, 32, 64};
    double delta = 0.1;
    std::vector<std::uint64_t> seeds{1};
    std::size_t samples_per_step = 16;
    double cost_constant = 4.0;
    double repetition_constant = 3.0;
    /// Off by default: timings would make the CSV irreproducible, so 0 is written instead.
    bool record_wall_time = false;
    /// Empty or "-" means standard output.
    std::string output;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Reads an INI file:
///
///   [problem]
///   name = scalar-exponential, integration-reduction(cos_pi)
///   eta = 1
///   [grid]
///   r = 0, 1
///   rho = 1
///   modes = det_exact, quantum_sim
///   n = 8..256            ; or a list: 8, 16, 32
///   seeds = 1..20         ; or a list: 3, 5, 8
///   delta = 0.1
///   [oracle]
///   cost_constant = 4
///   repetition_constant = 3
///   [output]
///   samples_per_step = 16
///   path = sweep.csv
///   wall_time = false
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

/// "8, 16, 32" or "8..256" (powers of two from 8 up to 256).
std::vector<std::size_t> parse_n_grid(std::string_view text);
/// "1, 2, 5" or "1..200" (inclusive range).
std::vector<std::uint64_t> parse_seeds(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::vector<SolveMode> parse_modes(std::string_view text);
std::vector<std::string> parse_problem_list(std::string_view text);

struct SweepRow {
    std::string problem;
    SolveMode mode = SolveMode::det_exact;
    int r = 0;
    double rho = 1.0;
    std::size_t n = 0;
    double h = 0.0;
    std::uint64_t seed = 0;
    double sup_error = 0.0;
    std::uint64_t classical_evals = 0;
    std::uint64_t oracle_queries = 0;
    std::uint64_t repetitions = 0;
    double wall_time = 0.0;
    /// "ok", or "diverged at step <i>" when the solver blew up.
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
    std::uint64_t total_cost() const { return classical_evals + oracle_queries; }
};

/// Rows in order problem, mode, r, rho, n, seed. Combinations with r = 0 and rho < 1 are
/// outside every Hölder class and are skipped.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// Header plus one line per row; shortest round-trip decimal formatting, locale-independent.
void write_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> read_csv(std::istream& in);

/// Least-squares slope of log2(error) against log2(h); errors are aggregated per n by the
/// median over seeds. Rows must share problem, mode, r and rho; at least 3 distinct n.
double estimate_order(std::span<const SweepRow> rows);

/// Least-squares slope of log2(cost) against log2(n), with the cost divided by
/// log2(n) + log2(1/delta) for median-boosted modes. Same grouping rules as estimate_order.
double estimate_cost_exponent(std::span<const SweepRow> rows, double delta);

/// Least-squares slope of ys against xs.
double fit_slope(std::span<const double> xs, std::span<const double> ys);

} // namespace ivpq

#pragma once

#include "ivpq/problem.hpp"
#include "ivpq/quad.hpp"
#include "ivpq/taylor.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ivpq {

/// How the per-step residual integrals are obtained.
///   det_exact    adaptive quadrature to a tight tolerance (stand-in for exact functionals)
///   det_values   deterministic oracle with eps1 = h
///   randomized   randomized oracle with eps1 = h, median-boosted
///   quantum_sim  simulated quantum oracle with eps1 = h, median-boosted
enum class SolveMode { det_exact, det_values, randomized, quantum_sim };

std::string_view to_string(SolveMode mode);
/// Throws LookupError for an unknown name.
SolveMode parse_mode(std::string_view name);
bool is_boosted(SolveMode mode);

struct SolveConfig {
    std::size_t n = 16;
    SolveMode mode = SolveMode::det_exact;
    double delta = 0.1;
    std::uint64_t seed = 0;
    double cost_constant = 4.0;
    double repetition_constant = 3.0;
    double exact_tolerance = 1e-12;

    void validate() const;
};

/// Piecewise-polynomial approximation: pieces[i] lives on [breakpoints[i], breakpoints[i+1]]
/// and starts at endpoints[i]. endpoints has n + 1 entries, the last one being y_n.
struct Trajectory {
    std::vector<double> breakpoints;
    std::vector<VecPolynomial> pieces;
    std::vector<std::vector<double>> endpoints;
    /// Estimate A_i of the residual integral used in step i.
    std::vector<std::vector<double>> residual_integrals;
    CostLedger ledger;
    SolveMode mode = SolveMode::det_exact;

    std::size_t steps() const { return pieces.size(); }
};

/// Runs the stepping scheme
///   y_{i+1} = y_i + int_{x_i}^{x_{i+1}} w_i(l_i(t)) dt + h^{r+rho+1} A_i
/// on the uniform grid with h = (b - a)/n.
/// Throws ContractViolation if f(eta) = 0, DivergenceError if the state blows up.
Trajectory solve(const IVPProblem& problem, const SolveConfig& cfg);

/// Piece lookup is left-closed; t = b belongs to the last piece. Throws DomainError outside [a, b].
std::vector<double> eval_trajectory(const Trajectory& traj, double t);

/// Max-norm deviation from the reference over `samples_per_step` equispaced points per piece,
/// both piece endpoints included (only the left one when samples_per_step == 1).
double sup_error(const Trajectory& traj, const Reference& reference, std::size_t samples_per_step);

} // namespace ivpq

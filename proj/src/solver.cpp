#include "ivpq/solver.hpp"

#include "ivpq/errors.hpp"
#include "ivpq/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ivpq {

std::string_view to_string(SolveMode mode) {
    switch (mode) {
    case SolveMode::det_exact: return "det_exact";
    case SolveMode::det_values: return "det_values";
    case SolveMode::randomized: return "randomized";
    case SolveMode::quantum_sim: return "quantum_sim";
    }
    return "unknown";
}

SolveMode parse_mode(std::string_view name) {
    for (auto mode : {SolveMode::det_exact, SolveMode::det_values, SolveMode::randomized, SolveMode::quantum_sim})
        if (name == to_string(mode))
            return mode;
    throw LookupError("unknown solve mode '" + std::string(name) + "'");
}

bool is_boosted(SolveMode mode) {
    return mode == SolveMode::randomized || mode == SolveMode::quantum_sim;
}

void SolveConfig::validate() const {
    if (n == 0)
        throw ContractViolation("step count n must be at least 1");
    if (!(delta > 0.0 && delta < 0.5))
        throw ContractViolation("delta must lie in (0, 1/2)");
    if (!(cost_constant > 0.0) || !(repetition_constant > 0.0))
        throw ContractViolation("oracle constants must be positive");
    if (!(exact_tolerance > 0.0))
        throw ContractViolation("exact tolerance must be positive");
}

namespace {

double max_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> residual_estimate(const ResidualIntegrand& g, const IVPProblem& problem,
                                      const SolveConfig& cfg, std::size_t repetitions, std::size_t step,
                                      double h, CostLedger& ledger) {
    // Residual evaluations are paid for through the oracle's own query count.
    const VectorIntegrand integrand{g.dim(), [&g](double u, std::span<double> out) {
                                        CostLedger scratch;
                                        g(u, out, scratch);
                                    }};
    OracleConfig oc;
    oc.eps1 = h;
    oc.r = problem.smoothness.r;
    oc.rho = problem.smoothness.rho;
    oc.seed = derive_seed(cfg.seed, step);
    oc.cost_constant = cfg.cost_constant;

    switch (cfg.mode) {
    case SolveMode::det_exact: {
        auto res = integrate_adaptive(integrand, cfg.exact_tolerance);
        ledger.oracle_queries += res.evaluations;
        return std::move(res.value);
    }
    case SolveMode::det_values: {
        oc.kind = OracleKind::deterministic;
        auto est = integrate_deterministic(integrand, oc);
        ledger.oracle_queries += est.queries;
        return std::move(est.value);
    }
    case SolveMode::randomized: {
        oc.kind = OracleKind::randomized;
        auto est = boost_median(
            [&](std::uint64_t seed) {
                OracleConfig run = oc;
                run.seed = seed;
                return integrate_randomized(integrand, run);
            },
            repetitions, oc.seed);
        ledger.oracle_queries += est.queries;
        ledger.repetitions += repetitions;
        return std::move(est.value);
    }
    case SolveMode::quantum_sim: {
        oc.kind = OracleKind::quantum_sim;
        const QuantumIntegralSimulator sim(integrand, oc);
        auto est = boost_median([&](std::uint64_t seed) { return sim.emit(seed); }, repetitions, oc.seed);
        ledger.oracle_queries += est.queries;
        ledger.repetitions += repetitions;
        return std::move(est.value);
    }
    }
    throw ContractViolation("unknown solve mode");
}

} // namespace

Trajectory solve(const IVPProblem& problem, const SolveConfig& cfg) {
    problem.validate();
    cfg.validate();

    const std::size_t n = cfg.n;
    const std::size_t d = problem.dim;
    const int r = problem.smoothness.r;
    const double rho = problem.smoothness.rho;
    const double h = (problem.b - problem.a) / static_cast<double>(n);
    const double residual_scale = std::pow(h, r + rho + 1.0);
    const double blowup = 1e6 * (1.0 + max_norm(problem.eta));
    const std::size_t repetitions =
        is_boosted(cfg.mode) ? repetitions_for(cfg.delta, n, cfg.repetition_constant) : 1;

    Trajectory traj;
    traj.mode = cfg.mode;
    traj.breakpoints.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        traj.breakpoints[i] = problem.a + static_cast<double>(i) * h;
    traj.breakpoints[n] = problem.b;
    traj.endpoints.reserve(n + 1);
    traj.pieces.reserve(n);
    traj.residual_integrals.reserve(n);
    traj.endpoints.push_back(problem.eta);

    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> y = traj.endpoints.back();
        const double x = traj.breakpoints[i];
        try {
            // One fetch of the partials serves both the Taylor map and the solution derivatives.
            TaylorMap w = build_w(problem, y, traj.ledger);
            auto derivs = local_derivatives(w, r + 1);
            if (i == 0 && max_norm(derivs[1]) == 0.0)
                throw ContractViolation("f(eta) = 0: the initial state is an equilibrium");
            VecPolynomial l = build_l(derivs, x);
            const std::vector<double> base = integrate_w_of_l(w, l, h);
            const ResidualIntegrand g(problem, std::move(w), std::move(l), h);
            std::vector<double> A = residual_estimate(g, problem, cfg, repetitions, i, h, traj.ledger);

            std::vector<double> next(d);
            for (std::size_t c = 0; c < d; ++c)
                next[c] = y[c] + base[c] + residual_scale * A[c];
            for (double v : next)
                if (!std::isfinite(v) || std::abs(v) > blowup)
                    throw DivergenceError(i, "state diverged at step " + std::to_string(i));

            traj.pieces.push_back(g.base());
            traj.residual_integrals.push_back(std::move(A));
            traj.endpoints.push_back(std::move(next));
        } catch (const DomainError& e) {
            throw DivergenceError(i, "step " + std::to_string(i) + ": " + e.what());
        }
    }
    return traj;
}

std::vector<double> eval_trajectory(const Trajectory& traj, double t) {
    const auto& x = traj.breakpoints;
    if (x.size() < 2)
        throw ContractViolation("empty trajectory");
    if (!(t >= x.front() && t <= x.back()))
        throw DomainError("t lies outside the solution interval");
    // Largest i with x_i <= t, capped at the last piece.
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
    i = std::min(i, traj.pieces.size() - 1);
    return traj.pieces[i](t);
}

double sup_error(const Trajectory& traj, const Reference& reference, std::size_t samples_per_step) {
    if (samples_per_step == 0)
        throw ContractViolation("samples_per_step must be positive");
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.pieces.size(); ++i) {
        const double lo = traj.breakpoints[i], hi = traj.breakpoints[i + 1];
        for (std::size_t k = 0; k < samples_per_step; ++k) {
            const double t = samples_per_step == 1
                                 ? lo
                                 : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples_per_step - 1);
            const auto approx = traj.pieces[i](t);
            const auto exact = reference(t);
            for (std::size_t c = 0; c < approx.size(); ++c)
                worst = std::max(worst, std::abs(exact[c] - approx[c]));
        }
    }
    return worst;
}

} // namespace ivpq

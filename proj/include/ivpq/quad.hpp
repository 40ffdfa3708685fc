#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivpq {

enum class OracleKind { deterministic, randomized, quantum_sim };

std::string_view to_string(OracleKind kind);

/// Vector-valued function on [0, 1].
struct VectorIntegrand {
    std::size_t dim = 1;
    std::function<void(double u, std::span<double> out)> eval;
};

struct IntegralEstimate {
    std::vector<double> value;
    std::uint64_t queries = 0;
    OracleKind kind = OracleKind::deterministic;
    double target_eps = 0.0;
};

/// Accuracy target and integrand class handed to an integral oracle.
struct OracleConfig {
    OracleKind kind = OracleKind::deterministic;
    double eps1 = 1e-2;
    int r = 0;
    double rho = 1.0;
    std::uint64_t seed = 0;
    double cost_constant = 4.0;

    void validate() const;
};

/// Charged query budget ceil(C eps1^{-1/s}) with s = r + rho (deterministic),
/// r + rho + 1/2 (randomized) or r + rho + 1 (quantum_sim).
std::uint64_t query_budget(const OracleConfig& cfg);

/// Composite (r+1)-point Gauss-Legendre rule on equal panels; uses at most the budget.
IntegralEstimate integrate_deterministic(const VectorIntegrand& g, const OracleConfig& cfg);

/// Piecewise-interpolant control variate plus plain Monte Carlo on the remainder.
IntegralEstimate integrate_randomized(const VectorIntegrand& g, const OracleConfig& cfg);

/// Statistical stand-in for a quantum integration routine. The reference integral is
/// computed classically once; emit() then draws outputs obeying the success contract:
/// per component, with probability 3/4 the error is uniform on [-eps1, eps1], otherwise
/// its magnitude is uniform on (eps1, 10 eps1] with a random sign. Each emission charges
/// query_budget(cfg) queries regardless of the classical work spent on the reference.
class QuantumIntegralSimulator {
public:
    QuantumIntegralSimulator(const VectorIntegrand& g, const OracleConfig& cfg);

    IntegralEstimate emit(std::uint64_t seed) const;
    const std::vector<double>& reference() const { return reference_; }

private:
    OracleConfig cfg_;
    std::vector<double> reference_;
};

IntegralEstimate integrate_quantum_sim(const VectorIntegrand& g, const OracleConfig& cfg);

/// Dispatches on cfg.kind.
IntegralEstimate integrate(const VectorIntegrand& g, const OracleConfig& cfg);

using RepeatableEstimator = std::function<IntegralEstimate(std::uint64_t seed)>;

/// Componentwise median of k runs with seeds derive_seed(seed, 0..k-1). Queries add up.
/// For even k the lower median is taken.
IntegralEstimate boost_median(const RepeatableEstimator& run, std::size_t k, std::uint64_t seed);

/// k = max(1, ceil(c log2(1 / (1 - (1 - delta)^{1/n})))): repetitions that lift a 3/4
/// success rate to (1 - delta)^{1/n} per call.
std::size_t repetitions_for(double delta, std::size_t n, double c = 3.0);

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t points);

/// Composite Gauss-Legendre over [lo, hi] with `panels` equal panels.
std::vector<double> integrate_gauss_composite(const VectorIntegrand& g, std::size_t panels, std::size_t points,
                                              double lo = 0.0, double hi = 1.0);

struct AdaptiveResult {
    std::vector<double> value;
    double error_estimate = 0.0;
    std::uint64_t evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7, 15) with an absolute max-norm tolerance. Also stops
/// once bisection repeatedly fails to reduce the error estimate (rounding-noise floor).
AdaptiveResult integrate_adaptive(const VectorIntegrand& g, double tolerance, double lo = 0.0, double hi = 1.0,
                                  std::size_t max_intervals = 4096);

} // namespace ivpq

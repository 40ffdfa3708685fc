#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivpq {

/// Largest smoothness order the Taylor machinery supports.
inline constexpr int kMaxSmoothness = 3;

/// Parameters of the Hölder class F^{r,rho}: bounds D_0..D_r on the partials of f,
/// the Hölder constant of the r-th partials and a Lipschitz constant of f.
struct HolderSmoothness {
    int r = 0;
    double rho = 1.0;
    std::vector<double> deriv_bounds; // D_0 .. D_r
    double holder_const = 1.0;
    double lipschitz = 1.0;

    /// Throws ContractViolation when the class parameters are inconsistent.
    void validate() const;
};

/// Counters for the cost model. A solve owns one ledger; sub-ledgers can be merged with +=.
struct CostLedger {
    std::uint64_t classical_evals = 0;
    std::uint64_t oracle_queries = 0;
    std::uint64_t repetitions = 0;

    std::uint64_t total() const { return classical_evals + oracle_queries; }

    CostLedger& operator+=(const CostLedger& other) {
        classical_evals += other.classical_evals;
        oracle_queries += other.oracle_queries;
        repetitions += other.repetitions;
        return *this;
    }
};

/// Returns the partial derivative of component `component` of f at y. `wrt` lists the
/// variables differentiated against, one entry per order: {} is f itself, {0, 0, 1}
/// is d^3 f / dy_0^2 dy_1. Partials are symmetric, so the order of `wrt` is irrelevant.
using PartialOracle = std::function<double(std::span<const double> y, std::size_t component,
                                           std::span<const std::size_t> wrt)>;

using Reference = std::function<std::vector<double>(double t)>;

/// Autonomous initial-value problem z' = f(z), z(a) = eta on [a, b].
struct IVPProblem {
    std::string name;
    std::size_t dim = 1;
    double a = 0.0;
    double b = 1.0;
    std::vector<double> eta;
    PartialOracle partial;
    HolderSmoothness smoothness;
    std::optional<Reference> reference;

    /// Throws ContractViolation when the fields do not describe a well-formed problem.
    void validate() const;
};

/// Single partial derivative; charges one classical evaluation.
double eval_partial(const IVPProblem& problem, std::span<const double> y, std::size_t component,
                    std::span<const std::size_t> wrt, CostLedger& ledger);

/// Full right-hand side f(y) written to `out`; charges one classical evaluation.
void eval_rhs(const IVPProblem& problem, std::span<const double> y, std::span<double> out,
              CostLedger& ledger);

struct CatalogOptions {
    int r = 1;
    double rho = 1.0;
    std::optional<std::vector<double>> eta;
    /// Integrand for integration-reduction: cos_pi, exp or kink.
    std::string g = "cos_pi";
};

/// Named test problems:
///   scalar-exponential      z' = z,        z(0) = eta (default 1) on [0, 1]
///   scalar-quadratic        z' = z^2,      z(0) = 1 on [0, 0.5]
///   logistic                z' = z(1 - z), z(0) = eta (default 0.1) on [0, 1]
///   integration-reduction   u' = 1, v' = g(u), u(0) = v(0) = 0 on [0, 1]
/// The last one also accepts the form "integration-reduction(<g>)".
IVPProblem catalog(std::string_view name, const CatalogOptions& options = {});

/// Names accepted by catalog() (without parameters).
std::vector<std::string> catalog_names();

} // namespace ivpq

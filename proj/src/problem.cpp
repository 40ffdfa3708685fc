#include "ivpq/problem.hpp"

#include "ivpq/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ivpq {

void HolderSmoothness::validate() const {
    if (r < 0 || r > kMaxSmoothness)
        throw ContractViolation("smoothness order r must lie in [0, " + std::to_string(kMaxSmoothness) + "]");
    if (!(rho > 0.0 && rho <= 1.0))
        throw ContractViolation("Hölder exponent rho must lie in (0, 1]");
    if (r == 0 && rho != 1.0)
        throw ContractViolation("rho must be 1 when r = 0");
    if (deriv_bounds.size() != static_cast<std::size_t>(r) + 1)
        throw ContractViolation("deriv_bounds must hold D_0..D_r");
    if (!std::all_of(deriv_bounds.begin(), deriv_bounds.end(), [](double d) { return d > 0.0; }))
        throw ContractViolation("derivative bounds must be positive");
    if (!(holder_const > 0.0))
        throw ContractViolation("Hölder constant must be positive");
    if (!(lipschitz > 0.0))
        throw ContractViolation("Lipschitz constant must be positive");
    if (r >= 1 && lipschitz > deriv_bounds[1])
        throw ContractViolation("Lipschitz constant exceeds D_1");
    if (r == 0 && lipschitz != holder_const)
        throw ContractViolation("for r = 0 the Lipschitz constant is the Hölder constant");
}

void IVPProblem::validate() const {
    if (dim == 0)
        throw ContractViolation("problem dimension must be positive");
    if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        throw ContractViolation("interval must satisfy a < b");
    if (eta.size() != dim)
        throw ContractViolation("initial state has wrong dimension");
    if (!partial)
        throw ContractViolation("problem has no derivative oracle");
    smoothness.validate();
}

namespace {

void check_state(const IVPProblem& problem, std::span<const double> y) {
    if (y.size() != problem.dim)
        throw ContractViolation("state has wrong dimension");
    for (double v : y)
        if (!std::isfinite(v))
            throw DomainError("non-finite state passed to the right-hand side");
}

} // namespace

double eval_partial(const IVPProblem& problem, std::span<const double> y, std::size_t component,
                    std::span<const std::size_t> wrt, CostLedger& ledger) {
    if (wrt.size() > static_cast<std::size_t>(problem.smoothness.r))
        throw ContractViolation("partial derivative of order " + std::to_string(wrt.size()) +
                                " requested from a class of order " + std::to_string(problem.smoothness.r));
    if (component >= problem.dim)
        throw ContractViolation("component index out of range");
    for (std::size_t v : wrt)
        if (v >= problem.dim)
            throw ContractViolation("differentiation variable out of range");
    check_state(problem, y);
    ++ledger.classical_evals;
    return problem.partial(y, component, wrt);
}

void eval_rhs(const IVPProblem& problem, std::span<const double> y, std::span<double> out,
              CostLedger& ledger) {
    check_state(problem, y);
    if (out.size() != problem.dim)
        throw ContractViolation("output has wrong dimension");
    for (std::size_t j = 0; j < problem.dim; ++j)
        out[j] = problem.partial(y, j, {});
    ++ledger.classical_evals;
}

namespace {

// Bounds on |d^i f| for i = 0..4 over the declared enclosure; index r+1 doubles as the
// Lipschitz constant of the r-th partials. Identically zero partials get the bound 1.
using BoundTable = std::array<double, kMaxSmoothness + 2>;

HolderSmoothness make_smoothness(int r, double rho, const BoundTable& bounds, double enclosure_diameter) {
    if (r < 0 || r > kMaxSmoothness)
        throw ContractViolation("smoothness order r must lie in [0, " + std::to_string(kMaxSmoothness) + "]");
    HolderSmoothness s;
    s.r = r;
    s.rho = rho;
    s.deriv_bounds.assign(bounds.begin(), bounds.begin() + r + 1);
    // A Lipschitz bound K on a set of diameter D gives the Hölder bound K D^{1-rho}.
    s.holder_const = bounds[r + 1] * std::pow(enclosure_diameter, 1.0 - rho);
    s.lipschitz = bounds[1];
    if (r == 0)
        s.lipschitz = s.holder_const;
    s.validate();
    return s;
}

bool all_first_variable(std::span<const std::size_t> wrt) {
    return std::all_of(wrt.begin(), wrt.end(), [](std::size_t v) { return v == 0; });
}

IVPProblem scalar_exponential(const CatalogOptions& opt) {
    IVPProblem p;
    p.name = "scalar-exponential";
    p.dim = 1;
    p.a = 0.0;
    p.b = 1.0;
    p.eta = opt.eta.value_or(std::vector<double>{1.0});
    if (p.eta.size() != 1)
        throw ContractViolation("scalar-exponential takes a scalar eta");
    const double eta = p.eta[0];
    p.partial = [](std::span<const double> y, std::size_t, std::span<const std::size_t> wrt) {
        switch (wrt.size()) {
        case 0: return y[0];
        case 1: return 1.0;
        default: return 0.0;
        }
    };
    // |z(t)| <= e |eta| on [0, 1].
    const double radius = std::numbers::e * std::max(std::abs(eta), 1e-300);
    p.smoothness = make_smoothness(opt.r, opt.rho, {radius, 1.0, 1.0, 1.0, 1.0}, 2.0 * radius);
    p.reference = [eta](double t) { return std::vector<double>{eta * std::exp(t)}; };
    return p;
}

IVPProblem scalar_quadratic(const CatalogOptions& opt) {
    IVPProblem p;
    p.name = "scalar-quadratic";
    p.dim = 1;
    p.a = 0.0;
    p.b = 0.5;
    p.eta = {1.0};
    if (opt.eta && *opt.eta != p.eta)
        throw ContractViolation("scalar-quadratic is only declared for eta = 1");
    p.partial = [](std::span<const double> y, std::size_t, std::span<const std::size_t> wrt) {
        switch (wrt.size()) {
        case 0: return y[0] * y[0];
        case 1: return 2.0 * y[0];
        case 2: return 2.0;
        default: return 0.0;
        }
    };
    // Solution stays in the enclosure [1, 2].
    p.smoothness = make_smoothness(opt.r, opt.rho, {4.0, 4.0, 2.0, 1.0, 1.0}, 1.0);
    p.reference = [](double t) { return std::vector<double>{1.0 / (1.0 - t)}; };
    return p;
}

IVPProblem logistic(const CatalogOptions& opt) {
    IVPProblem p;
    p.name = "logistic";
    p.dim = 1;
    p.a = 0.0;
    p.b = 1.0;
    p.eta = opt.eta.value_or(std::vector<double>{0.1});
    if (p.eta.size() != 1 || !(p.eta[0] > 0.0 && p.eta[0] < 1.0))
        throw ContractViolation("logistic takes a scalar eta in (0, 1)");
    const double eta = p.eta[0];
    p.partial = [](std::span<const double> y, std::size_t, std::span<const std::size_t> wrt) {
        switch (wrt.size()) {
        case 0: return y[0] * (1.0 - y[0]);
        case 1: return 1.0 - 2.0 * y[0];
        case 2: return -2.0;
        default: return 0.0;
        }
    };
    // Solution stays in the enclosure [0, 1].
    p.smoothness = make_smoothness(opt.r, opt.rho, {0.25, 1.0, 2.0, 1.0, 1.0}, 1.0);
    p.reference = [eta](double t) {
        return std::vector<double>{1.0 / (1.0 + (1.0 - eta) / eta * std::exp(-t))};
    };
    return p;
}

struct ScalarIntegrand {
    int max_order;                         // highest derivative available
    std::function<double(double, int)> d;  // d(u, k) = g^{(k)}(u)
    std::function<double(double)> primitive; // int_0^t g
    BoundTable bounds;                     // bounds on f = (1, g(u)) partials over u in [0, 1]
};

ScalarIntegrand reduction_integrand(const std::string& g) {
    using std::numbers::pi;
    if (g == "cos_pi") {
        return {kMaxSmoothness,
                [](double u, int k) {
                    const double s = std::pow(pi, k);
                    switch (k % 4) {
                    case 0: return s * std::cos(pi * u);
                    case 1: return -s * std::sin(pi * u);
                    case 2: return -s * std::cos(pi * u);
                    default: return s * std::sin(pi * u);
                    }
                },
                [](double t) { return std::sin(pi * t) / pi; },
                {1.0, pi, pi * pi, pi * pi * pi, pi * pi * pi * pi}};
    }
    if (g == "exp") {
        const double e = std::numbers::e;
        return {kMaxSmoothness, [](double u, int) { return std::exp(u); },
                [](double t) { return std::exp(t) - 1.0; }, {e, e, e, e, e}};
    }
    if (g == "kink") {
        return {0, [](double u, int) { return std::abs(u - 0.5); },
                [](double t) {
                    if (t <= 0.5)
                        return 0.5 * t - 0.5 * t * t;
                    const double s = t - 0.5;
                    return 0.125 + 0.5 * s * s;
                },
                {1.0, 1.0, 1.0, 1.0, 1.0}};
    }
    throw LookupError("unknown integration-reduction integrand '" + g + "' (expected cos_pi, exp or kink)");
}

IVPProblem integration_reduction(const CatalogOptions& opt) {
    auto g = reduction_integrand(opt.g);
    if (opt.r > g.max_order)
        throw ContractViolation("integrand '" + opt.g + "' is only smooth up to order " + std::to_string(g.max_order));
    IVPProblem p;
    p.name = "integration-reduction(" + opt.g + ")";
    p.dim = 2;
    p.a = 0.0;
    p.b = 1.0;
    p.eta = {0.0, 0.0};
    if (opt.eta && *opt.eta != p.eta)
        throw ContractViolation("integration-reduction starts at u = v = 0");
    p.partial = [d = g.d](std::span<const double> y, std::size_t component, std::span<const std::size_t> wrt) {
        if (component == 0)
            return wrt.empty() ? 1.0 : 0.0;
        if (!all_first_variable(wrt))
            return 0.0;
        return d(y[0], static_cast<int>(wrt.size()));
    };
    p.smoothness = make_smoothness(opt.r, opt.rho, g.bounds, 1.0);
    p.reference = [prim = g.primitive](double t) { return std::vector<double>{t, prim(t)}; };
    return p;
}

} // namespace

IVPProblem catalog(std::string_view name, const CatalogOptions& options) {
    CatalogOptions opt = options;
    std::string base(name);
    if (auto open = base.find('('); open != std::string::npos) {
        if (base.back() != ')')
            throw LookupError("malformed problem name '" + base + "'");
        opt.g = base.substr(open + 1, base.size() - open - 2);
        base.resize(open);
    }
    IVPProblem p;
    if (base == "scalar-exponential")
        p = scalar_exponential(opt);
    else if (base == "scalar-quadratic")
        p = scalar_quadratic(opt);
    else if (base == "logistic")
        p = logistic(opt);
    else if (base == "integration-reduction")
        p = integration_reduction(opt);
    else
        throw LookupError("unknown catalog problem '" + std::string(name) + "'");
    p.validate();
    return p;
}

std::vector<std::string> catalog_names() {
    return {"scalar-exponential", "scalar-quadratic", "integration-reduction", "logistic"};
}

} // namespace ivpq

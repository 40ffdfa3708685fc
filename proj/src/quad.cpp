#include "ivpq/quad.hpp"

#include "ivpq/errors.hpp"
#include "ivpq/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace ivpq {

std::string_view to_string(OracleKind kind) {
    switch (kind) {
    case OracleKind::deterministic: return "deterministic";
    case OracleKind::randomized: return "randomized";
    case OracleKind::quantum_sim: return "quantum_sim";
    }
    return "unknown";
}

void OracleConfig::validate() const {
    if (!(eps1 > 0.0) || !std::isfinite(eps1))
        throw ContractViolation("oracle accuracy eps1 must be positive");
    if (!(cost_constant > 0.0) || !std::isfinite(cost_constant))
        throw ContractViolation("oracle cost constant must be positive");
    if (r < 0 || !(rho > 0.0 && rho <= 1.0))
        throw ContractViolation("oracle smoothness must have r >= 0 and rho in (0, 1]");
}

std::uint64_t query_budget(const OracleConfig& cfg) {
    cfg.validate();
    double s = cfg.r + cfg.rho;
    if (cfg.kind == OracleKind::randomized)
        s += 0.5;
    else if (cfg.kind == OracleKind::quantum_sim)
        s += 1.0;
    const double raw = cfg.cost_constant * std::pow(cfg.eps1, -1.0 / s);
    if (raw > 1e10)
        throw ContractViolation("query budget exceeds 1e10; eps1 too small");
    // Shave a few ulps so exact powers (e.g. 100^{1/2}) do not round up past the integer.
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(raw * (1.0 - 1e-12))));
}

GaussRule gauss_legendre(std::size_t points) {
    if (points == 0)
        throw ContractViolation("Gauss rule needs at least one node");
    GaussRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const std::size_t n = points;
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = p2;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

namespace {

void require_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DomainError("integrand returned a non-finite value");
}

// Panels with per-node integrand values, shared by the deterministic and randomized oracles.
struct PanelSamples {
    std::size_t panels;
    GaussRule rule;
    std::vector<double> values; // [panel][node][component]
};

PanelSamples sample_panels(const VectorIntegrand& g, std::size_t panels, std::size_t points) {
    PanelSamples s{panels, gauss_legendre(points), {}};
    const std::size_t d = g.dim;
    s.values.resize(panels * points * d);
    const double width = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = (static_cast<double>(p) + 0.5) * width;
        for (std::size_t q = 0; q < points; ++q) {
            std::span<double> out(s.values.data() + (p * points + q) * d, d);
            g.eval(mid + 0.5 * width * s.rule.nodes[q], out);
            require_finite(out);
        }
    }
    return s;
}

std::vector<double> panel_integral(const PanelSamples& s, std::size_t d) {
    const std::size_t points = s.rule.nodes.size();
    std::vector<double> total(d, 0.0);
    for (std::size_t p = 0; p < s.panels; ++p) {
        for (std::size_t c = 0; c < d; ++c) {
            double acc = 0.0;
            for (std::size_t q = 0; q < points; ++q)
                acc += s.rule.weights[q] * s.values[(p * points + q) * d + c];
            total[c] += acc;
        }
    }
    const double half_width = 0.5 / static_cast<double>(s.panels);
    for (double& v : total)
        v *= half_width;
    return total;
}

} // namespace

std::vector<double> integrate_gauss_composite(const VectorIntegrand& g, std::size_t panels, std::size_t points,
                                              double lo, double hi) {
    if (panels == 0)
        throw ContractViolation("composite rule needs at least one panel");
    const GaussRule rule = gauss_legendre(points);
    const std::size_t d = g.dim;
    std::vector<double> total(d, 0.0), buf(d);
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = lo + (static_cast<double>(p) + 0.5) * width;
        for (std::size_t q = 0; q < points; ++q) {
            g.eval(mid + 0.5 * width * rule.nodes[q], buf);
            for (std::size_t c = 0; c < d; ++c)
                total[c] += rule.weights[q] * buf[c];
        }
    }
    for (double& v : total)
        v *= 0.5 * width;
    require_finite(total);
    return total;
}

namespace {

// Kronrod nodes on [0, 1) half of [-1, 1]; odd indices are the Gauss-7 nodes.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodPanel {
    double lo, hi;
    std::vector<double> value;
    double error;
};

KronrodPanel kronrod15(const VectorIntegrand& g, double lo, double hi) {
    const std::size_t d = g.dim;
    const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<double> kron(d, 0.0), gauss(d, 0.0), fa(d), fb(d);
    g.eval(center, fa);
    for (std::size_t c = 0; c < d; ++c) {
        kron[c] = kWgk[7] * fa[c];
        gauss[c] = kWg[3] * fa[c];
    }
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        g.eval(center - dx, fa);
        g.eval(center + dx, fb);
        for (std::size_t c = 0; c < d; ++c) {
            kron[c] += kWgk[j] * (fa[c] + fb[c]);
            if (j % 2 == 1)
                gauss[c] += kWg[j / 2] * (fa[c] + fb[c]);
        }
    }
    double err = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        kron[c] *= half;
        gauss[c] *= half;
        err = std::max(err, std::abs(kron[c] - gauss[c]));
    }
    require_finite(kron);
    return {lo, hi, std::move(kron), err};
}

} // namespace

AdaptiveResult integrate_adaptive(const VectorIntegrand& g, double tolerance, double lo, double hi,
                                  std::size_t max_intervals) {
    if (!(tolerance > 0.0))
        throw ContractViolation("adaptive quadrature needs a positive tolerance");
    auto by_error = [](const KronrodPanel& a, const KronrodPanel& b) { return a.error < b.error; };
    std::priority_queue<KronrodPanel, std::vector<KronrodPanel>, decltype(by_error)> heap(by_error);
    heap.push(kronrod15(g, lo, hi));
    std::uint64_t evals = 15;
    double total_error = heap.top().error;
    // Bisections that fail to shrink the local error estimate indicate rounding noise.
    constexpr int kMaxStalls = 20;
    int stalls = 0;
    while (total_error > tolerance && heap.size() < max_intervals && stalls < kMaxStalls) {
        KronrodPanel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        auto left = kronrod15(g, worst.lo, mid);
        auto right = kronrod15(g, mid, worst.hi);
        evals += 30;
        stalls += left.error + right.error >= 0.99 * worst.error;
        total_error += left.error + right.error - worst.error;
        heap.push(std::move(left));
        heap.push(std::move(right));
    }
    AdaptiveResult result{std::vector<double>(g.dim, 0.0), 0.0, evals};
    // Sum in interval order so the result does not depend on heap internals.
    std::vector<KronrodPanel> panels;
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (const auto& p : panels) {
        for (std::size_t c = 0; c < g.dim; ++c)
            result.value[c] += p.value[c];
        result.error_estimate += p.error;
    }
    return result;
}

IntegralEstimate integrate_deterministic(const VectorIntegrand& g, const OracleConfig& cfg) {
    const std::uint64_t budget = query_budget(cfg);
    const std::size_t points = static_cast<std::size_t>(cfg.r) + 1;
    const std::size_t panels = std::max<std::size_t>(1, budget / points);
    const auto samples = sample_panels(g, panels, points);
    return {panel_integral(samples, g.dim), panels * points, OracleKind::deterministic, cfg.eps1};
}

IntegralEstimate integrate_randomized(const VectorIntegrand& g, const OracleConfig& cfg) {
    const std::uint64_t budget = query_budget(cfg);
    const std::size_t points = static_cast<std::size_t>(cfg.r) + 1;
    // Each panel costs `points` interpolation nodes plus one Monte Carlo sample.
    const std::size_t panels = std::max<std::size_t>(1, budget / (points + 1));
    const std::size_t samples = panels;
    const std::size_t d = g.dim;

    const auto nodes = sample_panels(g, panels, points);
    std::vector<double> value = panel_integral(nodes, d);

    // Barycentric weights of the Lagrange basis at the Gauss nodes.
    const auto& x = nodes.rule.nodes;
    std::vector<double> bary(points, 1.0);
    for (std::size_t i = 0; i < points; ++i)
        for (std::size_t j = 0; j < points; ++j)
            if (i != j)
                bary[i] /= (x[i] - x[j]);

    RandomStream rng(cfg.seed);
    std::vector<double> mean(d, 0.0), gu(d), basis(points);
    for (std::size_t k = 0; k < samples; ++k) {
        const double u = rng.uniform();
        const std::size_t p = std::min(panels - 1, static_cast<std::size_t>(u * static_cast<double>(panels)));
        const double t = 2.0 * (u * static_cast<double>(panels) - static_cast<double>(p)) - 1.0;
        for (std::size_t i = 0; i < points; ++i) {
            double b = bary[i];
            for (std::size_t j = 0; j < points; ++j)
                if (i != j)
                    b *= (t - x[j]);
            basis[i] = b;
        }
        g.eval(u, gu);
        require_finite(gu);
        for (std::size_t c = 0; c < d; ++c) {
            double interp = 0.0;
            for (std::size_t i = 0; i < points; ++i)
                interp += basis[i] * nodes.values[(p * points + i) * d + c];
            mean[c] += gu[c] - interp;
        }
    }
    for (std::size_t c = 0; c < d; ++c)
        value[c] += mean[c] / static_cast<double>(samples);
    return {std::move(value), panels * points + samples, OracleKind::randomized, cfg.eps1};
}

QuantumIntegralSimulator::QuantumIntegralSimulator(const VectorIntegrand& g, const OracleConfig& cfg) : cfg_(cfg) {
    cfg_.kind = OracleKind::quantum_sim;
    cfg_.validate();
    // 10^4 d nodes: 5-point Gauss on 2000 d panels.
    reference_ = integrate_gauss_composite(g, 2000 * g.dim, 5);
}

IntegralEstimate QuantumIntegralSimulator::emit(std::uint64_t seed) const {
    const double eps = cfg_.eps1;
    std::vector<double> value(reference_.size());
    for (std::size_t c = 0; c < value.size(); ++c) {
        RandomStream rng(derive_seed(seed, c));
        double noise;
        if (rng.uniform() < 0.75) {
            noise = eps * (2.0 * rng.uniform() - 1.0);
        } else {
            const double magnitude = eps * (1.0 + 9.0 * (1.0 - rng.uniform()));
            noise = rng.uniform() < 0.5 ? -magnitude : magnitude;
        }
        value[c] = reference_[c] + noise;
    }
    return {std::move(value), query_budget(cfg_), OracleKind::quantum_sim, eps};
}

IntegralEstimate integrate_quantum_sim(const VectorIntegrand& g, const OracleConfig& cfg) {
    return QuantumIntegralSimulator(g, cfg).emit(cfg.seed);
}

IntegralEstimate integrate(const VectorIntegrand& g, const OracleConfig& cfg) {
    switch (cfg.kind) {
    case OracleKind::deterministic: return integrate_deterministic(g, cfg);
    case OracleKind::randomized: return integrate_randomized(g, cfg);
    case OracleKind::quantum_sim: return integrate_quantum_sim(g, cfg);
    }
    throw ContractViolation("unknown oracle kind");
}

IntegralEstimate boost_median(const RepeatableEstimator& run, std::size_t k, std::uint64_t seed) {
    if (k == 0)
        throw ContractViolation("median boosting needs k >= 1");
    std::vector<IntegralEstimate> runs;
    runs.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        runs.push_back(run(derive_seed(seed, i)));
    IntegralEstimate out = runs.front();
    if (k == 1)
        return out;
    out.queries = 0;
    for (const auto& r : runs) {
        if (r.value.size() != out.value.size())
            throw ContractViolation("boosted runs disagree on dimension");
        out.queries += r.queries;
    }
    std::vector<double> column(k);
    for (std::size_t c = 0; c < out.value.size(); ++c) {
        for (std::size_t i = 0; i < k; ++i)
            column[i] = runs[i].value[c];
        auto mid = column.begin() + static_cast<std::ptrdiff_t>((k - 1) / 2);
        std::nth_element(column.begin(), mid, column.end());
        out.value[c] = *mid;
    }
    return out;
}

std::size_t repetitions_for(double delta, std::size_t n, double c) {
    if (!(delta > 0.0 && delta < 0.5))
        throw ContractViolation("failure probability delta must lie in (0, 1/2)");
    if (n == 0)
        throw ContractViolation("repetitions_for needs n >= 1");
    if (!(c > 0.0))
        throw ContractViolation("repetition constant must be positive");
    // 1 - (1 - delta)^{1/n} without cancellation.
    const double per_call_failure = -std::expm1(std::log1p(-delta) / static_cast<double>(n));
    const double k = c * std::log2(1.0 / per_call_failure);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k - 1e-9)));
}

} // namespace ivpq

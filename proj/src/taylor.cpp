#include "ivpq/taylor.hpp"

#include "ivpq/errors.hpp"

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cmath>

namespace ivpq {

namespace {

using Scratch = boost::container::small_vector<double, 8>;

std::span<double> as_span(Scratch& s) { return {s.data(), s.size()}; }

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};
constexpr double kInverseFactorial[] = {1.0, 1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0};

std::size_t ipow(std::size_t base, int exp) {
    std::size_t out = 1;
    for (int i = 0; i < exp; ++i)
        out *= base;
    return out;
}

// Advances a base-`dim` odometer; returns false after the last tuple.
bool next_tuple(std::vector<std::size_t>& idx, std::size_t dim) {
    for (std::size_t pos = idx.size(); pos-- > 0;) {
        if (++idx[pos] < dim)
            return true;
        idx[pos] = 0;
    }
    return false;
}

std::size_t flat_index(const std::vector<std::size_t>& idx, std::size_t dim) {
    std::size_t flat = 0;
    for (std::size_t v : idx)
        flat = flat * dim + v;
    return flat;
}

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j)
            out[i + j] += p[i] * q[j];
    return out;
}

} // namespace

VecPolynomial::VecPolynomial(double origin, std::size_t dim, std::size_t degree)
    : origin_(origin), dim_(dim), degree_(degree), coeffs_((degree + 1) * dim, 0.0) {
    if (dim == 0)
        throw ContractViolation("polynomial dimension must be positive");
}

void VecPolynomial::eval_local(double s, std::span<double> out) const {
    for (std::size_t c = 0; c < dim_; ++c) {
        double acc = coeff(c, degree_);
        for (std::size_t k = degree_; k-- > 0;)
            acc = acc * s + coeff(c, k);
        out[c] = acc;
    }
}

std::vector<double> VecPolynomial::operator()(double t) const {
    std::vector<double> out(dim_);
    eval_local(t - origin_, out);
    return out;
}

std::vector<double> VecPolynomial::integrate(double length) const {
    std::vector<double> out(dim_, 0.0);
    double power = length;
    for (std::size_t k = 0; k <= degree_; ++k) {
        const double weight = power / static_cast<double>(k + 1);
        for (std::size_t c = 0; c < dim_; ++c)
            out[c] += coeff(c, k) * weight;
        power *= length;
    }
    return out;
}

void PartialTensor::contract(std::span<const std::span<const double>> args, std::span<double> out) const {
    if (args.size() != static_cast<std::size_t>(order))
        throw ContractViolation("tensor contraction needs one argument per order");
    const std::size_t block = ipow(dim, order);
    for (std::size_t j = 0; j < dim; ++j) {
        const double* row = data.data() + j * block;
        if (order == 0) {
            out[j] = row[0];
            continue;
        }
        double acc = 0.0;
        std::vector<std::size_t> idx(order, 0);
        std::size_t flat = 0;
        do {
            double term = row[flat++];
            for (int m = 0; m < order; ++m)
                term *= args[m][idx[m]];
            acc += term;
        } while (next_tuple(idx, dim));
        out[j] = acc;
    }
}

PartialTensor fetch_partials(const IVPProblem& problem, std::span<const double> y, int order,
                             CostLedger& ledger) {
    PartialTensor t;
    t.dim = problem.dim;
    t.order = order;
    const std::size_t block = ipow(t.dim, order);
    t.data.assign(t.dim * block, 0.0);
    std::vector<std::size_t> idx(order, 0);
    // Lexicographic sweep: the sorted permutation of any tuple precedes it, so it is already filled.
    do {
        const std::size_t flat = flat_index(idx, t.dim);
        if (std::is_sorted(idx.begin(), idx.end())) {
            for (std::size_t j = 0; j < t.dim; ++j)
                t.data[j * block + flat] = eval_partial(problem, y, j, idx, ledger);
        } else {
            auto sorted = idx;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t src = flat_index(sorted, t.dim);
            for (std::size_t j = 0; j < t.dim; ++j)
                t.data[j * block + flat] = t.data[j * block + src];
        }
    } while (order > 0 && next_tuple(idx, t.dim));
    return t;
}

TaylorMap::TaylorMap(std::vector<double> center, std::vector<PartialTensor> partials)
    : center_(std::move(center)), partials_(std::move(partials)) {
    if (partials_.empty() || partials_.size() > static_cast<std::size_t>(kMaxSmoothness) + 1)
        throw ContractViolation("Taylor map needs partials of orders 0..r with r <= 3");
    for (std::size_t j = 0; j < partials_.size(); ++j)
        if (partials_[j].order != static_cast<int>(j) || partials_[j].dim != center_.size())
            throw ContractViolation("Taylor map partials do not match its center");
}

void TaylorMap::eval(std::span<const double> y, std::span<double> out) const {
    const std::size_t d = dim();
    partials_[0].contract({}, out);
    if (order() == 0)
        return;
    Scratch delta(d), term(d);
    for (std::size_t c = 0; c < d; ++c)
        delta[c] = y[c] - center_[c];
    const std::span<const double> dv(delta.data(), d);
    const std::span<const double> args[] = {dv, dv, dv};
    for (int j = 1; j <= order(); ++j) {
        partials_[j].contract(std::span(args, j), as_span(term));
        for (std::size_t c = 0; c < d; ++c)
            out[c] += kInverseFactorial[j] * term[c];
    }
}

std::vector<double> TaylorMap::operator()(std::span<const double> y) const {
    std::vector<double> out(dim());
    eval(y, out);
    return out;
}

namespace {

std::vector<std::vector<double>> derivative_recurrence(std::span<const PartialTensor> f, std::span<const double> y,
                                                       int upto) {
    const std::size_t d = y.size();
    std::vector<std::vector<double>> z;
    z.emplace_back(y.begin(), y.end());
    auto apply = [&](int order, std::initializer_list<std::span<const double>> args) {
        std::vector<double> out(d);
        f[order].contract(std::span(args.begin(), args.size()), out);
        return out;
    };
    if (upto >= 1)
        z.push_back(apply(0, {}));
    if (upto >= 2)
        z.push_back(apply(1, {z[1]}));
    if (upto >= 3) {
        auto a = apply(2, {z[1], z[1]});
        auto b = apply(1, {z[2]});
        for (std::size_t c = 0; c < d; ++c)
            a[c] += b[c];
        z.push_back(std::move(a));
    }
    if (upto >= 4) {
        auto a = apply(3, {z[1], z[1], z[1]});
        auto b = apply(2, {z[1], z[2]});
        auto c3 = apply(1, {z[3]});
        for (std::size_t c = 0; c < d; ++c)
            a[c] += 3.0 * b[c] + c3[c];
        z.push_back(std::move(a));
    }
    return z;
}

} // namespace

std::vector<std::vector<double>> local_derivatives(const IVPProblem& problem, std::span<const double> y,
                                                   int upto, CostLedger& ledger) {
    if (upto < 0 || upto > problem.smoothness.r + 1)
        throw ContractViolation("local derivatives requested beyond order r + 1");
    std::vector<PartialTensor> partials;
    for (int k = 0; k < upto; ++k)
        partials.push_back(fetch_partials(problem, y, k, ledger));
    if (upto == 0) {
        for (double v : y)
            if (!std::isfinite(v))
                throw DomainError("non-finite state");
    }
    return derivative_recurrence(partials, y, upto);
}

std::vector<std::vector<double>> local_derivatives(const TaylorMap& w, int upto) {
    if (upto < 0 || upto > w.order() + 1)
        throw ContractViolation("local derivatives requested beyond the Taylor map order + 1");
    return derivative_recurrence(std::span(w.partials()).first(std::max(upto, 0)), w.center(), upto);
}

VecPolynomial build_l(const std::vector<std::vector<double>>& derivs, double x) {
    if (derivs.empty())
        throw ContractViolation("build_l needs at least the zeroth derivative");
    if (derivs.size() > std::size(kFactorial))
        throw ContractViolation("build_l supports degree at most 4");
    const std::size_t d = derivs[0].size();
    VecPolynomial l(x, d, derivs.size() - 1);
    for (std::size_t k = 0; k < derivs.size(); ++k) {
        if (derivs[k].size() != d)
            throw ContractViolation("derivative vectors have mismatched lengths");
        for (std::size_t c = 0; c < d; ++c)
            l.coeff(c, k) = derivs[k][c] / kFactorial[k];
    }
    return l;
}

TaylorMap build_w(const IVPProblem& problem, std::span<const double> y, CostLedger& ledger) {
    std::vector<PartialTensor> partials;
    for (int k = 0; k <= problem.smoothness.r; ++k)
        partials.push_back(fetch_partials(problem, y, k, ledger));
    return TaylorMap(std::vector<double>(y.begin(), y.end()), std::move(partials));
}

VecPolynomial compose(const TaylorMap& w, const VecPolynomial& l) {
    const std::size_t d = w.dim();
    if (l.dim() != d)
        throw ContractViolation("composition needs matching dimensions");
    const int r = w.order();
    VecPolynomial out(l.origin(), d, static_cast<std::size_t>(r) * l.degree());

    std::vector<std::vector<double>> delta(d, std::vector<double>(l.degree() + 1));
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t k = 0; k <= l.degree(); ++k)
            delta[c][k] = l.coeff(c, k);
        delta[c][0] -= w.center()[c];
    }

    for (std::size_t c = 0; c < d; ++c)
        out.coeff(c, 0) += w.partials()[0].data[c];

    for (int j = 1; j <= r; ++j) {
        const PartialTensor& t = w.partials()[j];
        const std::size_t block = ipow(d, j);
        std::vector<std::size_t> idx(j, 0);
        std::size_t flat = 0;
        do {
            std::vector<double> prod = delta[idx[0]];
            for (int m = 1; m < j; ++m)
                prod = poly_mul(prod, delta[idx[m]]);
            for (std::size_t c = 0; c < d; ++c) {
                const double coef = kInverseFactorial[j] * t.data[c * block + flat];
                if (coef == 0.0)
                    continue;
                for (std::size_t k = 0; k < prod.size(); ++k)
                    out.coeff(c, k) += coef * prod[k];
            }
            ++flat;
        } while (next_tuple(idx, d));
    }
    return out;
}

std::vector<double> integrate_w_of_l(const TaylorMap& w, const VecPolynomial& l, double length) {
    if (!(length > 0.0))
        throw ContractViolation("integration interval must have positive length");
    return compose(w, l).integrate(length);
}

std::vector<double> integrate_w_of_l(const TaylorMap& w, const VecPolynomial& l, double x_i, double x_next) {
    if (x_i != l.origin())
        throw ContractViolation("l must be centered at the left end of the interval");
    return integrate_w_of_l(w, l, x_next - x_i);
}

ResidualIntegrand::ResidualIntegrand(const IVPProblem& problem, TaylorMap w, VecPolynomial l, double h)
    : problem_(&problem), w_(std::move(w)), l_(std::move(l)), h_(h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw ContractViolation("residual step must be positive");
    if (w_.dim() != problem.dim || l_.dim() != problem.dim)
        throw ContractViolation("residual pieces do not match the problem dimension");
    scale_ = std::pow(h, -(problem.smoothness.r + problem.smoothness.rho));
}

void ResidualIntegrand::operator()(double u, std::span<double> out, CostLedger& ledger) const {
    const std::size_t d = dim();
    Scratch y(d), fy(d), wy(d);
    l_.eval_local(u * h_, as_span(y));
    eval_rhs(*problem_, as_span(y), as_span(fy), ledger);
    w_.eval(as_span(y), as_span(wy));
    for (std::size_t c = 0; c < d; ++c)
        out[c] = scale_ * (fy[c] - wy[c]);
}

std::vector<double> ResidualIntegrand::operator()(double u, CostLedger& ledger) const {
    std::vector<double> out(dim());
    (*this)(u, out, ledger);
    return out;
}

ResidualIntegrand residual(const IVPProblem& problem, const TaylorMap& w, const VecPolynomial& l, double x_i,
                           double h) {
    if (x_i != l.origin())
        throw ContractViolation("l must be centered at x_i");
    return ResidualIntegrand(problem, w, l, h);
}

} // namespace ivpq

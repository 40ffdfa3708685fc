#pragma once

#include "ivpq/problem.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ivpq {

/// Vector-valued polynomial in one variable, stored in the shifted basis (t - origin)^k.
class VecPolynomial {
public:
    VecPolynomial() = default;
    /// Zero polynomial of the given degree.
    VecPolynomial(double origin, std::size_t dim, std::size_t degree);

    double origin() const { return origin_; }
    std::size_t dim() const { return dim_; }
    std::size_t degree() const { return degree_; }

    /// Coefficient of (t - origin)^k in component c.
    double coeff(std::size_t c, std::size_t k) const { return coeffs_[k * dim_ + c]; }
    double& coeff(std::size_t c, std::size_t k) { return coeffs_[k * dim_ + c]; }

    /// Value at the local coordinate s = t - origin (Horner).
    void eval_local(double s, std::span<double> out) const;
    std::vector<double> operator()(double t) const;

    /// Integral of every component over [origin, origin + length].
    std::vector<double> integrate(double length) const;

private:
    double origin_ = 0.0;
    std::size_t dim_ = 0;
    std::size_t degree_ = 0;
    std::vector<double> coeffs_;
};

/// Dense tensor of all order-k partials of f at a point: entry (j, i1, ..., ik) is
/// d^k f^j / dy_i1 ... dy_ik. Symmetric in the i's.
struct PartialTensor {
    std::size_t dim = 0;
    int order = 0;
    std::vector<double> data;

    /// Applies the tensor to k vectors: out_j = sum T(j, i1..ik) v1[i1] ... vk[ik].
    void contract(std::span<const std::span<const double>> args, std::span<double> out) const;
};

/// Fetches every partial of order `order` at y, one oracle call per distinct
/// (component, sorted index tuple); the remaining entries are filled by symmetry.
PartialTensor fetch_partials(const IVPProblem& problem, std::span<const double> y, int order,
                             CostLedger& ledger);

/// Truncated Taylor expansion of f about a center:
///   w(y) = sum_{j<=r} f^{(j)}(center)(y - center)^j / j!
/// The partial tensors are kept unscaled; the 1/j! is applied on evaluation.
class TaylorMap {
public:
    TaylorMap() = default;
    TaylorMap(std::vector<double> center, std::vector<PartialTensor> partials);

    std::size_t dim() const { return center_.size(); }
    int order() const { return static_cast<int>(partials_.size()) - 1; }
    const std::vector<double>& center() const { return center_; }
    const std::vector<PartialTensor>& partials() const { return partials_; }

    void eval(std::span<const double> y, std::span<double> out) const;
    std::vector<double> operator()(std::span<const double> y) const;

private:
    std::vector<double> center_;
    std::vector<PartialTensor> partials_;
};

/// Derivatives z(x), z'(x), ..., z^{(upto)}(x) of the local solution through y, from the
/// chain-rule recurrences z' = f, z'' = f'z', z''' = f''(z',z') + f'z'', ...
std::vector<std::vector<double>> local_derivatives(const IVPProblem& problem, std::span<const double> y,
                                                   int upto, CostLedger& ledger);

/// Same recurrences driven by partials already held in a Taylor map (no oracle calls).
/// Requires upto <= w.order() + 1.
std::vector<std::vector<double>> local_derivatives(const TaylorMap& w, int upto);

/// l(t) = sum_j derivs[j] (t - x)^j / j!.
VecPolynomial build_l(const std::vector<std::vector<double>>& derivs, double x);

/// Taylor map of order problem.smoothness.r about y.
TaylorMap build_w(const IVPProblem& problem, std::span<const double> y, CostLedger& ledger);

/// Exact composition w(l(t)) as a polynomial in the basis of l.
VecPolynomial compose(const TaylorMap& w, const VecPolynomial& l);

/// Exact integral of w(l(t)) over [l.origin(), l.origin() + length].
std::vector<double> integrate_w_of_l(const TaylorMap& w, const VecPolynomial& l, double length);
std::vector<double> integrate_w_of_l(const TaylorMap& w, const VecPolynomial& l, double x_i, double x_next);

/// g(u) = h^{-(r+rho)} (f(l(x + uh)) - w(l(x + uh))) on [0, 1].
/// Keeps a pointer to the problem, which must outlive the integrand.
class ResidualIntegrand {
public:
    ResidualIntegrand(const IVPProblem& problem, TaylorMap w, VecPolynomial l, double h);

    std::size_t dim() const { return l_.dim(); }
    double step() const { return h_; }
    const VecPolynomial& base() const { return l_; }
    const TaylorMap& map() const { return w_; }

    /// One classical f-evaluation per call.
    void operator()(double u, std::span<double> out, CostLedger& ledger) const;
    std::vector<double> operator()(double u, CostLedger& ledger) const;

private:
    const IVPProblem* problem_;
    TaylorMap w_;
    VecPolynomial l_;
    double h_;
    double scale_;
};

ResidualIntegrand residual(const IVPProblem& problem, const TaylorMap& w, const VecPolynomial& l,
                           double x_i, double h);

} // namespace ivpq

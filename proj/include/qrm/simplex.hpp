#pragma once

#include "qrm/rational.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace qrm {

// Exact  ∫_{0<=mu_1<=...<=mu_n<=1} prod mu_i^{a_i} dmu.
Rational monomial_simplex_integral(std::span<const int> exponents);

// Node set on the ordered simplex 0 <= mu_1 <= ... <= mu_dim <= 1.
// Weights already include the Jacobian; they sum to 1/dim!.
struct SimplexRule {
    enum class Kind { Empty, GaussLegendre, Sobol };

    Kind kind = Kind::Empty;
    int dim = 0;
    int order = 0;                 // GL points per axis, or QMC point count
    std::vector<double> nodes;     // size() * dim, row-major
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    std::span<const double> node(std::size_t i) const
    {
        return {nodes.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

using RulePtr = std::shared_ptr<const SimplexRule>;

// Tensor Gauss–Legendre through the collapsed map
//   mu_dim = v_dim,  mu_i = mu_{i+1} v_i,  Jacobian prod_{i>=2} mu_i.
// Cached and shared; safe to call from several threads.
RulePtr gauss_legendre_rule(int dim, int q);

// Sobol points mapped by the order-statistics map
//   mu_dim = u_dim^{1/dim},  mu_i = mu_{i+1} u_i^{1/i},
// equal weights 1/(n dim!).  Deterministic (unscrambled sequence).
RulePtr sobol_rule(int dim, std::size_t n);

// Streams the same points as sobol_rule(dim, n) without storing them; the
// caller applies the weight 1/(n dim!).
void for_each_sobol_node(int dim, std::size_t n, const std::function<void(std::size_t, std::span<const double>)>& f);

// The lambda = 0 rule: one empty node with weight 1.
RulePtr empty_rule();

// Gauss–Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);

struct QuadratureSpec {
    enum class Scheme { Auto, GaussLegendre, QMC };
    Scheme scheme = Scheme::Auto;
    int order = 24;                  // GL per-axis order when fixed
    std::size_t points = 1u << 14;   // QMC points when fixed
    int gl_max_dim = 6;              // Auto: GL up to this dimension, QMC beyond
    std::size_t budget = 1u << 22;   // max integrand evaluations (Auto)
};

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;              // estimated absolute error
    std::size_t evaluations = 0;
};

using SimplexIntegrand = std::function<std::complex<double>(std::span<const double>)>;

// Apply a fixed rule.
std::complex<double> apply_rule(const SimplexRule& rule, const SimplexIntegrand& f);

// Adaptive estimate with absolute error target tol * max(1, ∫|f|).
// Throws ConvergenceError when the budget is exhausted.
QuadratureResult simplex_integrate(const SimplexIntegrand& f, int dim, const QuadratureSpec& spec, double tol);

} // namespace qrm

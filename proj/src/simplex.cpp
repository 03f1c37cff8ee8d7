#include "qrm/simplex.hpp"

#include "qrm/errors.hpp"

#include <boost/random/sobol.hpp>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace qrm {

Rational monomial_simplex_integral(std::span<const int> exponents)
{
    // Integrate mu_1 first: each step raises the running degree by a_i + 1.
    Rational r(1);
    long acc = 0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 0) throw DomainError("negative monomial exponent");
        acc += exponents[i];
        r /= Rational(static_cast<long>(i + 1) + acc);
    }
    return r;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w)
{
    if (n < 1) throw DomainError("Gauss-Legendre order must be positive");
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n));
    if (!table) throw std::runtime_error("gsl_integration_glfixed_table_alloc failed");
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &x[i], &w[i], table);
    gsl_integration_glfixed_table_free(table);
}

namespace {

std::mutex cache_mutex;
std::map<std::tuple<int, int, std::size_t>, RulePtr> rule_cache;
std::size_t cache_doubles = 0;
constexpr std::size_t cache_rule_limit = std::size_t{1} << 23;
constexpr std::size_t cache_total_limit = std::size_t{1} << 26;

double inv_factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return 1.0 / f;
}

RulePtr build_gl(int dim, int q)
{
    auto rule = std::make_shared<SimplexRule>();
    rule->kind = SimplexRule::Kind::GaussLegendre;
    rule->dim = dim;
    rule->order = q;
    std::vector<double> x, w;
    gauss_legendre(q, 0.0, 1.0, x, w);
    std::size_t count = 1;
    for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(q);
    rule->nodes.resize(count * dim);
    rule->weights.resize(count);
    std::vector<int> idx(dim, 0);
    for (std::size_t k = 0; k < count; ++k) {
        double* mu = rule->nodes.data() + k * dim;
        double weight = 1.0;
        double upper = 1.0;
        for (int i = dim - 1; i >= 0; --i) {
            mu[i] = upper * x[idx[i]];
            weight *= w[idx[i]];
            if (i >= 1) weight *= mu[i];   // Jacobian factor mu_{i+1} of the next-lower coordinate
            upper = mu[i];
        }
        rule->weights[k] = weight;
        for (int d = 0; d < dim; ++d) {
            if (++idx[d] < q) break;
            idx[d] = 0;
        }
    }
    return rule;
}

// Order-statistics map of the first n Sobol points; the origin is never
// produced, and exact zeros in a coordinate are nudged off the boundary.
void sobol_points(int dim, std::size_t n, const std::function<void(std::size_t, std::span<const double>)>& f)
{
    boost::random::sobol gen(static_cast<std::size_t>(dim));
    const double scale = std::ldexp(1.0, -64);
    std::vector<double> u(dim), mu(dim);
    for (std::size_t k = 0; k < n; ++k) {
        for (int d = 0; d < dim; ++d) {
            double v = static_cast<double>(gen()) * scale;
            u[d] = v > 0.0 ? v : 0.5 * scale;
        }
        double upper = 1.0;
        for (int i = dim - 1; i >= 0; --i) {
            mu[i] = upper * std::pow(u[i], 1.0 / (i + 1));
            upper = mu[i];
        }
        f(k, std::span<const double>(mu.data(), mu.size()));
    }
}

RulePtr build_sobol(int dim, std::size_t n)
{
    auto rule = std::make_shared<SimplexRule>();
    rule->kind = SimplexRule::Kind::Sobol;
    rule->dim = dim;
    rule->order = static_cast<int>(n);
    rule->nodes.resize(n * dim);
    rule->weights.assign(n, inv_factorial(dim) / static_cast<double>(n));
    sobol_points(dim, n, [&](std::size_t k, std::span<const double> mu) {
        std::copy(mu.begin(), mu.end(), rule->nodes.begin() + k * dim);
    });
    return rule;
}

RulePtr cached(int kind, int dim, std::size_t n)
{
    auto key = std::make_tuple(kind, dim, n);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = rule_cache.find(key);
        if (it != rule_cache.end()) return it->second;
    }
    RulePtr rule = kind == 0 ? build_gl(dim, static_cast<int>(n)) : build_sobol(dim, n);
    // Large rules are rebuilt on demand rather than pinned in memory.
    const std::size_t doubles = rule->nodes.size() + rule->weights.size();
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (doubles > cache_rule_limit || cache_doubles + doubles > cache_total_limit) return rule;
    auto [it, inserted] = rule_cache.emplace(key, rule);
    if (inserted) cache_doubles += doubles;
    return it->second;
}

} // namespace

RulePtr gauss_legendre_rule(int dim, int q)
{
    if (dim < 0 || q < 1) throw DomainError("invalid Gauss-Legendre simplex rule");
    if (dim == 0) return empty_rule();
    double count = std::pow(static_cast<double>(q), dim);
    if (count > 5e7) throw DomainError("Gauss-Legendre simplex rule too large");
    return cached(0, dim, static_cast<std::size_t>(q));
}

RulePtr sobol_rule(int dim, std::size_t n)
{
    if (dim < 0 || n < 1) throw DomainError("invalid QMC simplex rule");
    if (dim == 0) return empty_rule();
    return cached(1, dim, n);
}

RulePtr empty_rule()
{
    static const RulePtr rule = [] {
        auto r = std::make_shared<SimplexRule>();
        r->weights = {1.0};
        return r;
    }();
    return rule;
}

std::complex<double> apply_rule(const SimplexRule& rule, const SimplexIntegrand& f)
{
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weights[k] * f(rule.node(k));
    return s;
}

namespace {

struct Estimate {
    std::complex<double> value;
    double abs_integral;
};

Estimate apply_with_abs(const SimplexRule& rule, const SimplexIntegrand& f)
{
    Estimate e{0.0, 0.0};
    for (std::size_t k = 0; k < rule.size(); ++k) {
        std::complex<double> v = f(rule.node(k));
        e.value += rule.weights[k] * v;
        e.abs_integral += rule.weights[k] * std::abs(v);
    }
    return e;
}

} // namespace

QuadratureResult simplex_integrate(const SimplexIntegrand& f, int dim, const QuadratureSpec& spec, double tol)
{
    if (dim < 0) throw DomainError("simplex dimension must be nonnegative");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    QuadratureResult res;
    if (dim == 0) {
        res.value = f(std::span<const double>());
        res.evaluations = 1;
        return res;
    }
    if (spec.scheme == QuadratureSpec::Scheme::GaussLegendre) {
        auto rule = gauss_legendre_rule(dim, spec.order);
        auto lo = gauss_legendre_rule(dim, std::max(1, spec.order - 2));
        res.value = apply_rule(*rule, f);
        res.error = std::abs(res.value - apply_rule(*lo, f));
        res.evaluations = rule->size() + lo->size();
        return res;
    }
    if (spec.scheme == QuadratureSpec::Scheme::QMC) {
        auto rule = sobol_rule(dim, spec.points);
        auto half = sobol_rule(dim, std::max<std::size_t>(1, spec.points / 2));
        res.value = apply_rule(*rule, f);
        res.error = std::abs(res.value - apply_rule(*half, f));
        res.evaluations = rule->size() + half->size();
        return res;
    }

    // Auto: refine until two successive estimates agree.
    std::size_t used = 0;
    if (dim <= spec.gl_max_dim) {
        Estimate prev{};
        bool have_prev = false;
        for (int q = 2;; q += 2) {
            double count = std::pow(static_cast<double>(q), dim);
            if (static_cast<double>(used) + count > static_cast<double>(spec.budget)) break;
            auto rule = gauss_legendre_rule(dim, q);
            Estimate cur = apply_with_abs(*rule, f);
            used += rule->size();
            if (have_prev) {
                double err = std::abs(cur.value - prev.value);
                if (err <= tol * std::max(1.0, cur.abs_integral)) {
                    res.value = cur.value;
                    res.error = err;
                    res.evaluations = used;
                    return res;
                }
            }
            prev = cur;
            have_prev = true;
        }
    }
    Estimate prev{};
    bool have_prev = false;
    for (std::size_t n = 1024; used + n <= spec.budget; n *= 2) {
        auto rule = sobol_rule(dim, n);
        Estimate cur = apply_with_abs(*rule, f);
        used += rule->size();
        if (have_prev) {
            double err = std::abs(cur.value - prev.value);
            if (err <= tol * std::max(1.0, cur.abs_integral)) {
                res.value = cur.value;
                res.error = err;
                res.evaluations = used;
                return res;
            }
        }
        prev = cur;
        have_prev = true;
    }
    throw ConvergenceError("simplex quadrature did not reach tolerance within the evaluation budget");
}

void for_each_sobol_node(int dim, std::size_t n, const std::function<void(std::size_t, std::span<const double>)>& f)
{
    if (dim < 1 || n < 1) throw DomainError("invalid QMC simplex rule");
    sobol_points(dim, n, f);
}

} // namespace qrm

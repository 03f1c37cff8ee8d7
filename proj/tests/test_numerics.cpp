#include <doctest.h>

#include "qrm/errors.hpp"
#include "qrm/formal_series.hpp"
#include "qrm/rational.hpp"
#include "qrm/series.hpp"
#include "qrm/simplex.hpp"
#include "qrm/special.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qrm;
using Ring = MultiPoly::Ring;

TEST_CASE("rationals are canonical and round-trip through p/q")
{
    CHECK(make_rational(2, 4) == make_rational(1, 2));
    CHECK(to_string(make_rational(-6, 4)) == "-3/2");
    CHECK(to_string(make_rational(4, 2)) == "2");
    CHECK(parse_rational("10/-4") == make_rational(-5, 2));
    CHECK(factorial(20) == Rational("2432902008176640000"));
    CHECK_THROWS(make_rational(1, 0));
}

TEST_CASE("monomial simplex integrals")
{
    CHECK(monomial_simplex_integral(std::vector<int>{}) == 1);
    CHECK(monomial_simplex_integral(std::vector<int>{0, 0, 0}) == make_rational(1, 6));
    CHECK(monomial_simplex_integral(std::vector<int>{1, 1}) == make_rational(1, 8));
    // ∫_{a<b} b^2 = ∫ b^3 = 1/4
    CHECK(monomial_simplex_integral(std::vector<int>{0, 2}) == make_rational(1, 4));
}

TEST_CASE("simplex_integrate: volume, lambda = 0 and monomials")
{
    QuadratureSpec spec;
    auto one = [](std::span<const double>) { return std::complex<double>(1.0); };
    CHECK(std::abs(simplex_integrate(one, 3, spec, 1e-12).value - 1.0 / 6.0) < 1e-13);
    auto seven = [](std::span<const double>) { return std::complex<double>(7.0, -1.0); };
    CHECK(simplex_integrate(seven, 0, spec, 1e-12).value == std::complex<double>(7.0, -1.0));
    auto m12 = [](std::span<const double> mu) { return std::complex<double>(mu[0] * mu[1]); };
    CHECK(std::abs(simplex_integrate(m12, 2, spec, 1e-12).value - 0.125) < 1e-13);
}

TEST_CASE("property: quadrature matches exact monomial integrals up to dimension 6")
{
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> ex(0, 3);
    QuadratureSpec spec;
    for (int dim = 1; dim <= 6; ++dim) {
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<int> a(dim);
            for (int& e : a) e = ex(rng);
            const double exact = monomial_simplex_integral(a).get_d();
            auto f = [&](std::span<const double> mu) {
                double v = 1.0;
                for (int i = 0; i < dim; ++i) v *= std::pow(mu[i], a[i]);
                return std::complex<double>(v);
            };
            const double got = simplex_integrate(f, dim, spec, 1e-10).value.real();
            CHECK(std::abs(got - exact) <= 1e-10 * std::max(1.0, exact));
        }
    }
}

TEST_CASE("rules: weights sum to the simplex volume and nodes are ordered")
{
    for (auto rule : {gauss_legendre_rule(4, 8), sobol_rule(4, 1024)}) {
        double sum = 0.0;
        for (double w : rule->weights) sum += w;
        CHECK(sum == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
        for (std::size_t i = 0; i < rule->size(); ++i) {
            auto mu = rule->node(i);
            for (int j = 1; j < 4; ++j) REQUIRE(mu[j - 1] <= mu[j]);
            REQUIRE(mu[0] >= 0.0);
            REQUIRE(mu[3] <= 1.0);
        }
    }
    // Fixed sequence: two calls give the same points.
    auto a = sobol_rule(3, 256), b = sobol_rule(3, 256);
    CHECK(a->nodes == b->nodes);
}

TEST_CASE("series summation")
{
    auto expo = [](int k) { return std::complex<double>(1.0 / std::tgamma(k + 1.0)); };
    SeriesValue e = sum_lambda_series(expo, 1e-15, 40);
    CHECK(std::abs(e.value - std::numbers::e) < 1e-14);
    SeriesValue z = sum_lambda_series([](int) { return std::complex<double>(0.0); }, 1e-12, 40);
    CHECK(z.value == std::complex<double>(0.0));
    CHECK(z.terms_used <= 2);
    CHECK_THROWS_AS(sum_lambda_series([](int) { return std::complex<double>(1.0); }, 1e-12, 10), ConvergenceError);
}

TEST_CASE("reciprocal gamma")
{
    CHECK(std::abs(reciprocal_gamma(std::complex<double>(1.0)) - 1.0) < 1e-15);
    for (double z : {0.0, -1.0, -2.0}) CHECK(reciprocal_gamma(std::complex<double>(z)) == std::complex<double>(0.0));
    CHECK(reciprocal_gamma(0.5) == doctest::Approx(0.564189583548).epsilon(1e-12));
    CHECK(reciprocal_gamma(6.0) == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
}

TEST_CASE("property: reflection 1/Gamma(z) 1/Gamma(1-z) = sin(pi z)/pi")
{
    for (double re = -3.3; re <= 3.3; re += 0.55) {
        for (double im = -2.0; im <= 2.0; im += 0.8) {
            const std::complex<double> z(re, im);
            const auto lhs = reciprocal_gamma(z) * reciprocal_gamma(1.0 - z);
            const auto rhs = std::sin(std::numbers::pi * z) / std::numbers::pi;
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
        }
    }
}

namespace {

MultiPoly var(int i) { return MultiPoly::variable(i, 3, Ring::Full); }
MultiPoly num(long p, long q = 1) { return MultiPoly::constant(make_rational(p, q), 3, Ring::Full); }

FormalSeries random_series(std::mt19937& rng, int min_deg, int t_max)
{
    std::uniform_int_distribution<int> c(-3, 3);
    FormalSeries s(min_deg, t_max, 3, Ring::Full);
    for (int k = min_deg; k <= t_max; ++k)
        s.set_coeff(k, num(c(rng), 1 + (c(rng) + 3)) + var(((k % 3) + 3) % 3) * make_rational(c(rng)));
    return s;
}

bool same(const FormalSeries& a, const FormalSeries& b)
{
    const int top = std::min(a.t_max(), b.t_max());
    for (int k = std::min(a.min_degree(), b.min_degree()); k <= top; ++k)
        if (!(a.coeff(k) == b.coeff(k))) return false;
    return true;
}

} // namespace

TEST_CASE("series_exp examples")
{
    const int T = 6;
    FormalSeries zero = FormalSeries::zero(T, 3, Ring::Full);
    FormalSeries e0 = series_exp(zero);
    CHECK(e0.coeff(0) == num(1));
    for (int k = 1; k <= T; ++k) CHECK(e0.coeff(k).is_zero());

    FormalSeries ct(0, T, 3, Ring::Full);
    ct.set_coeff(1, var(1));
    FormalSeries e1 = series_exp(ct);
    for (int k = 0; k <= T; ++k) CHECK(e1.coeff(k) == var(1).pow(k) * (Rational(1) / factorial(k)));

    FormalSeries s(0, T, 3, Ring::Full);
    s.set_coeff(1, num(1));
    s.set_coeff(2, num(1));
    CHECK(series_exp(s).coeff(2) == num(3, 2));

    FormalSeries pole(-1, T, 3, Ring::Full);
    pole.set_coeff(-1, num(1));
    CHECK_THROWS(series_exp(pole));
}

TEST_CASE("property: formal series arithmetic is exact")
{
    std::mt19937 rng(11);
    const int T = 5;
    for (int rep = 0; rep < 4; ++rep) {
        FormalSeries a = random_series(rng, -1, T), b = random_series(rng, 0, T), c = random_series(rng, 1, T);
        CHECK(same((a * b) * c, a * (b * c)));
        CHECK(same(a * (b + c), a * b + a * c));
        FormalSeries p = random_series(rng, 1, T), q = random_series(rng, 1, T);
        CHECK(same(series_exp(p + q), series_exp(p) * series_exp(q)));
        FormalSeries u = random_series(rng, 0, T);
        u.set_coeff(0, num(2));
        CHECK(same(b.divided_by_unit(u) * u, b));
    }
}

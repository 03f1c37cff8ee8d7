#include <doctest.h>

#include "qrm/errors.hpp"
#include "qrm/gfunction.hpp"
#include "qrm/oracle.hpp"
#include "qrm/rational.hpp"
#include "qrm/special.hpp"

#include <cmath>
#include <functional>
#include <optional>

using namespace qrm;

namespace {

double nearest(const Spectrum& s, double v)
{
    double best = INFINITY;
    for (std::size_t j = 0; j < s.trusted(); ++j) best = std::min(best, std::abs(s.values[j] - v));
    return best;
}

// First sign change of f on a grid over [a, b], refined by bisection.
std::optional<double> first_root(const std::function<double(double)>& f, double a, double b, double step)
{
    double fa = f(a);
    for (double x = a + step; x <= b; x += step) {
        const double fx = f(x);
        if ((fa < 0.0) != (fx < 0.0)) {
            double lo = x - step, hi = x;
            for (int i = 0; i < 80; ++i) {
                const double m = 0.5 * (lo + hi);
                if ((f(m) < 0.0) == (fa < 0.0)) lo = m; else hi = m;
            }
            return 0.5 * (lo + hi);
        }
        fa = fx;
    }
    return std::nullopt;
}

} // namespace

TEST_CASE("K_n coefficients")
{
    const ModelParams p(0.7, 0.4);
    const double x = 0.37;
    const GCoeffs c = coeff_K(x, 30, p);
    CHECK(c.K[0] == 1.0);
    CHECK(c.K[1] == doctest::Approx(2 * 0.7 + (-x + 0.16 / x) / 1.4).epsilon(1e-15));
    for (int n = 2; n <= 30; ++n) CHECK(n * c.K[n] == doctest::Approx(f_coeff(n - 1, x, p) * c.K[n - 1] - c.K[n - 2]));

    // Delta = 0, g = 1/2, x = 3/10 unrolled in exact arithmetic.
    const Rational xr = make_rational(3, 10), g = make_rational(1, 2);
    std::vector<Rational> K{Rational(1)};
    auto f = [&](int n) -> Rational { return 2 * g + (Rational(n) - xr) / (2 * g); };
    K.push_back(f(0));
    for (int n = 2; n <= 25; ++n) K.push_back((f(n - 1) * K[n - 1] - K[n - 2]) / Rational(n));
    const GCoeffs d = coeff_K(0.3, 25, ModelParams(0.5, 0.0));
    for (int n = 0; n <= 25; ++n) CHECK(std::abs(d.K[n] - K[n].get_d()) <= 1e-12 * std::max(1.0, std::abs(K[n].get_d())));

    CHECK_THROWS_AS(coeff_K(2.0, 5, p), DomainError);
    CHECK_NOTHROW(coeff_K(7.0, 5, p));
    CHECK_THROWS_AS(coeff_K(0.5, 5, ModelParams(0.0, 0.4)), DomainError);
}

TEST_CASE("G-function basics")
{
    const ModelParams p(0.7, 0.4);
    CHECK_THROWS_AS(g_function(3.0, Parity::Plus, p), DomainError);
    CHECK(g_function_value(3.0005, Parity::Plus, p).ill_conditioned);
    CHECK_FALSE(g_function_value(3.3, Parity::Plus, p).ill_conditioned);
    CHECK_THROWS_AS(g_function(0.5, Parity::Plus, ModelParams(0.0, 0.4)), DomainError);
}

TEST_CASE("property: parity flip G_-(x; g, Delta) = G_+(x; g, -Delta)")
{
    for (double g : {0.3, 0.7, 1.1})
        for (double d : {0.2, 0.4, 0.9})
            for (double x = -0.43; x < 9.0; x += 0.61) {
                const double a = g_function(x, Parity::Minus, g, d), b = g_function(x, Parity::Plus, g, -d);
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
            }
}

TEST_CASE("property: doubling nmax does not change G")
{
    const ModelParams p(0.7, 0.4);
    GOptions a, b;
    b.nmax = 2 * a.nmax;
    for (double x : {-0.3, 0.63, 4.4, 11.7, 25.2}) {
        const double u = g_function(x, Parity::Plus, p, a), v = g_function(x, Parity::Plus, p, b);
        CHECK(std::abs(u - v) <= a.tol * std::max(1.0, std::abs(u)));
    }
}

TEST_CASE("lowest zero of G_+ is the lowest parity-plus eigenvalue")
{
    const ModelParams p(0.7, 0.4);
    const auto root = first_root([&](double x) { return g_function(x, Parity::Plus, p); }, 0.001, 0.99, 0.01);
    REQUIRE(root);
    const Spectrum s = spectrum(parity_matrix(400, Parity::Plus, p));
    CHECK(std::abs(*root - (s.values[0] + 0.49)) < 1e-6);
}

TEST_CASE("residues at the poles")
{
    for (auto [g, d] : {std::pair{0.7, 0.4}, std::pair{1.0, 0.5}}) {
        const ModelParams p(g, d);
        for (int N : {0, 1, 3}) {
            for (Parity par : {Parity::Plus, Parity::Minus}) {
                // Symmetric difference leaves O(e^2); Richardson removes it.
                auto sym = [&](double e) { return 0.5 * e * (g_function(N + e, par, p) - g_function(N - e, par, p)); };
                const double lim = (4.0 * sym(1e-4) - sym(2e-4)) / 3.0;
                CHECK(std::abs(lim - residue_at(N, par, p)) < 1e-7 * std::max(1.0, std::abs(lim)));
            }
        }
    }
    CHECK(residue_at(2, Parity::Plus, ModelParams(0.7, 0.0)) == 0.0);
}

TEST_CASE("constraint polynomials and exceptional G-functions")
{
    const ModelParams p(0.7, 0.4);
    CHECK(constraint_K(0, p) == 1.0);
    CHECK(constraint_K(1, p) == doctest::Approx((4 * 0.49 - 1 + 0.16) / 1.4).epsilon(1e-14));
    for (int N : {0, 2}) {
        const double small = 1e-7;
        const double v = g_exceptional(N, Parity::Plus, 0.7, small);
        CHECK(v / (-2.0 * (N + 1) / small) == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK_THROWS_AS(g_exceptional(1, Parity::Plus, ModelParams(0.7, 0.0)), DomainError);
    CHECK(std::abs(g_exceptional(2, Parity::Minus, 0.7, 0.4) - g_exceptional(2, Parity::Plus, 0.7, -0.4)) < 1e-13);
}

TEST_CASE("Juddian points are doubly degenerate")
{
    SUBCASE("N = 1 on 4g^2 - 1 + Delta^2 = 0")
    {
        const ModelParams p(0.3, 0.8);
        CHECK(std::abs(constraint_K(1, p)) < 1e-15);
        for (Parity par : {Parity::Plus, Parity::Minus}) {
            CHECK(std::abs(residue_at(1, par, p)) < 1e-10);
            CHECK(nearest(spectrum(parity_matrix(400, par, p)), 0.91) < 1e-6);
        }
    }
    SUBCASE("N = 2, Delta from a bisection of K_2(2)")
    {
        const double g = 0.2;
        const auto d = first_root([&](double delta) { return constraint_K(2, ModelParams(g, delta)); }, 0.01, 3.0, 0.01);
        REQUIRE(d);
        const ModelParams p(g, *d);
        for (Parity par : {Parity::Plus, Parity::Minus})
            CHECK(nearest(spectrum(parity_matrix(400, par, p)), 2.0 - g * g) < 1e-6);
    }
}

TEST_CASE("non-Juddian exceptional points are non-degenerate")
{
    const double g = 0.5;
    int found = 0;
    for (int N : {0, 1}) {
        for (Parity par : {Parity::Plus, Parity::Minus}) {
            const auto d = first_root([&](double delta) { return g_exceptional(N, par, g, delta); }, 0.05, 4.0, 0.01);
            if (!d) continue;
            ++found;
            const ModelParams p(g, *d);
            const Parity other = par == Parity::Plus ? Parity::Minus : Parity::Plus;
            CHECK(nearest(spectrum(parity_matrix(400, par, p)), N - g * g) < 1e-6);
            CHECK(nearest(spectrum(parity_matrix(400, other, p)), N - g * g) > 1e-3);
        }
    }
    CHECK(found >= 1);
}

TEST_CASE("complete G-function near and at the integers")
{
    const ModelParams p(0.7, 0.4);
    for (int N : {0, 1, 4}) {
        for (Parity par : {Parity::Plus, Parity::Minus}) {
            // Near-integer form against the direct product at the handover scale.
            for (double e : {-1e-2, 1e-2}) {
                const double a = complete_g(N + e, par, p), b = complete_g_near(N + e, N, par, p);
                CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
            }
            // Value at N against the limit of G(x)/Gamma(-x) from both sides.
            const double e = 1e-5;
            const double lim = 0.5 * (g_function(N + e, par, p) * reciprocal_gamma(-(N + e)) +
                                      g_function(N - e, par, p) * reciprocal_gamma(-(N - e)));
            const double at = complete_g(N, par, p);
            CHECK(std::isfinite(at));
            CHECK(std::abs(at - lim) < 1e-8 * std::max(1.0, std::abs(at)));
        }
    }
}

TEST_CASE("eigenvalues from the zeros of the complete G-functions")
{
    const ModelParams p(0.7, 0.4);
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        EigenSearch s;
        s.x_lo = -0.5;
        s.x_hi = 12.0;
        const auto roots = find_eigenvalues(par, p, s);
        const Spectrum spec = spectrum(parity_matrix(400, par, p));
        REQUIRE(roots.size() >= 10);
        for (std::size_t j = 0; j < 10; ++j) {
            CHECK(std::abs(roots[j].lambda - spec.values[j]) < 1e-6);
            CHECK(roots[j].classification == EigenClass::Regular);
            CHECK(roots[j].parity == par);
        }
    }
    const ModelParams j(0.3, 0.8);
    EigenSearch s;
    s.x_lo = 0.5;
    s.x_hi = 1.5;
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        const auto roots = find_eigenvalues(par, j, s);
        bool seen = false;
        for (const auto& r : roots)
            if (std::abs(r.lambda - 0.91) < 1e-9 && r.classification == EigenClass::Juddian) seen = true;
        CHECK(seen);
    }
    CHECK(find_eigenvalues(Parity::Plus, p, EigenSearch{5.0, 5.0}).empty());
}

TEST_CASE("counting zeros grows like T")
{
    const ModelParams p(0.7, 0.4);
    const double T = 60.0;
    EigenSearch s;
    s.x_lo = -0.5;
    s.x_hi = T + 0.49;
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        const double n = static_cast<double>(find_eigenvalues(par, p, s).size());
        CHECK(n / T >= 0.9);
        CHECK(n / T <= 1.1);
    }
}

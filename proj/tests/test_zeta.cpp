#include <doctest.h>

#include "qrm/errors.hpp"
#include "qrm/rabi_bernoulli.hpp"
#include "qrm/zeta.hpp"

#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <numbers>

using namespace qrm;

namespace {

double rel(cplx a, double b) { return std::abs(a - b) / std::abs(b); }

// Hurwitz zeta for any real s != 1 by Euler-Maclaurin with N = 30, eight corrections.
double hurwitz(double s, double a)
{
    static const double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6, -3617.0 / 510};
    const int N = 30;
    double sum = 0.0;
    for (int n = 0; n < N; ++n) sum += std::pow(n + a, -s);
    const double x = N + a;
    sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    double rising = s, fact = 2.0;   // s (s+1) ... (s+2k-2) and (2k)!
    for (int k = 1; k <= 8; ++k) {
        sum += b2k[k - 1] / fact * rising * std::pow(x, -s - 2 * k + 1);
        rising *= (s + 2 * k - 1) * (s + 2 * k);
        fact *= (2 * k + 1) * (2 * k + 2);
    }
    return sum;
}

} // namespace

TEST_CASE("Euler-Maclaurin oracle agrees with GSL")
{
    CHECK(hurwitz(2.5, 0.81) == doctest::Approx(gsl_sf_hzeta(2.5, 0.81)).epsilon(1e-13));
}

TEST_CASE("Mellin representation on decoupled and degenerate spectra")
{
    // Delta = 0: doubly degenerate n - g^2.
    const ModelParams d0(0.7, 0.0);
    for (double s : {1.5, 2.5, 4.0}) {
        const double tau = 1.3;
        CHECK(rel(zeta_mellin(s, tau, d0), 2.0 * gsl_sf_hzeta(s, tau - 0.49)) < 1e-10);
    }
    // g = 0: n - Delta and n + Delta.
    CHECK(rel(zeta_mellin(2.0, 2.0, ModelParams(0.0, 0.5)), gsl_sf_hzeta(2.0, 2.5) + gsl_sf_hzeta(2.0, 1.5)) < 1e-10);
    // Parity blocks at g = 0: H_+ has n + Delta (-1)^n.
    double plus = 0.0;
    for (int n = 0; n < 200000; ++n) plus += std::pow(n + 0.5 * (n % 2 == 0 ? 1 : -1) + 2.0, -3.0);
    CHECK(rel(zeta_mellin(3.0, 2.0, ModelParams(0.0, 0.5), 1e-10, Sector::Plus), plus) < 1e-9);
}

TEST_CASE("contour representation with closed-form Omega")
{
    const ModelParams d0(0.7, 0.0);
    const double tau = 1.3;
    SpectralZeta z(d0, Sector::Full);
    // zeta(1 - k) = -(2/k) RB_k and the Hurwitz values elsewhere.
    for (int k = 1; k <= 4; ++k)
        CHECK(rel(z.contour(1.0 - k, tau).value, -2.0 / k * rb_polynomial(k).evaluate(tau, 0.7, 0.0)) < 1e-10);
    CHECK(rel(z.contour(0.5, tau).value, 2.0 * hurwitz(0.5, tau - 0.49)) < 1e-10);
    CHECK(rel(z.contour(-1.5, tau).value, 2.0 * hurwitz(-1.5, tau - 0.49)) < 1e-9);
    const double e = 1e-4;
    CHECK(std::abs(e * z.contour(1.0 + e, tau).value - 2.0) < 1e-3);
    // Integers >= 2 go through the Mellin form.
    CHECK(rel(zeta_contour(2.0, tau, d0), 2.0 * gsl_sf_hzeta(2.0, tau - 0.49)) < 1e-10);
}

TEST_CASE("Lerch: determinant of the free oscillator pair")
{
    for (double tau : {0.3, 1.7, 3.2}) {
        const Determinant d = spectral_determinant(tau, Sector::Full, ModelParams(0.0, 0.0));
        const double want = 2.0 * std::numbers::pi / std::pow(std::tgamma(tau), 2);
        CHECK(rel(d.value, want) < 1e-8);
        CHECK(d.fd_discrepancy < 1e-6);
    }
}

TEST_CASE("general coupling: special value, derivative relation and cross-method")
{
    const ModelParams p(0.7, 0.4);
    const double tau = 2.5;
    SpectralZeta full(p, Sector::Full), plus(p, Sector::Plus);
    CHECK(rel(full.contour(0.0, tau).value, -2.0 * (tau - 0.5 - 0.49)) < 1e-8);
    CHECK(rel(plus.contour(0.0, tau).value, -rb_polynomial(1, Sector::Plus).evaluate(tau, 0.7, 0.4)) < 1e-8);

    // d/dtau zeta(s; tau) = -s zeta(s + 1; tau) at s = 2.5.
    const double h = 1e-3, s = 2.5;
    const cplx fd = (full.contour(s, tau + h).value - full.contour(s, tau - h).value) / (2.0 * h);
    const cplx rhs = -s * full.mellin(s + 1.0, tau).value;
    CHECK(std::abs(fd - rhs) < 1e-6 * std::abs(rhs));
    CHECK(std::abs(full.contour(s, tau).value - full.mellin(s, tau).value) < 1e-8);

    const Determinant d = spectral_determinant(tau, Sector::Plus, p);
    CHECK(d.fd_discrepancy < 1e-6);
    CHECK(d.value.real() > 0.0);
}

TEST_CASE("domains")
{
    const ModelParams p(0.7, 0.4);
    CHECK_THROWS_AS(zeta_mellin(2.0, 0.8, p), DomainError);
    CHECK_THROWS_AS(zeta_mellin(0.5, 2.5, p), DomainError);
    HankelContour c;
    c.r = 3.5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK_THROWS_AS(spectral_determinant(0.5, Sector::Plus, p), ConvergenceError);
}

#include <doctest.h>

#include "qrm/errors.hpp"
#include "qrm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace qrm;

TEST_CASE("oscillator eigenfunctions are orthonormal")
{
    const double L = 12.0, h = 0.01;
    const int count = 6;
    std::vector<double> gram(count * count, 0.0), row(count);
    for (double x = -L; x <= L; x += h) {
        hermite_states(count, x, row.data());
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j) gram[i * count + j] += h * row[i] * row[j];
    }
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < count; ++j) CHECK(std::abs(gram[i * count + j] - (i == j ? 1.0 : 0.0)) < 1e-12);
    CHECK(hermite_state(0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(std::isfinite(hermite_state(2000, 3.0)));
}

TEST_CASE("trivial spectra")
{
    const Spectrum s0 = spectrum(full_matrix(50, ModelParams(0.0, 0.3)));
    for (std::size_t j = 0; j < s0.trusted(); ++j) {
        const double n = std::floor(j / 2.0);
        const double want = j % 2 == 0 ? n - 0.3 : n + 0.3;   // n - D, n + D, n + 1 - D, ...
        CHECK(std::abs(s0.values[j] - want) < 1e-12);
    }
    const Spectrum d0 = spectrum(parity_matrix(60, Parity::Plus, ModelParams(0.7, 0.0)));
    for (std::size_t j = 0; j < d0.trusted(); ++j) CHECK(std::abs(d0.values[j] - (j - 0.49)) < 1e-10);
}

TEST_CASE("property: union of the parity spectra is the full spectrum")
{
    const ModelParams p(0.7, 0.4);
    const int M = 200;
    const Spectrum full = spectrum(full_matrix(M, p));
    const Spectrum plus = spectrum(parity_matrix(M, Parity::Plus, p));
    const Spectrum minus = spectrum(parity_matrix(M, Parity::Minus, p));
    std::vector<double> u;
    for (std::size_t j = 0; j < plus.trusted(); ++j) u.push_back(plus.values[j]);
    for (std::size_t j = 0; j < minus.trusted(); ++j) u.push_back(minus.values[j]);
    std::sort(u.begin(), u.end());
    const std::size_t n = u.size() / 2;   // compare well inside both trusted ranges
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(u[j] - full.values[j]) < 1e-10);
}

TEST_CASE("property: low eigenvalues are stable under doubling M")
{
    const ModelParams p(0.7, 0.4);
    const int M = 200;
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        const Spectrum a = spectrum(parity_matrix(M, par, p)), b = spectrum(parity_matrix(2 * M, par, p));
        for (int j = 0; j < M / 4; ++j) CHECK(std::abs(a.values[j] - b.values[j]) < 1e-10);
    }
}

TEST_CASE("property: oracle heat kernel is symmetric")
{
    const SpectralOracle o(full_matrix(200, ModelParams(0.7, 0.4)));
    for (auto [x, y] : {std::pair{0.3, -1.2}, std::pair{1.5, 0.2}}) {
        const auto a = o.heat_kernel(x, y, 0.6), b = o.heat_kernel(y, x, 0.6);
        CHECK(std::abs(a[1] - b[2]) < 1e-10);
        CHECK(std::abs(a[0] - b[0]) < 1e-10);
        CHECK(std::abs(a[3] - b[3]) < 1e-10);
    }
}

TEST_CASE("counting function")
{
    const Spectrum s = spectrum(parity_matrix(100, Parity::Plus, ModelParams(0.0, 0.0)));
    CHECK(counting(10.5, s) == 11);
    CHECK_THROWS_AS(counting(1000.0, s), DomainError);
    CHECK_THROWS_AS(parity_matrix(0, Parity::Plus, ModelParams(0.7, 0.4)), DomainError);
}

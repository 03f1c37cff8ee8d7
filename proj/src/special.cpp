#include "qrm/special.hpp"

#include "qrm/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qrm {

namespace {

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_p = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// sin(pi z) with the argument reduced around the nearest integer, so that
// zeros at integers come out exactly and nearby values keep full accuracy.
std::complex<double> sin_pi(std::complex<double> z)
{
    double n = std::round(z.real());
    std::complex<double> r(z.real() - n, z.imag());
    std::complex<double> s = std::sin(std::numbers::pi * r);
    return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

} // namespace

std::complex<double> log_gamma(std::complex<double> z)
{
    if (z.real() < 0.5) throw DomainError("log_gamma: Lanczos form needs Re z >= 1/2");
    z -= 1.0;
    std::complex<double> a = lanczos_p[0];
    for (int i = 1; i < 9; ++i) a += lanczos_p[i] / (z + static_cast<double>(i));
    std::complex<double> t = z + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

std::complex<double> reciprocal_gamma(std::complex<double> z)
{
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real())) return 0.0;
    if (z.real() < 0.5) {
        // 1/Gamma(z) = Gamma(1-z) sin(pi z) / pi
        return std::exp(log_gamma(1.0 - z)) * sin_pi(z) / std::numbers::pi;
    }
    return std::exp(-log_gamma(z));
}

double reciprocal_gamma(double x)
{
    return reciprocal_gamma(std::complex<double>(x, 0.0)).real();
}

} // namespace qrm

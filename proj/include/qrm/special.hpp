#pragma once

#include <complex>

namespace qrm {

// 1/Gamma(z), entire.  Lanczos approximation (g = 7) on Re z >= 1/2 and the
// reflection formula elsewhere; exact zeros at z = 0, -1, -2, ...
std::complex<double> reciprocal_gamma(std::complex<double> z);
double reciprocal_gamma(double x);

// log Gamma(z) on Re z >= 1/2 (principal branch of the Lanczos form).
std::complex<double> log_gamma(std::complex<double> z);

constexpr double euler_gamma = 0.57721566490153286060651209008240243;

} // namespace qrm

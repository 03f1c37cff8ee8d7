#pragma once

#include "qrm/params.hpp"

#include <complex>
#include <span>

namespace qrm {

using cplx = std::complex<double>;

// Reference evaluations of the exponent building blocks, written directly
// from their defining sums (O(lambda^2) for xi).  The fast evaluators below
// are tested against these.
cplx theta(int lambda, const OrderedTuple& mu, double x, double y, const TimePoint& t, const ModelParams& p);
cplx xi(int lambda, const OrderedTuple& mu, const TimePoint& t, const ModelParams& p);
// sign = -1 uses sinh, +1 uses cosh.
cplx psi(int lambda, const OrderedTuple& mu, const TimePoint& t, int sign, const ModelParams& p);

// Real-time (circular) forms; t real, not in pi Z.
cplx theta_bar(int lambda, const OrderedTuple& mu, double x, double y, double t, const ModelParams& p);
cplx xi_bar(int lambda, const OrderedTuple& mu, double t, const ModelParams& p);

// K0 (rotated = false) or U0 (rotated = true, t must be real).
// The square root of sinh t follows the branch that is holomorphic on the
// heat domain, so U0(t) = K0(i t) for every real t off pi Z.
cplx mehler_prefactor(double x, double y, const TimePoint& t, const ModelParams& p, bool rotated);

// sqrt(sinh t), continued holomorphically from t > 0 across the heat domain.
cplx sqrt_sinh(cplx t);

// The even-lambda leading exponent  -2g^2 coth(t/2) + 4g^2 cosh(t(1-m))/sinh t
// in a form free of the 1/t cancellation.
template <class T>
T leading_even_exponent(T t, double m, double g);

// Everything one quadrature node needs.  For the heat kernel the integrand
// is exp(P) M(theta) with theta = theta_x * x + theta_y * y.
template <class T>
struct NodeExponents {
    T P{};        // leading exponent + xi (kernel series)
    T theta_x{};
    T theta_y{};
    T xi{};
    T psi_minus{};
    T psi_plus{};
};

// Precomputed t-dependent constants for the hyperbolic forms.
// T = double for real t, std::complex<double> otherwise.
template <class T>
class HyperbolicExponents {
public:
    HyperbolicExponents(T t, const ModelParams& p);

    // mu holds mu_1..mu_lambda.  want_psi enables the psi sums.
    void eval(std::span<const double> mu, NodeExponents<T>& out, bool want_psi = false) const;

    T t() const { return t_; }
    T sinh_t() const { return sinh_t_; }
    T tanh_half() const { return tanh_half_; }

private:
    T t_, et_, emt_, eh_, emh_, sinh_t_, cosh_t_, coth_half_, tanh_half_;
    double g_;
};

// Circular (real-time) forms.  Every exponent is purely imaginary, so only
// the imaginary parts are stored: P = i*P_im, theta = i*(x*theta_x + y*theta_y).
struct CircularNode {
    double P_im = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
    double xi_im = 0.0;
};

class CircularExponents {
public:
    CircularExponents(double t, const ModelParams& p);
    void eval(std::span<const double> mu, CircularNode& out) const;

private:
    double t_, sin_t_, cos_t_, tan_half_, cot_half_, g_;
};

} // namespace qrm

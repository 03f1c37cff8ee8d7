#include "qrm/exponents.hpp"

#include "qrm/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qrm {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::numbers::sqrt2;

double nearest_pi_multiple_distance(double v)
{
    return std::abs(v - pi * std::round(v / pi));
}

} // namespace

ModelParams::ModelParams(double g_, double delta_) : g(g_), delta(delta_)
{
    validate();
}

void ModelParams::validate() const
{
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("coupling g must be finite and >= 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("splitting Delta must be finite and >= 0");
}

bool in_heat_domain(std::complex<double> t)
{
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) return false;
    if (t.real() > 0.0) return true;
    double scale = std::max(1.0, std::abs(t.imag()));
    return nearest_pi_multiple_distance(t.imag()) > 1e-14 * scale;
}

bool in_omega_domain(std::complex<double> w)
{
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    return w.real() > 0.0 || std::abs(w) < pi;
}

void TimePoint::check(double guard) const
{
    switch (domain) {
    case Domain::Heat:
        if (!in_heat_domain(t)) throw DomainError("t lies on a cut of the heat-kernel domain");
        break;
    case Domain::Omega:
        if (!in_omega_domain(t)) throw DomainError("w outside the half-plane Re w > 0 and the disc |w| < pi");
        break;
    case Domain::Propagator:
        if (t.imag() != 0.0 || !std::isfinite(t.real())) throw DomainError("propagator time must be real");
        if (nearest_pi_multiple_distance(t.real()) < guard)
            throw DomainError("propagator time within " + std::to_string(guard) + " of a multiple of pi");
        break;
    }
}

OrderedTuple::OrderedTuple(std::vector<double> m) : mu(std::move(m))
{
    double prev = 0.0;
    for (double v : mu) {
        if (!(v >= prev) || v > 1.0) throw DomainError("tuple is not ordered in [0,1]");
        prev = v;
    }
}

// ---------------------------------------------------------------------------
// Reference formulas

cplx theta(int lambda, const OrderedTuple& mu, double x, double y, const TimePoint& tp, const ModelParams& p)
{
    tp.check();
    if (mu.lambda() != lambda) throw DomainError("tuple length differs from lambda");
    const cplx t = tp.t;
    const double g = p.g;
    const double sgn = (lambda % 2 == 0) ? 1.0 : -1.0;
    cplx sum = 0.0;
    for (int gam = 0; gam <= lambda; ++gam) {
        double s = (gam % 2 == 0) ? 1.0 : -1.0;
        sum += s * (x * std::cosh(t * (1.0 - mu[gam])) - y * std::cosh(t * mu[gam]));
    }
    cplx val = 2.0 * sqrt2 * g * sgn / std::sinh(t) * sum - sqrt2 * g * (x - y) / std::tanh(t / 2.0);
    if (lambda % 2 == 1) val += 2.0 * sqrt2 * g / std::sinh(t) * (x * std::cosh(t) - y);
    return val;
}

cplx xi(int lambda, const OrderedTuple& mu, const TimePoint& tp, const ModelParams& p)
{
    tp.check();
    if (mu.lambda() != lambda) throw DomainError("tuple length differs from lambda");
    const cplx t = tp.t;
    const double g2 = p.g * p.g;
    const double sgn = (lambda % 2 == 0) ? 1.0 : -1.0;
    cplx alt = 0.0;
    for (int gam = 0; gam <= lambda; ++gam) alt += ((gam % 2 == 0) ? 1.0 : -1.0) * std::cosh(t * mu[gam]);
    cplx sh = std::sinh(0.5 * t * (1.0 - mu[lambda]));
    cplx val = -8.0 * g2 / std::sinh(t) * sh * sh * sgn * alt;
    cplx dbl = 0.0;
    for (int b = 1; b <= lambda - 1; ++b)
        for (int a = b - 1; a >= 0; a -= 2)
            dbl += (std::cosh(t * (mu[b + 1] - 1.0)) - std::cosh(t * (mu[b] - 1.0)))
                   * (std::cosh(t * mu[a]) - std::cosh(t * mu[a + 1]));
    val -= 4.0 * g2 / std::sinh(t) * dbl;
    return val;
}

cplx psi(int lambda, const OrderedTuple& mu, const TimePoint& tp, int sign, const ModelParams& p)
{
    tp.check();
    if (mu.lambda() != lambda) throw DomainError("tuple length differs from lambda");
    if (sign != 1 && sign != -1) throw DomainError("psi sign must be +1 or -1");
    const cplx t = tp.t;
    cplx sum = 0.0;
    for (int gam = 0; gam <= lambda; ++gam) {
        cplx arg = t * (0.5 - mu[gam]);
        sum += ((gam % 2 == 0) ? 1.0 : -1.0) * (sign < 0 ? std::sinh(arg) : std::cosh(arg));
    }
    return 4.0 * p.g * p.g / std::sinh(t) * sum * sum;
}

cplx theta_bar(int lambda, const OrderedTuple& mu, double x, double y, double t, const ModelParams& p)
{
    TimePoint::propagator(t).check(0.0);
    if (std::sin(t) == 0.0) throw DomainError("t on the singular set pi Z");
    if (mu.lambda() != lambda) throw DomainError("tuple length differs from lambda");
    const double g = p.g;
    const double sgn = (lambda % 2 == 0) ? 1.0 : -1.0;
    const cplx I(0.0, 1.0);
    double sum = 0.0;
    for (int gam = 0; gam <= lambda; ++gam) {
        double s = (gam % 2 == 0) ? 1.0 : -1.0;
        sum += s * (x * std::cos(t * (1.0 - mu[gam])) - y * std::cos(t * mu[gam]));
    }
    cplx val = 2.0 * sqrt2 * g * sgn / (I * std::sin(t)) * sum + I * sqrt2 * g * (x - y) / std::tan(t / 2.0);
    if (lambda % 2 == 1) val += 2.0 * sqrt2 * g / (I * std::sin(t)) * (x * std::cos(t) - y);
    return val;
}

cplx xi_bar(int lambda, const OrderedTuple& mu, double t, const ModelParams& p)
{
    TimePoint::propagator(t).check(0.0);
    if (std::sin(t) == 0.0) throw DomainError("t on the singular set pi Z");
    if (mu.lambda() != lambda) throw DomainError("tuple length differs from lambda");
    const double g2 = p.g * p.g;
    const double sgn = (lambda % 2 == 0) ? 1.0 : -1.0;
    const cplx I(0.0, 1.0);
    double alt = 0.0;
    for (int gam = 0; gam <= lambda; ++gam) alt += ((gam % 2 == 0) ? 1.0 : -1.0) * std::cos(t * mu[gam]);
    double sn = std::sin(0.5 * t * (1.0 - mu[lambda]));
    cplx val = 8.0 * g2 / (I * std::sin(t)) * sn * sn * sgn * alt;
    double dbl = 0.0;
    for (int b = 1; b <= lambda - 1; ++b)
        for (int a = b - 1; a >= 0; a -= 2)
            dbl += (std::cos(t * (mu[b + 1] - 1.0)) - std::cos(t * (mu[b] - 1.0)))
                   * (std::cos(t * mu[a]) - std::cos(t * mu[a + 1]));
    val -= 4.0 * g2 / (I * std::sin(t)) * dbl;
    return val;
}

cplx sqrt_sinh(cplx t)
{
    // sinh t = e^t (1 - e^{-2t}) / 2; the principal root of the second factor
    // only meets its cut on the excluded rays Re t <= 0, Im t in pi Z.
    return std::exp(0.5 * t) * std::sqrt(0.5 * (1.0 - std::exp(-2.0 * t)));
}

cplx mehler_prefactor(double x, double y, const TimePoint& tp, const ModelParams& p, bool rotated)
{
    tp.check();
    const double g2 = p.g * p.g;
    cplx t = tp.t;
    if (rotated) {
        if (tp.domain != TimePoint::Domain::Propagator) throw DomainError("rotated prefactor needs a real propagator time");
        const double tr = tp.t.real();
        const cplx I(0.0, 1.0);
        const double s = std::sin(tr), c = std::cos(tr);
        cplx root = sqrt_sinh(I * tr);   // sqrt(i sin t) on the continued branch
        return std::exp(I * tr * (g2 + 0.5)) / (std::sqrt(2.0 * pi) * root)
               * std::exp(-((x * x + y * y) * c - 2.0 * x * y) / (2.0 * I * s));
    }
    return std::exp(t * (g2 + 0.5)) / (std::sqrt(2.0 * pi) * sqrt_sinh(t))
           * std::exp(-((x * x + y * y) * std::cosh(t) - 2.0 * x * y) / (2.0 * std::sinh(t)));
}

// ---------------------------------------------------------------------------
// Fast node evaluators

template <class T>
T leading_even_exponent(T t, double m, double g)
{
    // -2g^2 coth(t/2) + 4g^2 cosh(t(1-m))/sinh t
    //   = 4g^2 [sinh^2(t(1-m)/2) - sinh(t(1-m/2)) sinh(t m/2)] / sinh t
    using std::sinh;
    T a = sinh(0.5 * t * (1.0 - m));
    return 4.0 * g * g * (a * a - sinh(t * (1.0 - 0.5 * m)) * sinh(0.5 * t * m)) / sinh(t);
}

template double leading_even_exponent<double>(double, double, double);
template cplx leading_even_exponent<cplx>(cplx, double, double);

template <class T>
HyperbolicExponents<T>::HyperbolicExponents(T t, const ModelParams& p) : t_(t), g_(p.g)
{
    using std::exp;
    using std::sinh;
    using std::cosh;
    using std::tanh;
    et_ = exp(t);
    emt_ = exp(-t);
    eh_ = exp(0.5 * t);
    emh_ = exp(-0.5 * t);
    sinh_t_ = sinh(t);
    cosh_t_ = cosh(t);
    tanh_half_ = tanh(0.5 * t);
    coth_half_ = 1.0 / tanh_half_;
}

template <class T>
void HyperbolicExponents<T>::eval(std::span<const double> mu, NodeExponents<T>& out, bool want_psi) const
{
    using std::exp;
    using std::sinh;
    const int n = static_cast<int>(mu.size());
    const double g = g_;
    const double g2 = g * g;
    const bool odd = (n % 2) == 1;
    const double sgn = odd ? -1.0 : 1.0;

    // gamma = 0: mu_0 = 0
    T c_prev = 1.0;                            // cosh(t mu_gamma)
    T d_prev = 0.5 * (et_ + emt_);             // cosh(t(1 - mu_gamma))
    T S_c = c_prev, S_d = d_prev;
    T S_sh = 0.5 * (eh_ - emh_);               // sinh(t(1/2 - mu_gamma))
    T S_ch = 0.5 * (eh_ + emh_);
    // Double sum over alpha < beta <= n-1 with beta - alpha odd, using
    // A_beta = d_{beta+1} - d_beta and B_alpha = c_alpha - c_{alpha+1}.
    T B_even = 0.0, B_odd = 0.0, D = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double m = mu[k - 1];
        T ep = exp(t_ * m);
        T em = 1.0 / ep;
        T c = 0.5 * (ep + em);
        T d = 0.5 * (et_ * em + emt_ * ep);
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        S_c += s * c;
        S_d += s * d;
        if (want_psi) {
            S_sh += s * 0.5 * (eh_ * em - emh_ * ep);
            S_ch += s * 0.5 * (eh_ * em + emh_ * ep);
        }
        // beta = k - 1 now has both endpoints known.
        const int beta = k - 1;
        T A = d - d_prev;
        D += A * ((beta % 2 == 1) ? B_even : B_odd);
        T B = c_prev - c;
        if (beta % 2 == 0) B_even += B; else B_odd += B;
        c_prev = c;
        d_prev = d;
    }
    const double m_last = n == 0 ? 0.0 : mu[n - 1];
    T sh = sinh(0.5 * t_ * (1.0 - m_last));
    out.xi = (-8.0 * g2 * sh * sh * sgn * S_c - 4.0 * g2 * D) / sinh_t_;
    const double r2g = 2.0 * std::numbers::sqrt2 * g;
    out.theta_x = r2g / sinh_t_ * (sgn * S_d + (odd ? cosh_t_ : T(0.0))) - std::numbers::sqrt2 * g * coth_half_;
    out.theta_y = r2g / sinh_t_ * (-sgn * S_c - (odd ? 1.0 : 0.0)) + std::numbers::sqrt2 * g * coth_half_;
    T lead = odd ? T(-2.0 * g2 * tanh_half_) : leading_even_exponent<T>(t_, m_last, g);
    out.P = lead + out.xi;
    if (want_psi) {
        out.psi_minus = 4.0 * g2 * S_sh * S_sh / sinh_t_;
        out.psi_plus = 4.0 * g2 * S_ch * S_ch / sinh_t_;
    }
}

template class HyperbolicExponents<double>;
template class HyperbolicExponents<cplx>;

CircularExponents::CircularExponents(double t, const ModelParams& p) : t_(t), g_(p.g)
{
    sin_t_ = std::sin(t);
    cos_t_ = std::cos(t);
    tan_half_ = std::tan(0.5 * t);
    cot_half_ = 1.0 / tan_half_;
    if (sin_t_ == 0.0) throw DomainError("t on the singular set pi Z");
}

void CircularExponents::eval(std::span<const double> mu, CircularNode& out) const
{
    const int n = static_cast<int>(mu.size());
    const double g = g_;
    const double g2 = g * g;
    const bool odd = (n % 2) == 1;
    const double sgn = odd ? -1.0 : 1.0;

    double c_prev = 1.0, d_prev = cos_t_;
    double S_c = c_prev, S_d = d_prev;
    double B_even = 0.0, B_odd = 0.0, D = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double m = mu[k - 1];
        const double c = std::cos(t_ * m);
        const double s1 = std::sin(t_ * m);
        const double d = cos_t_ * c + sin_t_ * s1;   // cos(t(1-m))
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        S_c += s * c;
        S_d += s * d;
        const int beta = k - 1;
        D += (d - d_prev) * ((beta % 2 == 1) ? B_even : B_odd);
        const double B = c_prev - c;
        if (beta % 2 == 0) B_even += B; else B_odd += B;
        c_prev = c;
        d_prev = d;
    }
    const double m_last = n == 0 ? 0.0 : mu[n - 1];
    const double sn = std::sin(0.5 * t_ * (1.0 - m_last));
    // xi(it) = i * xi_im
    out.xi_im = (-8.0 * g2 * sn * sn * sgn * S_c + 4.0 * g2 * D) / sin_t_;
    const double r2g = 2.0 * std::numbers::sqrt2 * g;
    out.theta_x = -r2g / sin_t_ * (sgn * S_d + (odd ? cos_t_ : 0.0)) + std::numbers::sqrt2 * g * cot_half_;
    out.theta_y = r2g / sin_t_ * (sgn * S_c + (odd ? 1.0 : 0.0)) - std::numbers::sqrt2 * g * cot_half_;
    double lead;
    if (odd) {
        lead = -2.0 * g2 * tan_half_;
    } else {
        const double a = std::sin(0.5 * t_ * (1.0 - m_last));
        lead = 4.0 * g2 * (a * a - std::sin(t_ * (1.0 - 0.5 * m_last)) * std::sin(0.5 * t_ * m_last)) / sin_t_;
    }
    out.P_im = lead + out.xi_im;
}

} // namespace qrm

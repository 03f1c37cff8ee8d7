#include "qrm/zeta.hpp"

#include "qrm/errors.hpp"
#include "qrm/omega.hpp"
#include "qrm/simplex.hpp"
#include "qrm/special.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>
#include <cmath>
#include <numbers>

namespace qrm {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Omega at contour and quadrature nodes, shared by every SpectralZeta: the
// nodes do not depend on tau, s or the sector.
using OmegaKey = std::tuple<double, double, double, double, bool>;
struct OmegaEntry {
    cplx value;
    double error;
    double rel;
};
std::mutex omega_mutex;
std::map<OmegaKey, OmegaEntry> omega_cache;

bool near_positive_integer(cplx s, int* n)
{
    double k = std::round(s.real());
    if (k >= 2.0 && std::abs(s - cplx(k, 0.0)) < 1e-8) {
        *n = static_cast<int>(k);
        return true;
    }
    return false;
}

} // namespace

void HankelContour::validate() const
{
    if (!(r > 0.0 && r < pi)) throw DomainError("contour radius must lie in (0, pi)");
    if (W != 0.0 && !(W > r)) throw DomainError("ray truncation W must exceed the radius");
    if (ray_nodes < 4 || circle_nodes < 4) throw DomainError("contour needs at least 4 nodes per piece");
}

SpectralZeta::SpectralZeta(const ModelParams& p, Sector sector, const ZetaOptions& opt)
    : p_(p), sector_(sector), opt_(opt)
{
    p.validate();
    opt.contour.validate();
    if (!(opt.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (!(opt.mellin_split > 0.2)) throw DomainError("Mellin split point must exceed 0.2");
}

void SpectralZeta::check_tau(cplx tau) const
{
    if (!(tau.real() > p_.g * p_.g + p_.delta))
        throw DomainError("Re tau must exceed g^2 + Delta for the integral representations");
}

cplx SpectralZeta::kernel(cplx w, double rel, double* err) const
{
    rel = std::clamp(rel, 1e-13, 1e-2);
    rel = std::pow(10.0, std::floor(std::log10(rel)));   // coarse levels let the cache serve other s
    auto get = [&](bool odd, double* e) {
        const OmegaKey key{p_.g, p_.delta, w.real(), w.imag(), odd};
        {
            std::lock_guard<std::mutex> lock(omega_mutex);
            auto it = omega_cache.find(key);
            if (it != omega_cache.end() && it->second.rel <= rel) {
                *e = std::max(it->second.error, std::abs(it->second.value) * it->second.rel);
                return it->second.value;
            }
        }
        OmegaOptions o;
        o.tol = rel;
        OmegaValue v = omega_value(w, odd, p_, o);
        std::lock_guard<std::mutex> lock(omega_mutex);
        omega_cache[key] = {v.value, v.error, rel};
        *e = std::max(v.error, std::abs(v.value) * rel);
        return v.value;
    };
    // 1 -+ e^{-w} = 2 sinh(w/2) e^{-w/2}, 2 cosh(w/2) e^{-w/2}
    const cplx eh = std::exp(0.5 * w);
    double e_even = 0.0, e_odd = 0.0;
    cplx om = get(false, &e_even);
    cplx even = om * eh / (2.0 * std::sinh(0.5 * w));
    double scale_even = std::abs(eh / (2.0 * std::sinh(0.5 * w)));
    if (sector_ == Sector::Full) {
        if (err) *err = e_even * scale_even;
        return even;
    }
    cplx od = get(true, &e_odd);
    cplx oddp = od * eh / (2.0 * std::cosh(0.5 * w));
    double scale_odd = std::abs(eh / (2.0 * std::cosh(0.5 * w)));
    const double s = sector_ == Sector::Plus ? 1.0 : -1.0;
    if (err) *err = 0.5 * (e_even * scale_even + e_odd * scale_odd);
    return 0.5 * (even - s * oddp);
}

ZetaValue SpectralZeta::ray(cplx s, cplx tau, double a, int n, double target) const
{
    // Gauss-Legendre in v = log(rho/a): the integrand is smooth and decays
    // double-exponentially in v, whatever the decay rate in rho.
    const double growth = p_.g * p_.g + p_.delta - tau.real();
    // log of rho |rho^{s-1} F(rho) e^{-tau rho}| <= rho^{Re s} 2 e^{(g^2+Delta-tau) rho} / (1 - e^{-rho})
    auto log_bound = [&](double rho) {
        return s.real() * std::log(rho) + std::log(2.0) + growth * rho - std::log(-std::expm1(-rho));
    };
    const double cut = std::log(1e-3 * target);
    double W = opt_.contour.W;
    if (W == 0.0) {
        W = std::max(2.0 * a, a + 1.0);
        while (log_bound(W) > cut + std::log(W) && W < a * 1e6) W *= 1.25;
    }
    std::vector<double> v, wv;
    gauss_legendre(n, 0.0, std::log(W / a), v, wv);
    ZetaValue out;
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
        const double rho = a * std::exp(v[j]);
        const double bound = wv[j] * std::exp(log_bound(rho));
        if (bound < 1e-3 * target / n) {
            err += bound;
            continue;
        }
        double e = 0.0;
        cplx F = kernel(rho, 0.1 * target / bound, &e);
        cplx f = std::exp(s * std::log(rho) - tau * rho);
        out.value += wv[j] * f * F;
        err += wv[j] * std::abs(f) * e;
        out.W = std::max(out.W, rho);
    }
    out.error = err;
    return out;
}

cplx SpectralZeta::circle(cplx s, cplx tau, cplx* dC) const
{
    const double r = opt_.contour.r;
    std::vector<double> phi, w;
    gauss_legendre(opt_.contour.circle_nodes, 0.0, 2.0 * pi, phi, w);
    cplx C = 0.0, D = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        const cplx z = std::polar(r, phi[j]);
        const cplx logmz(std::log(r), phi[j] - pi);   // log(-w) on |arg(-w)| <= pi
        double e = 0.0;
        cplx F = kernel(z, 0.1 * opt_.tol, &e);
        cplx v = std::exp((s - 1.0) * logmz - tau * z) * F * I * z * w[j];
        C += v;
        D += v * logmz;
    }
    if (dC) *dC = D;
    return C;
}

ZetaValue SpectralZeta::contour(cplx s, cplx tau) const
{
    check_tau(tau);
    int n = 0;
    if (near_positive_integer(s, &n)) return mellin(cplx(n, 0.0), tau);
    if (std::abs(s - 1.0) < 1e-14) throw DomainError("zeta has a pole at s = 1");
    // zeta = R(s)/Gamma(s) - Gamma(1-s) C(s) / (2 pi i); the ray pair contributes
    // (e^{i pi (s-1)} - e^{-i pi (s-1)}) R = 2 i sin(pi (s-1)) R, which the
    // reflection formula turns into R/Gamma(s).
    ZetaValue out;
    const cplx rg = reciprocal_gamma(s);
    if (rg != 0.0) {
        double target = opt_.tol / std::max(std::abs(rg), 1e-300);
        ZetaValue R = ray(s, tau, opt_.contour.r, opt_.contour.ray_nodes, target);
        out.value += R.value * rg;
        out.error += R.error * std::abs(rg);
        out.W = R.W;
    }
    cplx C = circle(s, tau, nullptr);
    out.value -= C / (reciprocal_gamma(1.0 - s) * 2.0 * pi * I);
    out.error += opt_.tol * std::abs(out.value);
    return out;
}

ZetaValue SpectralZeta::mellin(cplx s, cplx tau) const
{
    check_tau(tau);
    if (!(s.real() > 1.0)) throw DomainError("the Mellin representation needs Re s > 1");
    const double a = opt_.mellin_split;
    const double b = 0.99 * OmegaOptions{}.taylor_radius;
    auto integrand = [&](double t, double rel, double* e) {
        cplx F = kernel(t, rel, e);
        cplx f = std::exp((s - 1.0) * std::log(t) - tau * t);
        *e *= std::abs(f);
        return f * F;
    };
    ZetaValue out;
    // [0, b]: tanh-sinh, t = b / (1 + e^{-2x}), x = (pi/2) sinh u.
    cplx prev = 0.0;
    bool have = false;
    cplx near = 0.0;
    for (double h = 0.25; h > 1e-3; h *= 0.5) {
        cplx sum = 0.0;
        for (int side = -1; side <= 1; side += 2) {
            for (int j = side < 0 ? 1 : 0;; ++j) {
                const double u = side * j * h;
                const double x = 0.5 * pi * std::sinh(u);
                if (x > 20.0) break;
                const double t = b / (1.0 + std::exp(-2.0 * x));
                const double ch = std::cosh(x);
                const double wt = h * b * 0.5 * pi * std::cosh(u) / (2.0 * ch * ch);
                if (t <= 0.0 || wt == 0.0) break;
                double e = 0.0;
                cplx v = wt * integrand(t, 0.01 * opt_.tol, &e);
                sum += v;
                // t^{Re s - 1} decay at the left end: stop once negligible.
                if (side < 0 && std::abs(v) < 1e-3 * opt_.tol * std::max(1.0, std::abs(sum))) break;
            }
        }
        if (have && std::abs(sum - prev) <= opt_.tol * std::max(1.0, std::abs(sum))) {
            near = sum;
            out.error += std::abs(sum - prev);
            break;
        }
        prev = sum;
        have = true;
        near = sum;
    }
    // [b, a]: Gauss-Legendre.
    std::vector<double> x, w;
    gauss_legendre(20, b, a, x, w);
    cplx mid = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double e = 0.0;
        mid += w[j] * integrand(x[j], 0.1 * opt_.tol, &e);
        out.error += w[j] * e;
    }
    ZetaValue tail = ray(s, tau, a, opt_.mellin_tail_nodes, opt_.tol * std::abs(1.0 / reciprocal_gamma(s)));
    const cplx rg = reciprocal_gamma(s);
    out.value = (near + mid + tail.value) * rg;
    out.error = (out.error + tail.error) * std::abs(rg);
    out.W = tail.W;
    return out;
}

ZetaValue SpectralZeta::derivative_at_zero(cplx tau) const
{
    check_tau(tau);
    // zeta(s) = R(s)/Gamma(s) - Gamma(1-s) C(s)/(2 pi i), and near s = 0
    // 1/Gamma(s) = s + O(s^2), Gamma(1-s) = 1 + gamma_E s + O(s^2).
    ZetaValue R = ray(0.0, tau, opt_.contour.r, opt_.contour.ray_nodes, opt_.tol);
    cplx dC = 0.0;
    cplx C = circle(0.0, tau, &dC);
    ZetaValue out;
    out.value = R.value - (euler_gamma * C + dC) / (2.0 * pi * I);
    out.error = R.error + opt_.tol * std::abs(out.value);
    out.W = R.W;
    return out;
}

ZetaValue SpectralZeta::derivative_at_zero_fd(cplx tau, double h) const
{
    auto central = [&](double step) {
        return (contour(step, tau).value - contour(-step, tau).value) / (2.0 * step);
    };
    cplx d1 = central(h), d2 = central(0.5 * h);
    ZetaValue out;
    out.value = (4.0 * d2 - d1) / 3.0;
    out.error = std::abs(d2 - d1) / 3.0;
    return out;
}

cplx zeta_contour(cplx s, cplx tau, const ModelParams& p, const HankelContour& c, Sector sector, double tol)
{
    ZetaOptions o;
    o.tol = tol;
    o.contour = c;
    return SpectralZeta(p, sector, o).contour(s, tau).value;
}

cplx zeta_mellin(cplx s, cplx tau, const ModelParams& p, double tol, Sector sector)
{
    ZetaOptions o;
    o.tol = tol;
    return SpectralZeta(p, sector, o).mellin(s, tau).value;
}

Determinant spectral_determinant(cplx tau, Sector sector, const ModelParams& p, double tol)
{
    p.validate();
    if (!(tau.real() > p.g * p.g + p.delta))
        throw ConvergenceError("no validated continuation of the determinant to Re tau <= g^2 + Delta");
    ZetaOptions o;
    o.tol = tol;
    SpectralZeta z(p, sector, o);
    ZetaValue d = z.derivative_at_zero(tau);
    ZetaValue fd = z.derivative_at_zero_fd(tau);
    Determinant out;
    out.log_value = -d.value;
    out.value = std::exp(out.log_value);
    out.error = d.error;
    out.fd_discrepancy = std::abs(d.value - fd.value);
    return out;
}

} // namespace qrm

#include "qrm/omega.hpp"

#include "qrm/errors.hpp"
#include "qrm/rabi_bernoulli.hpp"
#include "qrm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qrm {

namespace {

constexpr int taylor_order = 12;

struct TermPlan {
    int n = 0;
    double log_mag = -std::numeric_limits<double>::infinity();
    double variation = 0.0;
};

// exp(E) at one node; E = P + psi^- (even n) or P + psi^+ (odd n).
template <class T>
struct Integrand {
    const HyperbolicExponents<T>& ev;
    bool odd;
    mutable NodeExponents<T> ne;

    T exponent(std::span<const double> mu) const
    {
        ev.eval(mu, ne, true);
        return ne.P + (odd ? ne.psi_plus : ne.psi_minus);
    }
};

template <class T>
TermPlan pilot(const Integrand<T>& f, int n, cplx wd)
{
    TermPlan pl;
    pl.n = n;
    double re_hi = -std::numeric_limits<double>::infinity(), re_lo = -re_hi;
    double im_hi = re_hi, im_lo = re_lo;
    for_each_sobol_node(n, 64, [&](std::size_t, std::span<const double> mu) {
        cplx e = f.exponent(mu);
        re_hi = std::max(re_hi, e.real());
        re_lo = std::min(re_lo, e.real());
        im_hi = std::max(im_hi, e.imag());
        im_lo = std::min(im_lo, e.imag());
    });
    pl.log_mag = n * std::log(std::abs(wd)) - std::lgamma(n + 1.0) + re_hi;
    pl.variation = (re_hi - re_lo) + (im_hi - im_lo);
    return pl;
}

template <class T>
cplx gl_integral(const Integrand<T>& f, int n, int q)
{
    RulePtr rule = gauss_legendre_rule(n, q);
    cplx s = 0.0;
    for (std::size_t k = 0; k < rule->size(); ++k) s += rule->weights[k] * std::exp(cplx(f.exponent(rule->node(k))));
    return s;
}

// Sums over the first N and N/2 Sobol points, in one sweep.
template <class T>
std::pair<cplx, cplx> qmc_integral(const Integrand<T>& f, int n, std::size_t N)
{
    cplx s_half = 0.0, s = 0.0;
    for_each_sobol_node(n, N, [&](std::size_t k, std::span<const double> mu) {
        cplx v = std::exp(cplx(f.exponent(mu)));
        s += v;
        if (k < N / 2) s_half += v;
    });
    const double vol = std::exp(-std::lgamma(n + 1.0));
    return {s * (vol / static_cast<double>(N)), s_half * (vol / static_cast<double>(N / 2))};
}

struct TermResult {
    cplx value;
    double error;
};

template <class T>
TermResult integrate_term(const Integrand<T>& f, const TermPlan& pl, double eps, const OmegaOptions& opt)
{
    const int n = pl.n;
    if (n <= opt.gl_max_dim) {
        int q = std::max(2, static_cast<int>(std::ceil(2.0 + 0.6 * std::log10(1.0 / eps) + 0.5 * pl.variation)));
        while (std::pow(static_cast<double>(q), n) <= static_cast<double>(opt.gl_budget)) {
            cplx hi = gl_integral(f, n, q);
            cplx lo = gl_integral(f, n, q - 2 > 0 ? q - 2 : 1);
            double err = std::abs(hi - lo);
            if (err <= eps * std::abs(hi)) return {hi, err};
            q += 2;
        }
    }
    std::size_t N = 1024;
    while (static_cast<double>(N) < 4.0 / eps && N < opt.qmc_max) N *= 2;
    for (;;) {
        auto [full, half] = qmc_integral(f, n, N);
        double err = std::abs(full - half);
        if (err <= eps * std::abs(full) || N >= opt.qmc_max) return {full, err};
        N *= 2;
    }
}

template <class T>
OmegaValue series_value(T w, bool odd, const ModelParams& p, const OmegaOptions& opt)
{
    HyperbolicExponents<T> ev(w, p);
    Integrand<T> f{ev, odd, {}};
    const cplx wd = cplx(w) * p.delta;
    const double log_tol = std::log(opt.tol);

    std::vector<TermPlan> plans;
    double scale = -std::numeric_limits<double>::infinity();
    int small = 0;
    for (int n = odd ? 1 : 0;; n += 2) {
        if (n > opt.lambda_cap) throw ConvergenceError("Omega series did not converge within the dimension cap");
        TermPlan pl;
        if (n == 0) {
            pl.n = 0;
            pl.log_mag = 0.0;
        } else {
            pl = pilot(f, n, wd);
        }
        plans.push_back(pl);
        scale = std::max(scale, pl.log_mag);
        // Terms of the (w Delta)^n / n! envelope fall once n exceeds |w Delta|.
        // A vanishing term (w Delta = 0) counts as small.
        const bool zero = pl.log_mag == -std::numeric_limits<double>::infinity();
        if (zero || (pl.log_mag < scale + log_tol - 2.0 && n > std::abs(wd))) {
            if (++small == 2) break;
        } else {
            small = 0;
        }
    }

    OmegaValue out;
    cplx sum = 0.0;
    double err = 0.0;
    cplx pw = 1.0;
    int n_prev = 0;
    for (const TermPlan& pl : plans) {
        for (; n_prev < pl.n; ++n_prev) pw *= wd;
        TermResult r{1.0, 0.0};
        if (pl.log_mag == -std::numeric_limits<double>::infinity()) {
            r.value = 0.0;
        } else if (pl.n > 0) {
            double eps = std::min(0.1, opt.tol * std::exp(scale - pl.log_mag));
            r = integrate_term(f, pl, eps, opt);
        }
        sum += pw * r.value;
        err += std::abs(pw) * r.error;
        ++out.terms;
    }
    // The last two planned terms bound the truncated tail.
    err += std::exp(plans.back().log_mag);   // 0 for vanishing terms
    const cplx pre = 2.0 * std::exp(cplx(w) * (p.g * p.g));
    out.value = pre * sum;
    out.error = std::abs(pre) * err;
    return out;
}

OmegaValue taylor_value(cplx w, bool odd, const ModelParams& p)
{
    auto c = omega_taylor(taylor_order, odd);
    double vars[3] = {0.0, p.g * p.g, p.delta};
    std::span<const double> v(vars, 3);
    OmegaValue out;
    cplx acc = 0.0;
    for (int k = taylor_order; k >= 0; --k) acc = acc * w + c[k].evaluate(v);
    out.value = acc;
    // Next coefficient estimated from the geometric decay of the last two.
    double a = std::abs(c[taylor_order].evaluate(v)) + std::abs(c[taylor_order - 1].evaluate(v)) * std::abs(w);
    out.error = a * std::pow(std::abs(w), taylor_order + 1);
    out.terms = taylor_order + 1;
    return out;
}

} // namespace

OmegaValue omega_value(cplx w, bool odd, const ModelParams& p, const OmegaOptions& opt)
{
    p.validate();
    TimePoint::omega(w).check();
    if (!(opt.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (opt.closed_forms && p.delta == 0.0) {
        OmegaValue v;
        v.value = odd ? cplx(0.0) : 2.0 * std::exp(w * (p.g * p.g));
        v.terms = 1;
        return v;
    }
    if (opt.closed_forms && p.g == 0.0) {
        OmegaValue v;
        v.value = odd ? 2.0 * std::sinh(w * p.delta) : 2.0 * std::cosh(w * p.delta);
        v.terms = 1;
        return v;
    }
    if (std::abs(w) < opt.taylor_radius) return taylor_value(w, odd, p);
    if (w.imag() == 0.0) return series_value<double>(w.real(), odd, p, opt);
    return series_value<cplx>(w, odd, p, opt);
}

cplx omega(cplx w, const ModelParams& p, double tol)
{
    OmegaOptions o;
    o.tol = tol;
    return omega_value(w, false, p, o).value;
}

cplx omega_odd(cplx w, const ModelParams& p, double tol)
{
    OmegaOptions o;
    o.tol = tol;
    return omega_value(w, true, p, o).value;
}

PartitionValue partition_value(double beta, Sector sector, const ModelParams& p, double tol, Normalization norm)
{
    OmegaOptions o;
    o.tol = tol;
    return partition_value(beta, sector, p, o, norm);
}

PartitionValue partition_value(double beta, Sector sector, const ModelParams& p, const OmegaOptions& o,
                               Normalization norm)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    OmegaValue om = omega_value(beta, false, p, o);
    const double eb = std::exp(-beta);
    // Omega normalization: Z = Omega/(1 - e^{-b}),  Z_pm = (Z -+ Omega_odd/(1 + e^{-b}))/2.
    // Literal: the printed prefactors e^{b(g^2+1)}/sinh b and /(2 cosh b), i.e.
    // Omega/(1 - e^{-2b}) and Omega_odd/(1 + e^{-2b}).
    const double d_even = norm == Normalization::Omega ? 1.0 - eb : 1.0 - eb * eb;
    const double d_odd = norm == Normalization::Omega ? 1.0 + eb : 1.0 + eb * eb;
    PartitionValue z;
    z.value = om.value.real() / d_even;
    z.error = om.error / d_even;
    if (sector == Sector::Full) return z;
    OmegaValue od = omega_value(beta, true, p, o);
    const double s = sector == Sector::Plus ? 1.0 : -1.0;
    z.value = 0.5 * (z.value - s * od.value.real() / d_odd);
    z.error = 0.5 * (z.error + od.error / d_odd);
    return z;
}

double partition(double beta, const ModelParams& p, double tol)
{
    return partition_value(beta, Sector::Full, p, tol).value;
}

double partition_parity(double beta, Parity parity, const ModelParams& p, double tol)
{
    return partition_value(beta, parity == Parity::Plus ? Sector::Plus : Sector::Minus, p, tol).value;
}

} // namespace qrm

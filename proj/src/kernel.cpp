#include "qrm/kernel.hpp"

#include "qrm/errors.hpp"
#include "qrm/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrm {

namespace {

struct Spread {
    double re_lo = std::numeric_limits<double>::infinity();
    double re_hi = -std::numeric_limits<double>::infinity();
    double im_lo = std::numeric_limits<double>::infinity();
    double im_hi = -std::numeric_limits<double>::infinity();
    double abs_re_max = 0.0;

    void add(cplx v)
    {
        re_lo = std::min(re_lo, v.real());
        re_hi = std::max(re_hi, v.real());
        im_lo = std::min(im_lo, v.imag());
        im_hi = std::max(im_hi, v.imag());
        abs_re_max = std::max(abs_re_max, std::abs(v.real()));
    }
    double width() const { return (re_hi - re_lo) + (im_hi - im_lo); }
};

double log_factorial(int n)
{
    return std::lgamma(n + 1.0);
}

// Gauss–Legendre order for a term needing relative accuracy eps whose
// integrand varies by about `variation` (in exponent units) over the simplex.
int gl_order(double eps, double variation)
{
    double q = 2.0 + 0.6 * std::log10(1.0 / eps) + 0.5 * variation;
    return std::max(2, static_cast<int>(std::ceil(q)));
}

double gl_accuracy(int q, double variation)
{
    return std::pow(10.0, -(q - 2.0 - 0.5 * variation) / 0.6);
}

std::size_t qmc_points(double eps, std::size_t cap)
{
    double want = 4.0 / eps;
    std::size_t n = 1024;
    while (static_cast<double>(n) < want && n < cap) n *= 2;
    return std::min(n, cap);
}

} // namespace

KernelSeries::KernelSeries(cplx t, bool rotated, const ModelParams& p, const KernelOptions& opt, double radius)
    : rotated_(rotated), p_(p), opt_(opt), radius_(radius)
{
    p.validate();
    if (!(opt.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (rotated) {
        t_real_ = t.real();
        t_heat_ = cplx(0.0, t_real_);
    } else {
        t_real_ = 0.0;
        t_heat_ = t;
    }
}

cplx KernelSeries::power(int lambda) const
{
    cplx z = t_heat_ * p_.delta;
    cplx r = 1.0;
    for (int k = 0; k < lambda; ++k) r *= z;
    return r;
}

const TermTable& KernelSeries::term(int lambda) const
{
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<int>(terms_.size()) <= lambda) build(static_cast<int>(terms_.size()));
    return *terms_[lambda];
}

void KernelSeries::build(int lambda) const
{
    auto tab = std::make_unique<TermTable>();
    tab->lambda = lambda;

    // Pilot: exponent data on a few QMC nodes decide magnitude and rule.
    HyperbolicExponents<cplx> pilot_eval(t_heat_, p_);
    RulePtr pilot = lambda == 0 ? empty_rule() : sobol_rule(lambda, 64);
    Spread sP, sX, sY;
    NodeExponents<cplx> ne;
    for (std::size_t k = 0; k < pilot->size(); ++k) {
        pilot_eval.eval(pilot->node(k), ne);
        sP.add(ne.P);
        sX.add(ne.theta_x);
        sY.add(ne.theta_y);
    }
    const double R = radius_;
    double log_mag = lambda * std::log(std::max(std::abs(t_heat_ * p_.delta), 1e-300)) - log_factorial(lambda)
                     + sP.re_hi + R * (sX.abs_re_max + sY.abs_re_max);
    if (lambda == 0) scale_ = log_mag;
    double variation = sP.width() + R * (sX.width() + sY.width());
    double eps = std::min(0.1, opt_.tol * std::exp(scale_ - log_mag));

    if (lambda == 0) {
        tab->rule = empty_rule();
    } else {
        int q = gl_order(eps, variation);
        double count = std::pow(static_cast<double>(q), lambda);
        if (lambda <= opt_.gl_max_dim && count <= static_cast<double>(opt_.gl_budget)) {
            tab->rule = gauss_legendre_rule(lambda, q);
            tab->quad_error = gl_accuracy(q, variation) * std::exp(log_mag);
        } else {
            std::size_t n = qmc_points(eps, opt_.qmc_max);
            tab->rule = sobol_rule(lambda, n);
            tab->quad_error = 4.0 / static_cast<double>(n) * std::exp(log_mag);
        }
    }

    const SimplexRule& rule = *tab->rule;
    const std::size_t N = rule.size();
    tab->weight.resize(N);
    tab->theta_x.resize(N);
    tab->theta_y.resize(N);
    if (rotated_) {
        CircularExponents ev(t_real_, p_);
        CircularNode cn;
        for (std::size_t k = 0; k < N; ++k) {
            ev.eval(rule.node(k), cn);
            tab->weight[k] = rule.weights[k] * cplx(std::cos(cn.P_im), std::sin(cn.P_im));
            tab->theta_x[k] = cplx(0.0, cn.theta_x);
            tab->theta_y[k] = cplx(0.0, cn.theta_y);
        }
    } else if (t_heat_.imag() == 0.0) {
        HyperbolicExponents<double> ev(t_heat_.real(), p_);
        NodeExponents<double> nd;
        for (std::size_t k = 0; k < N; ++k) {
            ev.eval(rule.node(k), nd);
            tab->weight[k] = rule.weights[k] * std::exp(nd.P);
            tab->theta_x[k] = nd.theta_x;
            tab->theta_y[k] = nd.theta_y;
        }
    } else {
        HyperbolicExponents<cplx> ev(t_heat_, p_);
        for (std::size_t k = 0; k < N; ++k) {
            ev.eval(rule.node(k), ne);
            tab->weight[k] = rule.weights[k] * std::exp(ne.P);
            tab->theta_x[k] = ne.theta_x;
            tab->theta_y[k] = ne.theta_y;
        }
    }
    terms_.push_back(std::move(tab));
}

// ---------------------------------------------------------------------------

KernelEvaluator::KernelEvaluator(const TimePoint& t, const ModelParams& p, const KernelOptions& opt)
    : t_(t), p_(p), opt_(opt)
{
    p.validate();
    t.check();
    double radius = opt.radius > 0.0 ? opt.radius : 6.0;
    bool rotated = t.domain == TimePoint::Domain::Propagator;
    if (t.domain == TimePoint::Domain::Omega) throw DomainError("kernel needs a heat-domain or propagator time");
    series_ = std::make_shared<KernelSeries>(t.t, rotated, p, opt, radius);
}

cplx KernelEvaluator::prefactor(double x, double y) const
{
    return mehler_prefactor(x, y, t_, p_, series_->rotated());
}

KernelMatrix KernelEvaluator::full(double x, double y) const
{
    const KernelSeries& S = *series_;
    std::array<SeriesStopper, 4> stop{SeriesStopper(opt_.tol, opt_.lambda_cap), SeriesStopper(opt_.tol, opt_.lambda_cap),
                                      SeriesStopper(opt_.tol, opt_.lambda_cap), SeriesStopper(opt_.tol, opt_.lambda_cap)};
    std::array<cplx, 4> sum{};
    std::array<bool, 4> done{};
    double quad_err = 0.0;
    int lambda = 0;
    for (; lambda < opt_.lambda_cap; ++lambda) {
        const TermTable& tab = S.term(lambda);
        cplx C = 0.0, Sh = 0.0;
        for (std::size_t k = 0; k < tab.weight.size(); ++k) {
            cplx e = std::exp(tab.theta_x[k] * x + tab.theta_y[k] * y);
            cplx ei = 1.0 / e;
            C += tab.weight[k] * (e + ei);
            Sh += tab.weight[k] * (e - ei);
        }
        cplx pw = 0.5 * S.power(lambda);
        C *= pw;
        Sh *= pw;
        const double sg = (lambda % 2 == 0) ? 1.0 : -1.0;
        std::array<cplx, 4> term{sg * C, -sg * Sh, -Sh, C};
        double scale = 0.0;
        for (int e = 0; e < 4; ++e) {
            sum[e] += term[e];
            scale = std::max(scale, std::abs(sum[e]));
        }
        quad_err += tab.quad_error;
        bool all = true;
        for (int e = 0; e < 4; ++e) {
            if (!done[e]) done[e] = stop[e].push(std::abs(term[e]), scale);
            all = all && done[e];
        }
        if (all) break;
    }
    if (lambda == opt_.lambda_cap) throw ConvergenceError("heat-kernel lambda-series did not converge within the cap");
    cplx K0 = prefactor(x, y);
    KernelMatrix out;
    for (int e = 0; e < 4; ++e) {
        out.entry[e] = K0 * sum[e];
        out.terms_used[e] = stop[e].terms();
        out.tail_estimate[e] = std::abs(K0) * (stop[e].tail_estimate() + quad_err);
    }
    return out;
}

KernelScalar KernelEvaluator::parity(double x, double y, Parity parity) const
{
    const KernelSeries& S = *series_;
    SeriesStopper stop(opt_.tol, opt_.lambda_cap);
    const cplx K0 = prefactor(x, y);
    const cplx K0m = prefactor(x, -y);
    cplx even = 0.0, odd = 0.0;
    double quad_err = 0.0;
    int lambda = 0;
    for (; lambda < opt_.lambda_cap; ++lambda) {
        const TermTable& tab = S.term(lambda);
        cplx I = 0.0;
        if (lambda % 2 == 0) {
            for (std::size_t k = 0; k < tab.weight.size(); ++k)
                I += tab.weight[k] * std::exp(-(tab.theta_x[k] * x + tab.theta_y[k] * y));
        } else {
            for (std::size_t k = 0; k < tab.weight.size(); ++k)
                I += tab.weight[k] * std::exp(tab.theta_x[k] * x - tab.theta_y[k] * y);
        }
        cplx term = S.power(lambda) * I;
        double mag;
        if (lambda % 2 == 0) {
            even += term;
            mag = std::abs(K0 * term);
        } else {
            odd += term;
            mag = std::abs(K0m * term);
        }
        quad_err += tab.quad_error * (lambda % 2 == 0 ? std::abs(K0) : std::abs(K0m));
        if (stop.push(mag, std::abs(K0 * even) + std::abs(K0m * odd))) break;
    }
    if (lambda == opt_.lambda_cap) throw ConvergenceError("parity-kernel lambda-series did not converge within the cap");
    KernelScalar out;
    out.value = K0 * even - parity_sign(parity) * K0m * odd;
    out.terms_used = stop.terms();
    out.tail_estimate = stop.tail_estimate() + quad_err;
    return out;
}

namespace {

KernelOptions with_radius(KernelOptions opt, double x, double y)
{
    if (opt.radius <= 0.0) opt.radius = std::max({1.0, std::abs(x), std::abs(y)});
    return opt;
}

} // namespace

KernelMatrix heat_kernel(double x, double y, const TimePoint& t, const ModelParams& p, const KernelOptions& opt)
{
    if (t.domain != TimePoint::Domain::Heat) throw DomainError("heat_kernel needs a heat-domain time");
    return KernelEvaluator(t, p, with_radius(opt, x, y)).full(x, y);
}

KernelScalar heat_kernel_parity(double x, double y, const TimePoint& t, Parity parity, const ModelParams& p,
                                const KernelOptions& opt)
{
    if (t.domain != TimePoint::Domain::Heat) throw DomainError("heat_kernel_parity needs a heat-domain time");
    return KernelEvaluator(t, p, with_radius(opt, x, y)).parity(x, y, parity);
}

KernelMatrix propagator(double x, double y, double t, const ModelParams& p, const KernelOptions& opt)
{
    return KernelEvaluator(TimePoint::propagator(t), p, with_radius(opt, x, y)).full(x, y);
}

KernelScalar propagator_parity(double x, double y, double t, Parity parity, const ModelParams& p,
                               const KernelOptions& opt)
{
    return KernelEvaluator(TimePoint::propagator(t), p, with_radius(opt, x, y)).parity(x, y, parity);
}

} // namespace qrm

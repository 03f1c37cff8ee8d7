#include "qrm/errors.hpp"
#include "qrm/kernel.hpp"
#include "qrm/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qrm {

double SampledState::norm() const
{
    const double hh = h();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        double a = std::norm(up[i]);
        if (sector == Sector::Full) a += std::norm(down[i]);
        s += w * a;
    }
    return std::sqrt(s * hh);
}

namespace {

// Phi(omega) = sum_j f_j exp(-i omega y_j) tabulated on a uniform omega grid
// and evaluated elsewhere by 4-point Lagrange interpolation.  The samples
// y_j lie in [-L, L], so with L * d_omega = 2e-3 the interpolation error is
// far below the trapezoid error of the y-integral itself.
class FourierTable {
public:
    FourierTable(const std::vector<cplx>& f, const std::vector<double>& y, double L, double w_lo, double w_hi)
    {
        step_ = 2e-3 / std::max(L, 1.0);
        lo_ = w_lo - 3.0 * step_;
        std::size_t count = static_cast<std::size_t>(std::ceil((w_hi - lo_) / step_)) + 4;
        table_.assign(count, 0.0);
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (f[j] == 0.0) continue;
            // f_j exp(-i omega_m y_j) with omega_m = lo + m step, by rotation.
            cplx v = f[j] * std::exp(cplx(0.0, -lo_ * y[j]));
            const cplx r = std::exp(cplx(0.0, -step_ * y[j]));
            for (std::size_t m = 0; m < count; ++m) {
                table_[m] += v;
                v *= r;
                if ((m & 1023u) == 1023u) v = f[j] * std::exp(cplx(0.0, -(lo_ + (m + 1) * step_) * y[j]));
            }
        }
    }

    cplx operator()(double w) const
    {
        double u = (w - lo_) / step_;
        long i = static_cast<long>(std::floor(u)) - 1;
        if (i < 0 || static_cast<std::size_t>(i + 3) >= table_.size()) throw DomainError("frequency outside table");
        double s = u - static_cast<double>(i) - 1.0;   // in [0,1) relative to node i+1
        // cubic Lagrange on nodes -1, 0, 1, 2
        double l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        double l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        double l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        double l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        return l0 * table_[i] + l1 * table_[i + 1] + l2 * table_[i + 2] + l3 * table_[i + 3];
    }

private:
    double lo_, step_;
    std::vector<cplx> table_;
};

} // namespace

EvolveResult evolve_state(const SampledState& initial, double t, const ModelParams& p, const KernelOptions& opt,
                          double max_drift)
{
    p.validate();
    TimePoint::propagator(t).check();
    const int n = initial.n;
    if (n < 3 || !(initial.L > 0.0)) throw DomainError("evolve_state needs a grid with L > 0 and n >= 3");
    const bool full = initial.sector == Sector::Full;
    if (static_cast<int>(initial.up.size()) != n || (full && static_cast<int>(initial.down.size()) != n))
        throw DomainError("state size does not match the grid");

    const double h = initial.h();
    const double sn = std::sin(t);

    // Near pi Z the chirp exp(i y^2 cot t / 2) is not resolved by the grid.
    // Then U(t) = U(t2) U(t1) with t1, t2 a quarter period away from the
    // caustics, where |cot| = tan(|r|/2) < 1.
    if (std::abs(std::cos(t) / sn) > std::max(1.0, std::numbers::pi / (2.0 * h * initial.L))) {
        const double r = t - std::numbers::pi * std::round(t / std::numbers::pi);
        const double t1 = 0.5 * r - 0.5 * std::numbers::pi;
        const EvolveResult first = evolve_state(initial, t1, p, opt, max_drift);
        EvolveResult res = evolve_state(first.state, t - t1, p, opt, max_drift);
        res.norm_drift = std::abs(res.state.norm() - initial.norm());
        if (res.norm_drift > max_drift)
            throw ConvergenceError("evolved state lost norm beyond the threshold; the grid does not resolve the state");
        return res;
    }

    KernelOptions o = opt;
    if (o.radius <= 0.0) o.radius = initial.L;
    KernelSeries series(cplx(t, 0.0), true, p, o, o.radius);

    const double half_cot = 0.5 * std::cos(t) / sn;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = initial.x(i);

    // phi_c(y) = h w_y exp(i y^2 cot t / 2) psi_c(y)
    auto chirp = [&](const std::vector<cplx>& psi) {
        std::vector<cplx> f(n);
        for (int j = 0; j < n; ++j) {
            double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            f[j] = h * w * std::exp(cplx(0.0, half_cot * grid[j] * grid[j])) * psi[j];
        }
        return f;
    };

    // Frequencies needed: +-x/sin t +- chi_y over all nodes; grow the table
    // lazily as new terms appear.
    double chi_max = 0.0;
    auto chi_bound = [&](int lambda) {
        const TermTable& tab = series.term(lambda);
        for (const cplx& c : tab.theta_y) chi_max = std::max(chi_max, std::abs(c.imag()));
    };
    for (int l = 0; l < 4; ++l) chi_bound(l);
    const double w_span = initial.L / std::abs(sn);
    auto make_tables = [&](double margin) {
        std::vector<FourierTable> tabs;
        tabs.emplace_back(chirp(initial.up), grid, initial.L, -w_span - margin, w_span + margin);
        if (full) tabs.emplace_back(chirp(initial.down), grid, initial.L, -w_span - margin, w_span + margin);
        return tabs;
    };
    double margin = 2.0 * chi_max + 1.0;
    std::vector<FourierTable> tabs = make_tables(margin);

    const cplx c0 = std::exp(cplx(0.0, t * (p.g * p.g + 0.5))) / (std::sqrt(2.0 * std::numbers::pi) * sqrt_sinh(cplx(0.0, t)));
    std::vector<cplx> out_up(n, 0.0), out_dn(full ? n : 0, 0.0);
    std::vector<cplx> c_up(n), c_dn(full ? n : 0);
    SeriesStopper stop(o.tol, o.lambda_cap);
    const double ps = full ? 0.0 : parity_sign(initial.sector == Sector::Plus ? Parity::Plus : Parity::Minus);
    int lambda = 0;
    for (; lambda < o.lambda_cap; ++lambda) {
        const TermTable& tab = series.term(lambda);
        double local_chi = 0.0;
        for (const cplx& c : tab.theta_y) local_chi = std::max(local_chi, std::abs(c.imag()));
        if (local_chi + 1.0 > margin) {
            margin = 2.0 * local_chi + 1.0;
            tabs = make_tables(margin);
        }
        const cplx pw = series.power(lambda);
        const double sg = (lambda % 2 == 0) ? 1.0 : -1.0;
        std::fill(c_up.begin(), c_up.end(), 0.0);
        std::fill(c_dn.begin(), c_dn.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double x = grid[i];
            const double wx = x / sn;
            cplx acc_up = 0.0, acc_dn = 0.0;
            for (std::size_t k = 0; k < tab.weight.size(); ++k) {
                const double cx = tab.theta_x[k].imag();
                const double cy = tab.theta_y[k].imag();
                const cplx ep(std::cos(cx * x), std::sin(cx * x));
                if (full) {
                    // y-sums with exp(+-i chi_y y)
                    cplx pu = tabs[0](wx - cy), mu = tabs[0](wx + cy);
                    cplx pd = tabs[1](wx - cy), md = tabs[1](wx + cy);
                    cplx chu = 0.5 * (ep * pu + std::conj(ep) * mu), shu = 0.5 * (ep * pu - std::conj(ep) * mu);
                    cplx chd = 0.5 * (ep * pd + std::conj(ep) * md), shd = 0.5 * (ep * pd - std::conj(ep) * md);
                    acc_up += tab.weight[k] * (sg * chu - sg * shd);
                    acc_dn += tab.weight[k] * (-shu + chd);
                } else if (lambda % 2 == 0) {
                    acc_up += tab.weight[k] * std::conj(ep) * tabs[0](wx + cy);
                } else {
                    acc_up += tab.weight[k] * ep * tabs[0](-wx + cy);
                }
            }
            const cplx pre = c0 * std::exp(cplx(0.0, half_cot * x * x));
            c_up[i] = pre * pw * acc_up;
            if (full) c_dn[i] = pre * pw * acc_dn;
        }
        double mag = 0.0;
        double tot = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx term = c_up[i];
            if (!full && lambda % 2 == 1) term *= -ps;
            out_up[i] += term;
            mag += std::norm(term);
            tot += std::norm(out_up[i]);
            if (full) {
                out_dn[i] += c_dn[i];
                mag += std::norm(c_dn[i]);
                tot += std::norm(out_dn[i]);
            }
        }
        if (stop.push(std::sqrt(mag * h), std::sqrt(tot * h))) break;
    }
    if (lambda == o.lambda_cap) throw ConvergenceError("propagator series did not converge while evolving the state");

    EvolveResult res;
    res.state = initial;
    res.state.up = std::move(out_up);
    if (full) res.state.down = std::move(out_dn);
    res.norm_drift = std::abs(res.state.norm() - initial.norm());
    if (res.norm_drift > max_drift)
        throw ConvergenceError("evolved state lost norm beyond the threshold; the grid does not resolve the state");
    return res;
}

} // namespace qrm

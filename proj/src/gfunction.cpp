#include "qrm/gfunction.hpp"

#include "qrm/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace qrm {

namespace {

constexpr double pole_guard = 1e-3;

void require_g(const ModelParams& p)
{
    p.validate();
    if (!(p.g > 0.0)) throw DomainError("G-functions need g > 0");
}

double sign_of(Parity parity)
{
    return parity == Parity::Plus ? 1.0 : -1.0;
}

double f_raw(int n, double x, double g, double delta)
{
    return 2.0 * g + (n - x + delta * delta / (x - n)) / (2.0 * g);
}

void require_signed(double g, double delta)
{
    if (!(g > 0.0) || !std::isfinite(g) || !std::isfinite(delta)) throw DomainError("G-functions need finite g > 0");
}

using Wide = boost::multiprecision::cpp_bin_float_50;

template <class T>
struct SeriesSum {
    T sum = 0;
    double largest = 0.0;   // largest |term|, to judge cancellation
    int terms = 0;
};

// sum_n K_n(x) c_n g^n for the regular series, every term multiplied by
// scale (scale = x - N on the near-integer path, where c_N scale = scale -+ Delta).
template <class T>
SeriesSum<T> regular_sum(double x, Parity parity, double g, double delta, const GOptions& opt, double scale, int N)
{
    using std::abs;
    const T s = sign_of(parity);
    const T X = x, G = g, D = delta, S = scale;
    const T inv2g = 1 / (2 * G);
    SeriesSum<T> out;
    T km2 = 0, km1 = 1;   // K_{n-2}, K_{n-1}
    T gn = 1;
    int small = 0;
    for (int n = 0; n <= opt.nmax; ++n) {
        T K = 1;
        if (n > 0) {
            const T m = n - 1;
            K = ((2 * G + (m - X + D * D / (X - m)) * inv2g) * km1 - km2) / n;
            km2 = km1;
            km1 = K;
        }
        const T c = n == N ? S - s * D : S * (1 - s * D / (X - n));
        const T term = K * c * gn;
        out.sum += term;
        gn *= G;
        ++out.terms;
        const double at = static_cast<double>(abs(term));
        out.largest = std::max(out.largest, at);
        if (n > x && at < opt.tol * std::max(1.0, static_cast<double>(abs(out.sum)))) {
            if (++small == 5) return out;
        } else {
            small = 0;
        }
    }
    throw ConvergenceError("G-function series did not converge within nmax terms");
}

// Double precision unless the terms cancel by more than four digits (large x,
// or x near a zero); then 50-digit arithmetic.
GValue regular_series(double x, Parity parity, double g, double delta, const GOptions& opt, double scale, int N)
{
    GValue out;
    SeriesSum<double> d = regular_sum<double>(x, parity, g, delta, opt, scale, N);
    if (d.largest <= 1e4 * std::abs(d.sum)) {
        out.value = d.sum;
        out.terms = d.terms;
        return out;
    }
    SeriesSum<Wide> w = regular_sum<Wide>(x, parity, g, delta, opt, scale, N);
    out.value = static_cast<double>(w.sum);
    out.terms = w.terms;
    return out;
}

int nearest_integer(double x)
{
    return static_cast<int>(std::lround(x));
}

} // namespace

double f_coeff(int n, double x, const ModelParams& p)
{
    return f_raw(n, x, p.g, p.delta);
}

GCoeffs coeff_K(double x, int nmax, const ModelParams& p)
{
    require_g(p);
    if (nmax < 0) throw DomainError("nmax must be nonnegative");
    if (x >= 0.0 && x <= nmax && x == std::floor(x)) throw DomainError("x is a pole of f_n");
    GCoeffs c;
    c.x = x;
    c.params = p;
    c.K.resize(nmax + 1);
    c.K[0] = 1.0;
    if (nmax >= 1) c.K[1] = f_coeff(0, x, p);
    for (int n = 2; n <= nmax; ++n) c.K[n] = (f_coeff(n - 1, x, p) * c.K[n - 1] - c.K[n - 2]) / n;
    return c;
}

GValue g_function_value(double x, Parity parity, const ModelParams& p, const GOptions& opt)
{
    require_g(p);
    return g_function_value(x, parity, p.g, p.delta, opt);
}

GValue g_function_value(double x, Parity parity, double g, double delta, const GOptions& opt)
{
    require_signed(g, delta);
    if (x >= 0.0 && x == std::floor(x)) throw DomainError("G-function has a pole at nonnegative integer x");
    GValue v = regular_series(x, parity, g, delta, opt, 1.0, -1);
    const int N = nearest_integer(x);
    v.ill_conditioned = N >= 0 && std::abs(x - N) < pole_guard;
    return v;
}

double g_function(double x, Parity parity, const ModelParams& p, const GOptions& opt)
{
    return g_function_value(x, parity, p, opt).value;
}

double g_function(double x, Parity parity, double g, double delta, const GOptions& opt)
{
    return g_function_value(x, parity, g, delta, opt).value;
}

double constraint_K(int N, const ModelParams& p)
{
    require_g(p);
    if (N < 0) throw DomainError("N must be nonnegative");
    double km2 = 0.0, km1 = 1.0;
    for (int n = 1; n <= N; ++n) {
        double K = (f_coeff(n - 1, N, p) * km1 - km2) / n;
        km2 = km1;
        km1 = K;
    }
    return km1;
}

double g_exceptional(int N, Parity parity, const ModelParams& p, const GOptions& opt)
{
    require_g(p);
    if (!(p.delta > 0.0)) throw DomainError("exceptional G-function needs Delta > 0");
    return g_exceptional(N, parity, p.g, p.delta, opt);
}

double g_exceptional(int N, Parity parity, double g, double delta, const GOptions& opt)
{
    require_signed(g, delta);
    if (N < 0) throw DomainError("N must be nonnegative");
    if (delta == 0.0) throw DomainError("exceptional G-function needs Delta != 0");
    const double s = sign_of(parity);
    double sum = -s * 2.0 * (N + 1) / delta;
    double km2 = 0.0, km1 = 1.0;   // K_N(N) = 0, K_{N+1}(N) = 1
    double gn = 1.0;
    double peak = std::abs(sum);
    int small = 0;
    for (int n = N + 1; n <= N + 1 + opt.nmax; ++n) {
        double K = 1.0;
        if (n > N + 1) {
            K = (f_raw(n - 1, N, g, delta) * km1 - km2) / n;
            km2 = km1;
            km1 = K;
        }
        const double term = K * (1.0 - s * delta / (N - n)) * gn;
        sum += term;
        peak = std::max(peak, std::abs(sum));
        gn *= g;
        if (std::abs(term) < opt.tol * std::max(1.0, peak)) {
            if (++small == 5) return sum;
        } else {
            small = 0;
        }
    }
    throw ConvergenceError("exceptional G-function series did not converge within nmax terms");
}

double residue_at(int N, Parity parity, const ModelParams& p, const GOptions& opt)
{
    require_g(p);
    if (N < 0) throw DomainError("N must be nonnegative");
    if (p.delta == 0.0) return 0.0;
    const double k = constraint_K(N, p);
    if (k == 0.0) return 0.0;
    return p.delta * p.delta * std::pow(p.g, N) / (2.0 * (N + 1)) * k * g_exceptional(N, parity, p, opt);
}

double complete_g(double x, Parity parity, const ModelParams& p, const GOptions& opt)
{
    require_g(p);
    const int N = nearest_integer(x);
    if (N < 0 || std::abs(x - N) >= pole_guard) {
        // 1/Gamma(-x) = -sin(pi x) Gamma(1 + x) / pi
        const double rg = x > -0.5 ? -std::sin(std::numbers::pi * x) * std::tgamma(1.0 + x) / std::numbers::pi
                                   : 1.0 / std::tgamma(-x);
        return g_function_value(x, parity, p, opt).value * rg;
    }
    return complete_g_near(x, N, parity, p, opt);
}

double complete_g_near(double x, int N, Parity parity, const ModelParams& p, const GOptions& opt)
{
    require_g(p);
    if (N < 0) throw DomainError("N must be nonnegative");
    const double sign = N % 2 == 0 ? -1.0 : 1.0;   // (-1)^{N+1}
    const double eps = x - N;
    if (eps == 0.0) return sign * std::tgamma(N + 1.0) * residue_at(N, parity, p, opt);
    // 1/((x - N) Gamma(-x)) = (-1)^{N+1} Gamma(1 + x) sin(pi eps)/(pi eps)
    const double pe = std::numbers::pi * eps;
    const double factor = sign * std::tgamma(1.0 + x) * std::sin(pe) / pe;
    return regular_series(x, parity, p.g, p.delta, opt, eps, N).value * factor;
}

std::vector<EigenvalueRecord> find_eigenvalues(Parity parity, const ModelParams& p, const EigenSearch& s,
                                               const GOptions& opt)
{
    require_g(p);
    if (!(s.grid_step > 0.0) || !(s.tol > 0.0)) throw DomainError("grid step and tolerance must be positive");
    if (!(s.x_hi > s.x_lo)) return {};
    const auto cells = static_cast<std::size_t>(std::ceil((s.x_hi - s.x_lo) / s.grid_step));
    std::vector<double> grid(cells + 1), val(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) grid[i] = std::min(s.x_hi, s.x_lo + i * s.grid_step);

    unsigned nt = s.threads > 0 ? static_cast<unsigned>(s.threads) : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<unsigned>(nt, static_cast<unsigned>(grid.size()));
    {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(nt);
        for (unsigned t = 0; t < nt; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < grid.size(); i += nt) val[i] = complete_g(grid[i], parity, p, opt);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<EigenvalueRecord> out;
    auto record = [&](double x) {
        EigenvalueRecord r;
        r.x = x;
        r.lambda = x - p.g * p.g;
        r.parity = parity;
        const int N = nearest_integer(x);
        if (N >= 0 && std::abs(x - N) < 1e-8) {
            r.x = N;
            r.lambda = N - p.g * p.g;
            r.classification = std::abs(constraint_K(N, p)) < 1e-8 ? EigenClass::Juddian : EigenClass::NonJuddianExceptional;
        }
        r.residual = std::abs(complete_g(r.x, parity, p, opt));
        out.push_back(r);
    };
    for (std::size_t i = 0; i < cells; ++i) {
        double a = grid[i], b = grid[i + 1], fa = val[i], fb = val[i + 1];
        if (fa == 0.0) {
            record(a);
            continue;
        }
        if (fb == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
        while (b - a > s.tol) {
            const double m = 0.5 * (a + b);
            const double fm = complete_g(m, parity, p, opt);
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        record(0.5 * (a + b));
    }
    if (!val.empty() && val.back() == 0.0) record(grid.back());
    return out;
}

const char* to_string(EigenClass c)
{
    switch (c) {
    case EigenClass::Regular: return "regular";
    case EigenClass::Juddian: return "Juddian";
    case EigenClass::NonJuddianExceptional: return "non-Juddian exceptional";
    }
    return "";
}

} // namespace qrm

#include "qrm/rabi_bernoulli.hpp"

#include "qrm/errors.hpp"
#include "qrm/formal_series.hpp"
#include "qrm/simplex.hpp"

#include <map>
#include <mutex>

namespace qrm {

namespace {

using Ring = MultiPoly::Ring;

// Stage one works in Q[G, mu_1..mu_n] (Generic ring, G first).
struct MuRing {
    int n;
    int nv() const { return n + 1; }
    MultiPoly one() const { return MultiPoly::constant(Rational(1), nv()); }
    MultiPoly zero() const { return MultiPoly(nv()); }
    MultiPoly G() const { return MultiPoly::variable(0, nv()); }
    MultiPoly mu(int gamma) const { return gamma == 0 ? zero() : MultiPoly::variable(gamma, nv()); }
};

FormalSeries series_const(const MultiPoly& c, int T)
{
    return FormalSeries::constant(c, T);
}

// sinh(t)/t
FormalSeries sinhc(int T, int nv, Ring ring)
{
    FormalSeries u(0, T, nv, ring);
    for (int k = 0; k <= T; k += 2) u.set_coeff(k, MultiPoly::constant(Rational(1) / factorial(k + 1), nv, ring));
    return u;
}

// Exponent of the lambda-term of Omega (odd = false, n even) or of
// Omega_odd (odd = true, n odd), as  N(t) / sinh t  with
//   even: N = G[-2(1 + cosh t) + 4 cosh(t(1-mu_n)) - 8 sh^2 S_c - 4 D + 4 S_sh^2]
//   odd:  N = G[-2(cosh t - 1) + 8 sh^2 S_c - 4 D + 4 S_ch^2]
// sh = sinh(t(1-mu_n)/2).  Returned to order T.
FormalSeries exponent_series(int n, bool odd, int T)
{
    const MuRing R{n};
    const int T1 = T + 1;
    auto ch = [&](const MultiPoly& L) { return FormalSeries::cosh_of_scaled_t(L, T1); };
    auto sh = [&](const MultiPoly& L) { return FormalSeries::sinh_of_scaled_t(L, T1); };
    const MultiPoly half = MultiPoly::constant(make_rational(1, 2), R.nv());

    FormalSeries S_c = FormalSeries::zero(T1, R.nv(), Ring::Generic);
    FormalSeries S_h = S_c;   // S_sh (even) or S_ch (odd)
    FormalSeries D = S_c;
    FormalSeries B_even = S_c, B_odd = S_c;
    FormalSeries c_prev = ch(R.mu(0));
    FormalSeries d_prev = ch(R.one() - R.mu(0));
    S_c += c_prev;
    S_h += odd ? ch(half - R.mu(0)) : sh(half - R.mu(0));
    for (int k = 1; k <= n; ++k) {
        FormalSeries c = ch(R.mu(k));
        FormalSeries d = ch(R.one() - R.mu(k));
        FormalSeries h = odd ? ch(half - R.mu(k)) : sh(half - R.mu(k));
        if (k % 2 == 0) {
            S_c += c;
            S_h += h;
        } else {
            S_c -= c;
            S_h -= h;
        }
        const int beta = k - 1;
        D += (d - d_prev) * (beta % 2 == 1 ? B_even : B_odd);
        if (beta % 2 == 0) B_even += c_prev - c; else B_odd += c_prev - c;
        c_prev = c;
        d_prev = d;
    }
    FormalSeries sl = sh((R.one() - R.mu(n)) * make_rational(1, 2));
    FormalSeries cosh_t = ch(R.one());
    FormalSeries two = series_const(R.one() * Rational(2), T1);
    FormalSeries N(0, T1, R.nv(), Ring::Generic);
    FormalSeries four = series_const(R.one() * Rational(4), T1);
    FormalSeries eight = series_const(R.one() * Rational(8), T1);
    if (odd) {
        N = series_const(R.one() * Rational(-2), T1) * (cosh_t - series_const(R.one(), T1)) + eight * sl * sl * S_c
            - four * D + four * S_h * S_h;
    } else {
        N = series_const(R.one() * Rational(-2), T1) * (series_const(R.one(), T1) + cosh_t) + four * d_prev
            - eight * sl * sl * S_c - four * D + four * S_h * S_h;
    }
    N = N * series_const(R.G(), T1);
    if (N.valuation() < 2) throw std::logic_error("exponent numerator must vanish to second order");
    return N.shifted(-1).divided_by_unit(sinhc(T1, R.nv(), Ring::Generic)).truncated(T);
}

// ∫ over the ordered n-simplex of exp(exponent), coefficientwise, mapped to
// the Parity ring (tau, G, Delta).
FormalSeries integrated_term(int n, bool odd, int T)
{
    FormalSeries out = FormalSeries::zero(T, 3, Ring::Parity);
    if (T < 0) return out;
    FormalSeries E = exponent_series(n, odd, T);
    FormalSeries X = series_exp(E);
    std::vector<int> mu_exp(n);
    for (int k = 0; k <= T; ++k) {
        MultiPoly acc(3, Ring::Parity);
        const MultiPoly ck = X.coeff(k);
        for (const auto& [e, c] : ck.terms()) {
            for (int i = 0; i < n; ++i) mu_exp[i] = e[i + 1];
            acc.add_term({0, e[0], 0}, c * monomial_simplex_integral(mu_exp));
        }
        out.set_coeff(k, acc);
    }
    return out;
}

std::mutex taylor_mutex;
std::map<std::pair<int, bool>, std::vector<MultiPoly>> taylor_cache;

std::vector<MultiPoly> compute_taylor(int order, bool odd)
{
    FormalSeries sum = FormalSeries::zero(order, 3, Ring::Parity);
    for (int n = odd ? 1 : 0; n <= order; n += 2) {
        FormalSeries I = integrated_term(n, odd, order - n);
        MultiPoly dn = MultiPoly::monomial(Rational(1), {0, 0, n}, Ring::Parity);
        sum += I.scaled(dn).shifted(n).truncated(order);
    }
    MultiPoly G = MultiPoly::variable(GVar, 3, Ring::Parity);
    FormalSeries om = FormalSeries::exp_of_scaled_t(G, order) * sum;
    std::vector<MultiPoly> c(order + 1);
    for (int k = 0; k <= order; ++k) c[k] = om.coeff(k) * Rational(2);
    return c;
}

// (-1)^k k!/2-normalized coefficients of  w e^{-tau w} F(w) / (1 -+ e^{-w}).
FormalSeries generating(const std::vector<MultiPoly>& F, bool plus_sign, int T)
{
    FormalSeries f(0, T, 3, Ring::Parity);
    for (int k = 0; k <= T; ++k) f.set_coeff(k, F[k]);
    MultiPoly tau = MultiPoly::variable(TauVar, 3, Ring::Parity);
    FormalSeries e = FormalSeries::exp_of_scaled_t(-tau, T);
    // plus_sign: 1 + e^{-w}; otherwise (1 - e^{-w})/w.  Both are units.
    FormalSeries u(0, T, 3, Ring::Parity);
    MultiPoly m1 = MultiPoly::constant(Rational(-1), 3, Ring::Parity);
    FormalSeries em = FormalSeries::exp_of_scaled_t(m1, T + 1);
    if (plus_sign) {
        for (int k = 0; k <= T; ++k) u.set_coeff(k, (k == 0 ? MultiPoly::constant(Rational(1), 3, Ring::Parity) : MultiPoly(3, Ring::Parity)) + em.coeff(k));
        return (f * e).shifted(1).truncated(T).divided_by_unit(u);
    }
    for (int k = 0; k <= T; ++k) u.set_coeff(k, -em.coeff(k + 1));
    return (f * e).divided_by_unit(u);
}

} // namespace

std::vector<MultiPoly> omega_taylor(int order, bool odd)
{
    if (order < 0) throw DomainError("expansion order must be nonnegative");
    {
        std::lock_guard<std::mutex> lock(taylor_mutex);
        for (const auto& [key, val] : taylor_cache)
            if (key.second == odd && key.first >= order) return std::vector<MultiPoly>(val.begin(), val.begin() + order + 1);
    }
    auto c = compute_taylor(order, odd);
    std::lock_guard<std::mutex> lock(taylor_mutex);
    taylor_cache[{order, odd}] = c;
    return c;
}

MultiPoly parity_to_full(const MultiPoly& p)
{
    MultiPoly out(3, Ring::Full);
    for (const auto& [e, c] : p.terms()) {
        if (e[DVar] % 2 != 0) throw DomainError("polynomial is not even in Delta");
        out.add_term({e[0], e[1], e[2] / 2}, c);
    }
    return out;
}

RBPoly rb_polynomial(int k, Sector sector, const RBOptions& opt)
{
    if (k < 0) throw DomainError("RB index must be nonnegative");
    if (k > opt.max_k) throw DomainError("RB index above the configured maximum");
    if (opt.t_max < k) throw ConvergenceError("expansion order below the requested RB index; raise t_max");
    const int T = opt.t_max;
    auto om = omega_taylor(T, false);
    FormalSeries full = generating(om, false, T);
    MultiPoly coef = full.coeff(k);
    Rational norm = factorial(static_cast<unsigned>(k)) * ((k % 2 == 0) ? Rational(1) : Rational(-1));
    RBPoly r;
    r.k = k;
    r.sector = sector;
    if (sector == Sector::Full) {
        r.poly = parity_to_full(coef * (norm / 2));
        return r;
    }
    auto od = omega_taylor(T, true);
    FormalSeries odd = generating(od, true, T);
    MultiPoly c = sector == Sector::Plus ? coef - odd.coeff(k) : coef + odd.coeff(k);
    r.poly = c * (norm / 2);
    return r;
}

MultiPoly bernoulli_polynomial(int k)
{
    if (k < 0) throw DomainError("Bernoulli index must be nonnegative");
    // Bernoulli numbers B_j (B_1 = -1/2) from sum_{j<m} C(m+1, j) B_j = -(m+1) B_m.
    std::vector<Rational> B(k + 1);
    B[0] = 1;
    for (int m = 1; m <= k; ++m) {
        Rational s = 0;
        mpz_class binom = 1;   // C(m+1, j)
        for (int j = 0; j < m; ++j) {
            s += Rational(binom) * B[j];
            binom = binom * (m + 1 - j) / (j + 1);
        }
        B[m] = -s / (m + 1);
    }
    MultiPoly out(3, Ring::Full);
    mpz_class binom = 1;   // C(k, j)
    for (int j = 0; j <= k; ++j) {
        out.add_term({k - j, 0, 0}, Rational(binom) * B[j]);
        binom = binom * (k - j) / (j + 1);
    }
    return out;
}

std::string RBPoly::to_string() const
{
    if (sector == Sector::Full) return poly.to_string({"tau", "g^2", "Delta^2"});
    return poly.to_string({"tau", "g^2", "Delta"});
}

double RBPoly::evaluate(double tau, double g, double delta) const
{
    double v[3] = {tau, g * g, sector == Sector::Full ? delta * delta : delta};
    return poly.evaluate(std::span<const double>(v, 3));
}

} // namespace qrm

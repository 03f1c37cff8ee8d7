#include <doctest.h>

#include "qrm/errors.hpp"
#include "qrm/exponents.hpp"
#include "qrm/kernel.hpp"
#include "qrm/omega.hpp"
#include "qrm/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qrm;

namespace {

const cplx I(0.0, 1.0);
constexpr double sqrt2 = std::numbers::sqrt2;

OrderedTuple random_tuple(std::mt19937& rng, int lambda)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> m(lambda);
    for (double& v : m) v = u(rng);
    std::sort(m.begin(), m.end());
    return OrderedTuple(m);
}

double max_diff(const KernelMatrix& a, const std::array<cplx, 4>& b)
{
    double m = 0.0;
    for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(a.entry[i] - b[i]));
    return m;
}

cplx k0(double x, double y, double t, const ModelParams& p)
{
    return mehler_prefactor(x, y, TimePoint::heat(t), p, false);
}

} // namespace

TEST_CASE("exponent building blocks: trivial values")
{
    const ModelParams p(0.7, 0.4), p0(0.0, 0.4);
    const TimePoint t = TimePoint::heat(0.9);
    std::mt19937 rng(3);
    for (int lambda = 0; lambda <= 5; ++lambda) {
        const OrderedTuple mu = random_tuple(rng, lambda);
        CHECK(theta(lambda, mu, 0.4, -1.2, t, p0) == cplx(0.0));
        CHECK(std::abs(theta(lambda, mu, 0.0, 0.0, t, p)) == 0.0);
        CHECK(xi(lambda, mu, t, p0) == cplx(0.0));
        CHECK(psi(lambda, mu, t, -1, p0) == cplx(0.0));
    }
    const OrderedTuple none;
    CHECK(std::abs(theta(0, none, 0.3, 0.5, t, p) - sqrt2 * 0.7 * 0.8 * std::tanh(0.45)) < 1e-14);
    CHECK(std::abs(xi(0, none, t, p) + 4.0 * 0.49 * std::tanh(0.45)) < 1e-14);
    const OrderedTuple zero({0.0}), one({1.0});
    CHECK(std::abs(xi(1, zero, t, p)) < 1e-15);
    CHECK(std::abs(psi(1, zero, t, -1, p)) < 1e-15);
    CHECK(std::abs(psi(1, zero, t, +1, p)) < 1e-15);
    CHECK(std::abs(psi(1, one, t, -1, p) - 8.0 * 0.49 * std::tanh(0.45)) < 1e-14);
}

TEST_CASE("xi at lambda = 2, mu = (0.3, 0.7), t = 1, g = 1 against a direct evaluation")
{
    // Alternating-cosh term and the single (beta, alpha) = (1, 0) double-sum term.
    const double t = 1.0, m1 = 0.3, m2 = 0.7;
    const double alt = 1.0 - std::cosh(t * m1) + std::cosh(t * m2);
    const double sh = std::sinh(0.5 * t * (1.0 - m2));
    const double dbl = (std::cosh(t * (m2 - 1.0)) - std::cosh(t * (m1 - 1.0))) * (1.0 - std::cosh(t * m1));
    const double want = -8.0 / std::sinh(t) * sh * sh * alt - 4.0 / std::sinh(t) * dbl;
    const cplx got = xi(2, OrderedTuple({m1, m2}), TimePoint::heat(t), ModelParams(1.0, 0.0));
    CHECK(std::abs(got - want) < 1e-13);
}

TEST_CASE("property: Wick rotation of theta and xi")
{
    const ModelParams p(0.7, 0.4);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0), ut(0.1, 3.0);
    for (int rep = 0; rep < 40; ++rep) {
        const int lambda = rep % 6;
        const OrderedTuple mu = random_tuple(rng, lambda);
        const double x = u(rng), y = u(rng), t = ut(rng);
        const TimePoint it = TimePoint::heat(I * t);
        CHECK(std::abs(theta_bar(lambda, mu, x, y, t, p) - theta(lambda, mu, x, y, it, p)) < 1e-12);
        CHECK(std::abs(xi_bar(lambda, mu, t, p) - xi(lambda, mu, it, p)) < 1e-12);
    }
}

TEST_CASE("property: psi / g^2 does not depend on g, and exponents vanish as t -> 0")
{
    std::mt19937 rng(9);
    for (int lambda = 1; lambda <= 5; ++lambda) {
        const OrderedTuple mu = random_tuple(rng, lambda);
        const TimePoint t = TimePoint::heat(0.8);
        for (int sign : {-1, 1}) {
            const cplx a = psi(lambda, mu, t, sign, ModelParams(0.3, 0.4)) / 0.09;
            const cplx b = psi(lambda, mu, t, sign, ModelParams(1.3, 0.4)) / 1.69;
            CHECK(std::abs(a - b) < 1e-13 * std::max(1.0, std::abs(a)));
        }
        const ModelParams p(0.7, 0.4);
        for (double s : {1e-3, 1e-4}) {
            const TimePoint ts = TimePoint::heat(s);
            CHECK(std::abs(xi(lambda, mu, ts, p)) <= 10.0 * s);
            CHECK(std::abs(psi(lambda, mu, ts, -1, p)) <= 10.0 * s);
            // psi^+ enters only the odd-dimensional simplices of Omega_odd.
            if (lambda % 2 == 1) CHECK(std::abs(psi(lambda, mu, ts, +1, p)) <= 10.0 * s);
            CHECK(std::abs(theta(lambda, mu, 0.5, -0.3, ts, p)) <= 10.0 * s);
        }
    }
}

TEST_CASE("property: fast exponent evaluators agree with the defining sums")
{
    const ModelParams p(0.7, 0.4);
    std::mt19937 rng(13);
    const double x = 0.6, y = -1.1;
    for (cplx t : {cplx(0.7), cplx(2.3), cplx(0.5, 1.2)}) {
        HyperbolicExponents<cplx> h(t, p);
        for (int lambda = 1; lambda <= 7; ++lambda) {
            const OrderedTuple mu = random_tuple(rng, lambda);
            NodeExponents<cplx> e;
            h.eval(mu.mu, e, true);
            const TimePoint tp = TimePoint::heat(t);
            CHECK(std::abs(e.xi - xi(lambda, mu, tp, p)) < 1e-12);
            CHECK(std::abs(e.theta_x * x + e.theta_y * y - theta(lambda, mu, x, y, tp, p)) < 1e-12);
            CHECK(std::abs(e.psi_minus - psi(lambda, mu, tp, -1, p)) < 1e-12);
            CHECK(std::abs(e.psi_plus - psi(lambda, mu, tp, +1, p)) < 1e-12);
        }
    }
}

TEST_CASE("Mehler prefactor")
{
    const ModelParams p(0.7, 0.4);
    CHECK(std::abs(k0(0.3, -0.8, 1.1, p) - k0(-0.8, 0.3, 1.1, p)) < 1e-16);
    CHECK(k0(0.3, -0.8, 1.1, p) == k0(0.3, -0.8, 1.1, ModelParams(0.7, 0.0)));
    const double want = std::exp(0.5) / std::sqrt(2.0 * std::numbers::pi * std::sinh(1.0));
    CHECK(std::abs(k0(0.0, 0.0, 1.0, ModelParams(0.0, 0.0)) - want) < 1e-14);
    CHECK(want == doctest::Approx(0.606738).epsilon(1e-6));
}

TEST_CASE("heat kernel degenerations")
{
    const double x = 0.4, y = -0.9, t = 0.8;
    SUBCASE("g = 0")
    {
        const ModelParams p(0.0, 0.4);
        const cplx k = k0(x, y, t, p);
        const KernelMatrix m = heat_kernel(x, y, TimePoint::heat(t), p);
        CHECK(max_diff(m, {k * std::exp(-0.4 * t), 0.0, 0.0, k * std::exp(0.4 * t)}) < 1e-12);
        for (Parity par : {Parity::Plus, Parity::Minus}) {
            const cplx want = k * std::cosh(0.4 * t) - parity_sign(par) * k0(x, -y, t, p) * std::sinh(0.4 * t);
            CHECK(std::abs(heat_kernel_parity(x, y, TimePoint::heat(t), par, p).value - want) < 1e-12);
        }
    }
    SUBCASE("Delta = 0: displaced oscillator")
    {
        const ModelParams p(0.7, 0.0);
        const double th = sqrt2 * 0.7 * (x + y) * std::tanh(0.5 * t);
        const cplx base = k0(x, y, t, p) * std::exp(-2.0 * 0.49 * std::tanh(0.5 * t));
        const KernelMatrix m = heat_kernel(x, y, TimePoint::heat(t), p);
        CHECK(max_diff(m, {base * std::cosh(th), -base * std::sinh(th), -base * std::sinh(th), base * std::cosh(th)}) <
              1e-12);
        const cplx phi = base * std::exp(-th);
        for (Parity par : {Parity::Plus, Parity::Minus}) {
            const cplx v = heat_kernel_parity(x, y, TimePoint::heat(t), par, p).value;
            CHECK(std::abs(v - phi) < 1e-12);
        }
    }
}

TEST_CASE("heat kernel against the truncated-Fock expansion")
{
    const ModelParams p(0.7, 0.4);
    const double x = 0.3, y = -0.2, t = 0.8;
    const auto o = SpectralOracle(full_matrix(400, p)).heat_kernel(x, y, t);
    const KernelMatrix k = heat_kernel(x, y, TimePoint::heat(t), p);
    CHECK(max_diff(k, {o[0], o[1], o[2], o[3]}) < 1e-8);
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        const auto op = SpectralOracle(parity_matrix(400, par, p)).heat_kernel(1.1, 0.5, t);
        CHECK(std::abs(heat_kernel_parity(1.1, 0.5, TimePoint::heat(t), par, p).value - op[0]) < 1e-8);
    }
}

TEST_CASE("property: symmetry and positivity of the heat kernel")
{
    const ModelParams p(0.7, 0.4);
    KernelOptions opt;
    opt.radius = 2.0;
    KernelEvaluator ev(TimePoint::heat(1.3), p, opt);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 12; ++rep) {
        const double x = u(rng), y = u(rng);
        const KernelMatrix a = ev.full(x, y), b = ev.full(y, x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(a(i, j) - b(j, i)) < 1e-10);
        const KernelMatrix d = ev.full(x, x);
        CHECK(d(0, 0).real() > 0.0);
        CHECK(d(1, 1).real() > 0.0);
    }
}

TEST_CASE("property: trace of the heat kernel equals Z_+ + Z_-")
{
    const ModelParams p(0.7, 0.4);
    const double beta = 1.0, L = 9.0, h = 0.05;
    KernelOptions opt;
    opt.radius = L;
    KernelEvaluator ev(TimePoint::heat(beta), p, opt);
    double tr = 0.0;
    const int n = static_cast<int>(std::lround(2.0 * L / h));
    for (int i = 0; i <= n; ++i) {
        const KernelMatrix k = ev.full(-L + i * h, -L + i * h);
        tr += (i == 0 || i == n ? 0.5 : 1.0) * h * (k(0, 0) + k(1, 1)).real();
    }
    const double z = partition_parity(beta, Parity::Plus, p) + partition_parity(beta, Parity::Minus, p);
    CHECK(std::abs(tr - z) < 1e-7);
}

TEST_CASE("propagator degenerations and Wick rotation")
{
    const double x = 0.4, y = -0.9, t = 0.7;
    const ModelParams p0(0.0, 0.4), p(0.7, 0.4);
    const cplx u0 = mehler_prefactor(x, y, TimePoint::propagator(t), p0, true);
    const cplx u0m = mehler_prefactor(x, -y, TimePoint::propagator(t), p0, true);
    CHECK(max_diff(propagator(x, y, t, p0), {u0 * std::exp(-I * 0.4 * t), 0.0, 0.0, u0 * std::exp(I * 0.4 * t)}) < 1e-12);
    for (Parity par : {Parity::Plus, Parity::Minus}) {
        const cplx want = u0 * std::cos(0.4 * t) - parity_sign(par) * I * u0m * std::sin(0.4 * t);
        CHECK(std::abs(propagator_parity(x, y, t, par, p0).value - want) < 1e-12);
        CHECK(std::abs(propagator_parity(x, y, t, par, p).value -
                       heat_kernel_parity(x, y, TimePoint::heat(I * t), par, p).value) < 1e-10);
    }
    // Past the first caustic the continued square-root branch keeps U(t) = K(it).
    const KernelMatrix a = propagator(x, y, 4.0, p), b = heat_kernel(x, y, TimePoint::heat(I * 4.0), p);
    CHECK(max_diff(a, b.entry) < 1e-10);
}

TEST_CASE("domain errors")
{
    const ModelParams p(0.7, 0.4);
    CHECK_THROWS_AS(propagator(0.1, 0.2, std::numbers::pi, p), DomainError);
    CHECK_THROWS_AS(propagator(0.1, 0.2, std::numbers::pi + 5e-4, p), DomainError);
    CHECK_THROWS_AS(heat_kernel(0.1, 0.2, TimePoint::heat(-1.0), p), DomainError);
    CHECK_THROWS_AS(heat_kernel(0.1, 0.2, TimePoint::heat(cplx(-0.5, std::numbers::pi)), p), DomainError);
    CHECK_THROWS_AS(ModelParams(-0.1, 0.2), DomainError);
    CHECK_NOTHROW(heat_kernel(0.1, 0.2, TimePoint::heat(cplx(-0.5, 1.0)), p));
}

namespace {

// <x|alpha> for a coherent state of a^dag a.
cplx coherent(double x, cplx alpha)
{
    return std::pow(std::numbers::pi, -0.25) *
           std::exp(-0.5 * x * x + sqrt2 * alpha * x - 0.5 * alpha * alpha - 0.5 * std::norm(alpha));
}

SampledState sample(Sector sector, double L, int n, const std::function<cplx(double)>& f)
{
    SampledState s;
    s.L = L;
    s.n = n;
    s.sector = sector;
    s.up.resize(n);
    if (sector == Sector::Full) s.down.assign(n, 0.0);
    for (int i = 0; i < n; ++i) s.up[i] = f(s.x(i));
    return s;
}

} // namespace

TEST_CASE("evolution of states")
{
    SUBCASE("free oscillator rotates a coherent state")
    {
        const cplx alpha(1.0, 0.3);
        const double t = 0.9;
        const SampledState psi = sample(Sector::Plus, 8.0, 161, [&](double x) { return coherent(x, alpha); });
        const EvolveResult r = evolve_state(psi, t, ModelParams(0.0, 0.0));
        double err = 0.0;
        for (int i = 0; i < psi.n; ++i)
            err = std::max(err, std::abs(r.state.up[i] - coherent(psi.x(i), alpha * std::exp(-I * t))));
        CHECK(err < 1e-8);
        CHECK(std::abs(r.state.norm() - 1.0) < 1e-8);
    }
    SUBCASE("norm conservation at t = 0.5, L = 10, n = 801")
    {
        const SampledState psi = sample(Sector::Full, 10.0, 801, [](double x) { return coherent(x, cplx(0.7, -0.2)); });
        const EvolveResult r = evolve_state(psi, 0.5, ModelParams(0.7, 0.4));
        CHECK(std::abs(r.state.norm() - 1.0) < 1e-6);
    }
    SUBCASE("small times stay close to the initial state")
    {
        const SampledState psi = sample(Sector::Minus, 8.0, 201, [](double x) { return coherent(x, 0.5); });
        const double t = 1e-3;
        const EvolveResult r = evolve_state(psi, t, ModelParams(0.7, 0.4));
        double d2 = 0.0;
        for (int i = 0; i < psi.n; ++i) d2 += psi.h() * std::norm(r.state.up[i] - psi.up[i]);
        const double d = std::sqrt(d2);
        CHECK(d < 10.0 * t);
        CHECK(d > 0.01 * t);
    }
}

#pragma once

#include "qrm/exponents.hpp"
#include "qrm/params.hpp"
#include "qrm/simplex.hpp"

#include <array>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

namespace qrm {

struct KernelOptions {
    double tol = 1e-10;        // relative target for truncation and quadrature
    int lambda_cap = 40;
    // Rules are planned for |x|, |y| <= radius.  0 means: use the point.
    double radius = 0.0;
    int gl_max_dim = 6;        // Gauss–Legendre up to this simplex dimension
    std::size_t gl_budget = 300000;       // nodes per GL term
    std::size_t qmc_max = std::size_t{1} << 18;
};

// 2x2 kernel value in the sigma_z basis, up first:
//   entry[0] = (up,up), [1] = (up,down), [2] = (down,up), [3] = (down,down).
struct KernelMatrix {
    std::array<cplx, 4> entry{};
    std::array<int, 4> terms_used{};
    std::array<double, 4> tail_estimate{};

    cplx operator()(int i, int j) const { return entry[2 * i + j]; }
};

struct KernelScalar {
    cplx value;
    int terms_used = 0;
    double tail_estimate = 0.0;
};

// One lambda-term of the series: quadrature nodes with the exponent data
// needed to evaluate the integrand at any (x, y).
struct TermTable {
    int lambda = 0;
    RulePtr rule;
    std::vector<cplx> weight;    // w_k exp(P_k)
    std::vector<cplx> theta_x;   // theta = theta_x x + theta_y y
    std::vector<cplx> theta_y;
    double quad_error = 0.0;     // estimated absolute error of the term
};

// Lazily built sequence of term tables for one time t.  Thread-safe.
class KernelSeries {
public:
    // Heat form at complex t (t in the heat domain), or circular form at
    // real t when `rotated` is set.  Planning always uses the heat-domain
    // time (i t for the rotated form), so both forms pick identical rules.
    KernelSeries(cplx t, bool rotated, const ModelParams& p, const KernelOptions& opt, double radius);

    const TermTable& term(int lambda) const;
    // (t Delta)^lambda, with t -> i t in the rotated form.
    cplx power(int lambda) const;
    cplx heat_time() const { return t_heat_; }
    const KernelOptions& options() const { return opt_; }
    const ModelParams& params() const { return p_; }
    bool rotated() const { return rotated_; }

private:
    void build(int lambda) const;

    cplx t_heat_;
    double t_real_;
    bool rotated_;
    ModelParams p_;
    KernelOptions opt_;
    double radius_;
    mutable std::mutex mutex_;
    mutable std::vector<std::unique_ptr<TermTable>> terms_;
    mutable double scale_ = 0.0;   // magnitude of the lambda = 0 term
};

// Evaluator for many points at a fixed time.
class KernelEvaluator {
public:
    KernelEvaluator(const TimePoint& t, const ModelParams& p, const KernelOptions& opt = {});
    KernelMatrix full(double x, double y) const;
    KernelScalar parity(double x, double y, Parity parity) const;
    const KernelSeries& series() const { return *series_; }

private:
    cplx prefactor(double x, double y) const;

    TimePoint t_;
    ModelParams p_;
    KernelOptions opt_;
    std::shared_ptr<KernelSeries> series_;
};

KernelMatrix heat_kernel(double x, double y, const TimePoint& t, const ModelParams& p, const KernelOptions& opt = {});
KernelScalar heat_kernel_parity(double x, double y, const TimePoint& t, Parity parity, const ModelParams& p,
                                const KernelOptions& opt = {});
KernelMatrix propagator(double x, double y, double t, const ModelParams& p, const KernelOptions& opt = {});
KernelScalar propagator_parity(double x, double y, double t, Parity parity, const ModelParams& p,
                               const KernelOptions& opt = {});

// Sampled state on the uniform grid x_i = -L + i h, h = 2L/(n-1).
struct SampledState {
    double L = 0.0;
    int n = 0;
    Sector sector = Sector::Full;
    std::vector<cplx> up;      // full: spin-up component; parity: the state
    std::vector<cplx> down;    // full only
    double norm() const;       // trapezoid L2 norm
    double h() const { return 2.0 * L / (n - 1); }
    double x(int i) const { return -L + i * h(); }
};

struct EvolveResult {
    SampledState state;
    double norm_drift = 0.0;   // | ||psi_t|| - ||psi_0|| |
};

// psi(x, t) = ∫ U(x, y, t) psi_0(y) dy by the trapezoid rule on the grid.
// Throws ConvergenceError when the norm drifts by more than max_drift.
EvolveResult evolve_state(const SampledState& initial, double t, const ModelParams& p,
                          const KernelOptions& opt = {}, double max_drift = 1e-3);

} // namespace qrm

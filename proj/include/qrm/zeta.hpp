#pragma once

#include "qrm/exponents.hpp"
#include "qrm/params.hpp"

#include <vector>

namespace qrm {

// Hankel contour: ray from +infinity to r above the cut, the circle |w| = r
// counterclockwise, and back below the cut.
struct HankelContour {
    double r = 1.0;          // 0 < r < pi
    double W = 0.0;          // ray truncation; 0 chooses it from the integrand bound
    int ray_nodes = 60;      // Gauss-Legendre nodes in log(rho) per ray
    int circle_nodes = 64;   // Gauss-Legendre nodes on the circle
    void validate() const;
};

struct ZetaOptions {
    double tol = 1e-10;
    HankelContour contour;
    double mellin_split = 1.5;   // tanh-sinh and Gauss-Legendre on [0, a], a ray beyond
    int mellin_tail_nodes = 52;
};

struct ZetaValue {
    cplx value;
    double error = 0.0;
    double W = 0.0;          // largest ray node that contributed
};

// Spectral zeta function  sum_j (lambda_j + tau)^{-s}  of H_Rabi (Sector::Full)
// or H_pm, through Omega and Omega_odd.  Omega values are cached per node for
// the whole process, so repeated evaluations at other s, tau or sectors are
// cheap.  Requires Re tau > g^2 + Delta.
class SpectralZeta {
public:
    SpectralZeta(const ModelParams& p, Sector sector, const ZetaOptions& opt = {});

    // Any s except the positive integers >= 2, which go to mellin().
    ZetaValue contour(cplx s, cplx tau) const;
    // Re s > 1.
    ZetaValue mellin(cplx s, cplx tau) const;
    // d/ds zeta(s; tau) at s = 0, differentiating under the contour integral.
    ZetaValue derivative_at_zero(cplx tau) const;
    // The same by Richardson-extrapolated central differences (self-check).
    ZetaValue derivative_at_zero_fd(cplx tau, double h = 1e-3) const;

    const ModelParams& params() const { return p_; }
    Sector sector() const { return sector_; }
    const ZetaOptions& options() const { return opt_; }

private:
    struct Node {
        double rho;
        double weight;
    };
    // F(w) = e^{-tau w} [Omega/(1 - e^{-w})]  (full) or the parity combination,
    // without the e^{-tau w} factor; `rel` is the relative accuracy wanted.
    cplx kernel(cplx w, double rel, double* err) const;
    void check_tau(cplx tau) const;
    // ∫_a^∞ rho^{s-1} F(rho) e^{-tau rho} drho on n nodes.
    ZetaValue ray(cplx s, cplx tau, double a, int n, double target) const;
    // ∮ on the circle: returns C(s) and, when dC is set, dC/ds.
    cplx circle(cplx s, cplx tau, cplx* dC) const;

    ModelParams p_;
    Sector sector_;
    ZetaOptions opt_;
};

cplx zeta_contour(cplx s, cplx tau, const ModelParams& p, const HankelContour& c = {}, Sector sector = Sector::Full,
                  double tol = 1e-10);
cplx zeta_mellin(cplx s, cplx tau, const ModelParams& p, double tol = 1e-10, Sector sector = Sector::Full);

struct Determinant {
    cplx value;              // exp(-zeta'(0; tau))
    cplx log_value;          // -zeta'(0; tau)
    double error = 0.0;      // estimated error of log_value
    double fd_discrepancy = 0.0;   // |analytic - finite difference| of zeta'(0)
};

// Zeta-regularized det(tau + H) for Re tau > g^2 + Delta, the window where the
// contour representation converges.  Outside it there is no validated
// continuation and a ConvergenceError is raised.  Full = product of parities.
Determinant spectral_determinant(cplx tau, Sector sector, const ModelParams& p, double tol = 1e-10);

} // namespace qrm

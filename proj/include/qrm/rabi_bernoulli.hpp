#pragma once

#include "qrm/params.hpp"
#include "qrm/rational.hpp"

#include <string>
#include <vector>

namespace qrm {

// Variable order of every Full/Parity polynomial.
enum RBVar { TauVar = 0, GVar = 1, DVar = 2 };

// Exact Taylor coefficients c_0..c_order of Omega(w) (odd = false) or
// Omega_odd(w) (odd = true), as polynomials in (tau, G = g^2, Delta) in the
// Parity ring; tau does not occur.  Results are cached.
std::vector<MultiPoly> omega_taylor(int order, bool odd);

struct RBOptions {
    int max_k = 10;
    int t_max = 12;     // order of the exact w-expansion; must reach k
};

struct RBPoly {
    MultiPoly poly;     // Full: (tau, G, Delta^2);  Plus/Minus: (tau, G, Delta)
    int k = 0;
    Sector sector = Sector::Full;

    std::string to_string() const;
    double evaluate(double tau, double g, double delta) const;
};

RBPoly rb_polynomial(int k, Sector sector = Sector::Full, const RBOptions& opt = {});

// B_k(tau) as a Full-ring polynomial (exact, from the Bernoulli numbers).
MultiPoly bernoulli_polynomial(int k);

// Parity-ring polynomial even in Delta  ->  Full ring with D = Delta^2.
MultiPoly parity_to_full(const MultiPoly& p);

} // namespace qrm

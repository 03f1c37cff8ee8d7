#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qrm {

enum class Parity { Plus, Minus };
// Which Hamiltonian a quantity refers to: H_Rabi or one parity block.
enum class Sector { Full, Plus, Minus };

inline double parity_sign(Parity p) { return p == Parity::Plus ? 1.0 : -1.0; }

// H = a^dag a + Delta sigma_z + g (a + a^dag) sigma_x   (omega = 1)
struct ModelParams {
    double g = 0.0;
    double delta = 0.0;

    ModelParams() = default;
    ModelParams(double g_, double delta_);   // validates g, delta >= 0
    void validate() const;
};

// Time argument with the domain it is meant for.
struct TimePoint {
    enum class Domain {
        Heat,        // C minus the cuts {a + i pi n : a <= 0}
        Omega,       // Re t > 0 or |t| < pi
        Propagator   // real t not in pi Z
    };

    std::complex<double> t;
    Domain domain = Domain::Heat;

    static TimePoint heat(std::complex<double> t) { return {t, Domain::Heat}; }
    static TimePoint omega(std::complex<double> t) { return {t, Domain::Omega}; }
    static TimePoint propagator(double t) { return {std::complex<double>(t, 0.0), Domain::Propagator}; }

    // Throws DomainError if t is outside its domain.  `guard` is the minimal
    // distance to pi Z accepted for propagator times.
    void check(double guard = 1e-3) const;
};

// Ordered tuple 0 <= mu_1 <= ... <= mu_lambda <= 1; mu_0 = 0 is implicit.
struct OrderedTuple {
    std::vector<double> mu;

    OrderedTuple() = default;
    explicit OrderedTuple(std::vector<double> m);   // validates ordering
    int lambda() const { return static_cast<int>(mu.size()); }
    // mu_gamma with the mu_0 = 0 convention, gamma = 0..lambda.
    double operator[](int gamma) const { return gamma == 0 ? 0.0 : mu[gamma - 1]; }
};

bool in_heat_domain(std::complex<double> t);
bool in_omega_domain(std::complex<double> w);

} // namespace qrm

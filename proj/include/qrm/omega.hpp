#pragma once

#include "qrm/exponents.hpp"
#include "qrm/params.hpp"

#include <cstddef>

namespace qrm {

struct OmegaOptions {
    double tol = 1e-12;                     // relative target
    int lambda_cap = 60;                    // largest simplex dimension
    int gl_max_dim = 6;
    std::size_t gl_budget = 400000;
    std::size_t qmc_max = std::size_t{1} << 18;
    // Below this |w| the exact Taylor expansion replaces the series, whose
    // exponents cancel to O(1/w) there.
    double taylor_radius = 0.2;
    // Return 2e^{g^2 w} (Delta = 0) and 2cosh/2sinh(w Delta) (g = 0) directly.
    // Off, those cases run through the general series as well.
    bool closed_forms = true;
};

struct OmegaValue {
    cplx value;
    double error = 0.0;      // estimated absolute error
    int terms = 0;           // simplex dimensions summed
};

// Omega(w) = 2 e^{g^2 w} sum_lambda (w Delta)^{2 lambda} ∫ exp(E_{2 lambda}) ,
// Omega_odd(w) = 2 e^{g^2 w} sum_lambda (w Delta)^{2 lambda + 1} ∫ exp(E'_{2 lambda + 1}).
// w in the half-plane Re w > 0 or the disc |w| < pi.
OmegaValue omega_value(cplx w, bool odd, const ModelParams& p, const OmegaOptions& opt = {});

cplx omega(cplx w, const ModelParams& p, double tol = 1e-12);
cplx omega_odd(cplx w, const ModelParams& p, double tol = 1e-12);

// Normalization of the partition functions.  Omega is Z = Omega/(1 - e^{-beta});
// Literal evaluates the printed hyperbolic prefactors e^{beta(g^2+1)}/sinh(beta)
// (and /2cosh(beta) for the odd part), kept for comparison only.
enum class Normalization { Omega, Literal };

struct PartitionValue {
    double value = 0.0;
    double error = 0.0;
};

PartitionValue partition_value(double beta, Sector sector, const ModelParams& p, double tol = 1e-12,
                               Normalization norm = Normalization::Omega);
PartitionValue partition_value(double beta, Sector sector, const ModelParams& p, const OmegaOptions& opt,
                               Normalization norm = Normalization::Omega);

double partition(double beta, const ModelParams& p, double tol = 1e-12);
double partition_parity(double beta, Parity parity, const ModelParams& p, double tol = 1e-12);

} // namespace qrm

#pragma once

#include "qrm/params.hpp"

#include <vector>

namespace qrm {

// K_0(x) .. K_nmax(x) of  n K_n = f_{n-1} K_{n-1} - K_{n-2},  K_0 = 1, K_1 = f_0,
// f_n(x) = 2g + (n - x + Delta^2/(x - n)) / (2g).
struct GCoeffs {
    double x = 0.0;
    std::vector<double> K;
    ModelParams params;
};

double f_coeff(int n, double x, const ModelParams& p);

// Requires g > 0 and x not an integer in [0, nmax].
GCoeffs coeff_K(double x, int nmax, const ModelParams& p);

struct GOptions {
    double tol = 1e-15;   // terms below tol * max(1, |partial sum|) count as small
    int nmax = 200;       // series cap; five small terms in a row stop earlier
};

struct GValue {
    double value = 0.0;
    int terms = 0;
    bool ill_conditioned = false;   // |x - n| < 1e-3 for some integer n >= 0
};

// G_pm(x) = sum_n K_n(x) (1 -+ Delta/(x - n)) g^n.
GValue g_function_value(double x, Parity parity, const ModelParams& p, const GOptions& opt = {});
double g_function(double x, Parity parity, const ModelParams& p, const GOptions& opt = {});
// The same for any real Delta (negative values included).
GValue g_function_value(double x, Parity parity, double g, double delta, const GOptions& opt = {});
double g_function(double x, Parity parity, double g, double delta, const GOptions& opt = {});

// K_N(N; g, Delta); its zeros in (g, Delta) carry the Juddian eigenvalue N - g^2.
double constraint_K(int N, const ModelParams& p);

// G^(N)_pm = -+2(N+1)/Delta + sum_{n > N} K_n(N) (1 -+ Delta/(N - n)) g^{n-N-1},
// K_N(N) = 0, K_{N+1}(N) = 1.  Requires Delta > 0.
double g_exceptional(int N, Parity parity, const ModelParams& p, const GOptions& opt = {});
double g_exceptional(int N, Parity parity, double g, double delta, const GOptions& opt = {});

// Res_{x=N} G_pm = Delta^2 g^N / (2(N+1)) K_N(N) G^(N)_pm.
double residue_at(int N, Parity parity, const ModelParams& p, const GOptions& opt = {});

// G_pm(x) / Gamma(-x), entire.  Within 1e-3 of an integer N >= 0 it is evaluated
// as [(x - N) G(x)] [1 / ((x - N) Gamma(-x))], and at x = N as (-1)^{N+1} N! Res.
double complete_g(double x, Parity parity, const ModelParams& p, const GOptions& opt = {});
// The near-integer form at any x (it is exact, only its conditioning varies).
double complete_g_near(double x, int N, Parity parity, const ModelParams& p, const GOptions& opt = {});

enum class EigenClass { Regular, Juddian, NonJuddianExceptional };

struct EigenvalueRecord {
    double lambda = 0.0;
    double x = 0.0;          // lambda + g^2
    Parity parity = Parity::Plus;
    EigenClass classification = EigenClass::Regular;
    double residual = 0.0;   // |complete_g| at the refined root
};

struct EigenSearch {
    double x_lo = 0.0;
    double x_hi = 10.0;
    double grid_step = 0.02;
    double tol = 1e-10;      // bracket width in x
    int threads = 0;         // 0: hardware concurrency
};

// Sign changes of complete_g on the grid, refined by bisection.  Ascending in lambda.
std::vector<EigenvalueRecord> find_eigenvalues(Parity parity, const ModelParams& p, const EigenSearch& s = {},
                                               const GOptions& opt = {});

const char* to_string(EigenClass c);

} // namespace qrm

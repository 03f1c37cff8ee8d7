#pragma once

#include <complex>
#include <functional>

namespace qrm {

struct SeriesValue {
    std::complex<double> value;
    int terms_used = 0;
    double tail_estimate = 0.0;
};

// Stopping rule shared by every lambda-series: stop after two consecutive
// terms whose magnitude is below tol * |running sum|.  The tail estimate
// extrapolates the decay ratio of the last two nonzero terms.
class SeriesStopper {
public:
    SeriesStopper(double tol, int cap);

    // Feed the magnitude of term lambda and the magnitude of the partial
    // sum including it; returns true when summation may stop.
    bool push(double term_magnitude, double sum_magnitude);

    int terms() const { return terms_; }
    int cap() const { return cap_; }
    double tail_estimate() const;
    bool exhausted() const { return terms_ >= cap_; }

private:
    double tol_;
    int cap_;
    int terms_ = 0;
    int small_run_ = 0;
    double last_ = 0.0;
    double prev_ = 0.0;
};

// Sum term(0), term(1), ... with the stopping rule above.  Throws
// ConvergenceError when the cap is reached with the last term too large.
SeriesValue sum_lambda_series(const std::function<std::complex<double>(int)>& term, double tol, int cap = 40);

} // namespace qrm

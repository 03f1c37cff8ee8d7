#include "qrm/series.hpp"

#include "qrm/errors.hpp"

#include <cmath>
#include <string>

namespace qrm {

SeriesStopper::SeriesStopper(double tol, int cap) : tol_(tol), cap_(cap)
{
    if (!(tol > 0.0)) throw DomainError("series tolerance must be positive");
    if (cap < 1) throw DomainError("series cap must be at least 1");
}

bool SeriesStopper::push(double term_magnitude, double sum_magnitude)
{
    ++terms_;
    if (term_magnitude > 0.0 || last_ > 0.0) {
        prev_ = last_;
        last_ = term_magnitude;
    }
    if (term_magnitude <= tol_ * sum_magnitude || term_magnitude == 0.0)
        ++small_run_;
    else
        small_run_ = 0;
    return small_run_ >= 2;
}

double SeriesStopper::tail_estimate() const
{
    if (last_ == 0.0) return 0.0;
    if (prev_ > 0.0) {
        double r = last_ / prev_;
        if (r < 1.0) return last_ * r / (1.0 - r);
    }
    return last_;
}

SeriesValue sum_lambda_series(const std::function<std::complex<double>(int)>& term, double tol, int cap)
{
    SeriesStopper stop(tol, cap);
    SeriesValue out;
    std::complex<double> sum = 0.0;
    for (int lambda = 0; lambda < cap; ++lambda) {
        std::complex<double> a = term(lambda);
        sum += a;
        if (stop.push(std::abs(a), std::abs(sum))) {
            out.value = sum;
            out.terms_used = stop.terms();
            out.tail_estimate = stop.tail_estimate();
            return out;
        }
    }
    throw ConvergenceError("lambda-series reached its cap of " + std::to_string(cap) + " terms without converging");
}

} // namespace qrm

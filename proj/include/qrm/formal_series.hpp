#pragma once

#include "qrm/rational.hpp"

#include <vector>

namespace qrm {

// Truncated Laurent series  sum_{k=min_degree}^{t_max} c_k t^k  with
// MultiPoly coefficients.  Coefficients above t_max are unknown; every
// operation shrinks t_max to what its inputs determine.
class FormalSeries {
public:
    FormalSeries() = default;
    FormalSeries(int min_degree, int t_max, int nvars, MultiPoly::Ring ring);

    static FormalSeries zero(int t_max, int nvars, MultiPoly::Ring ring);
    static FormalSeries constant(const MultiPoly& c, int t_max);
    // sum_j (L t)^j / j!  with L a polynomial (usually linear in the variables).
    static FormalSeries exp_of_scaled_t(const MultiPoly& L, int t_max);
    static FormalSeries cosh_of_scaled_t(const MultiPoly& L, int t_max);
    static FormalSeries sinh_of_scaled_t(const MultiPoly& L, int t_max);

    int min_degree() const { return min_deg_; }
    int t_max() const { return t_max_; }
    int nvars() const { return nvars_; }
    MultiPoly::Ring ring() const { return ring_; }

    // Coefficient of t^k; zero below min_degree, throws above t_max.
    MultiPoly coeff(int k) const;
    void set_coeff(int k, MultiPoly c);
    // Lowest degree with a nonzero coefficient (t_max + 1 if none).
    int valuation() const;
    bool has_pole() const { return valuation() < 0; }

    FormalSeries truncated(int t_max) const;
    // Multiply by t^k.
    FormalSeries shifted(int k) const;
    FormalSeries scaled(const MultiPoly& c) const;

    FormalSeries& operator+=(const FormalSeries& o);
    FormalSeries& operator-=(const FormalSeries& o);
    friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
    friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
    friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b);

    // Division by a unit: u must have min degree 0 and a nonzero rational
    // constant leading coefficient.
    FormalSeries divided_by_unit(const FormalSeries& u) const;

private:
    int min_deg_ = 0;
    int t_max_ = -1;
    int nvars_ = 0;
    MultiPoly::Ring ring_ = MultiPoly::Ring::Generic;
    std::vector<MultiPoly> c_;   // c_[i] multiplies t^(min_deg_ + i)
};

// Termwise exponential.  Requires a zero pole part and a zero constant term
// (so that every coefficient stays rational).
FormalSeries series_exp(const FormalSeries& s);

} // namespace qrm

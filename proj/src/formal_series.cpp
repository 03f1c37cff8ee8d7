#include "qrm/formal_series.hpp"

#include "qrm/errors.hpp"

#include <algorithm>

namespace qrm {

FormalSeries::FormalSeries(int min_degree, int t_max, int nvars, MultiPoly::Ring ring)
    : min_deg_(min_degree), t_max_(t_max), nvars_(nvars), ring_(ring)
{
    if (t_max >= min_degree)
        c_.assign(static_cast<std::size_t>(t_max - min_degree + 1), MultiPoly(nvars, ring));
}

FormalSeries FormalSeries::zero(int t_max, int nvars, MultiPoly::Ring ring)
{
    return FormalSeries(0, t_max, nvars, ring);
}

FormalSeries FormalSeries::constant(const MultiPoly& c, int t_max)
{
    FormalSeries s(0, t_max, c.nvars(), c.ring());
    if (t_max >= 0) s.c_[0] = c;
    return s;
}

FormalSeries FormalSeries::exp_of_scaled_t(const MultiPoly& L, int t_max)
{
    FormalSeries s(0, t_max, L.nvars(), L.ring());
    MultiPoly power = MultiPoly::constant(Rational(1), L.nvars(), L.ring());
    for (int j = 0; j <= t_max; ++j) {
        if (j > 0) power = power * L;
        s.c_[j] = power * (Rational(1) / factorial(j));
    }
    return s;
}

FormalSeries FormalSeries::cosh_of_scaled_t(const MultiPoly& L, int t_max)
{
    FormalSeries s = exp_of_scaled_t(L, t_max);
    for (int j = 1; j <= t_max; j += 2) s.c_[j] = MultiPoly(L.nvars(), L.ring());
    return s;
}

FormalSeries FormalSeries::sinh_of_scaled_t(const MultiPoly& L, int t_max)
{
    FormalSeries s = exp_of_scaled_t(L, t_max);
    for (int j = 0; j <= t_max; j += 2) s.c_[j] = MultiPoly(L.nvars(), L.ring());
    return s;
}

MultiPoly FormalSeries::coeff(int k) const
{
    if (k > t_max_) throw DomainError("series coefficient requested beyond truncation order");
    if (k < min_deg_) return MultiPoly(nvars_, ring_);
    return c_[static_cast<std::size_t>(k - min_deg_)];
}

void FormalSeries::set_coeff(int k, MultiPoly c)
{
    if (k > t_max_ || k < min_deg_) throw DomainError("series coefficient index out of range");
    if (c.nvars() != nvars_ || c.ring() != ring_) throw DomainError("coefficient ring mismatch");
    c_[static_cast<std::size_t>(k - min_deg_)] = std::move(c);
}

int FormalSeries::valuation() const
{
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return min_deg_ + static_cast<int>(i);
    return t_max_ + 1;
}

FormalSeries FormalSeries::truncated(int t_max) const
{
    int tm = std::min(t_max, t_max_);
    FormalSeries r(min_deg_, tm, nvars_, ring_);
    for (int k = min_deg_; k <= tm; ++k) r.c_[k - min_deg_] = coeff(k);
    return r;
}

FormalSeries FormalSeries::shifted(int k) const
{
    FormalSeries r = *this;
    r.min_deg_ += k;
    r.t_max_ += k;
    return r;
}

FormalSeries FormalSeries::scaled(const MultiPoly& c) const
{
    FormalSeries r = *this;
    for (auto& p : r.c_) p = p * c;
    return r;
}

FormalSeries& FormalSeries::operator+=(const FormalSeries& o)
{
    if (o.nvars_ != nvars_ || o.ring_ != ring_) throw DomainError("series ring mismatch");
    int lo = std::min(min_deg_, o.min_deg_);
    int hi = std::min(t_max_, o.t_max_);
    FormalSeries r(lo, hi, nvars_, ring_);
    for (int k = lo; k <= hi; ++k) r.c_[k - lo] = coeff(k) + o.coeff(k);
    *this = std::move(r);
    return *this;
}

FormalSeries& FormalSeries::operator-=(const FormalSeries& o)
{
    if (o.nvars_ != nvars_ || o.ring_ != ring_) throw DomainError("series ring mismatch");
    int lo = std::min(min_deg_, o.min_deg_);
    int hi = std::min(t_max_, o.t_max_);
    FormalSeries r(lo, hi, nvars_, ring_);
    for (int k = lo; k <= hi; ++k) r.c_[k - lo] = coeff(k) - o.coeff(k);
    *this = std::move(r);
    return *this;
}

FormalSeries operator*(const FormalSeries& a, const FormalSeries& b)
{
    if (a.nvars_ != b.nvars_ || a.ring_ != b.ring_) throw DomainError("series ring mismatch");
    int lo = a.min_deg_ + b.min_deg_;
    // a is known through a.t_max, b starts at b.min_deg (and vice versa).
    int hi = std::min(a.t_max_ + b.min_deg_, b.t_max_ + a.min_deg_);
    FormalSeries r(lo, hi, a.nvars_, a.ring_);
    for (int i = a.min_deg_; i <= a.t_max_; ++i) {
        const MultiPoly& ai = a.c_[i - a.min_deg_];
        if (ai.is_zero()) continue;
        for (int j = b.min_deg_; i + j <= hi && j <= b.t_max_; ++j) {
            const MultiPoly& bj = b.c_[j - b.min_deg_];
            if (bj.is_zero()) continue;
            r.c_[i + j - lo] += ai * bj;
        }
    }
    return r;
}

FormalSeries FormalSeries::divided_by_unit(const FormalSeries& u) const
{
    if (u.min_deg_ != 0 || u.t_max_ < 0) throw DomainError("divisor is not a unit series");
    const MultiPoly& u0 = u.c_[0];
    if (!u0.is_constant() || u0.is_zero()) throw DomainError("divisor has no invertible constant term");
    Rational inv = Rational(1) / u0.constant_term();
    int hi = std::min(t_max_, min_deg_ + u.t_max_);
    FormalSeries q(min_deg_, hi, nvars_, ring_);
    // a = q*u  =>  q_k = (a_k - sum_{j>=1} u_j q_{k-j}) / u_0
    for (int k = min_deg_; k <= hi; ++k) {
        MultiPoly acc = coeff(k);
        for (int j = 1; j <= k - min_deg_; ++j) {
            const MultiPoly& uj = u.c_[j];
            if (uj.is_zero()) continue;
            acc -= uj * q.c_[k - j - min_deg_];
        }
        q.c_[k - min_deg_] = acc * inv;
    }
    return q;
}

FormalSeries series_exp(const FormalSeries& s)
{
    if (s.has_pole()) throw DomainError("series_exp: nonzero pole part");
    if (s.t_max() < 0) throw DomainError("series_exp: empty series");
    if (!s.coeff(0).is_zero()) throw DomainError("series_exp: nonzero constant term has no rational exponential");
    int T = s.t_max();
    FormalSeries r(0, T, s.nvars(), s.ring());
    std::vector<MultiPoly> c(T + 1, MultiPoly(s.nvars(), s.ring()));
    c[0] = MultiPoly::constant(Rational(1), s.nvars(), s.ring());
    // E' exp(E) = exp(E)'  =>  k c_k = sum_{j=1}^{k} j e_j c_{k-j}
    for (int k = 1; k <= T; ++k) {
        MultiPoly acc(s.nvars(), s.ring());
        for (int j = 1; j <= k; ++j) {
            MultiPoly ej = s.coeff(j);
            if (ej.is_zero() || c[k - j].is_zero()) continue;
            acc += (ej * c[k - j]) * Rational(j);
        }
        c[k] = acc * make_rational(1, k);
    }
    for (int k = 0; k <= T; ++k) r.set_coeff(k, c[k]);
    return r;
}

} // namespace qrm

#include "qrm/rational.hpp"

#include "qrm/errors.hpp"

#include <sstream>
#include <stdexcept>

namespace qrm {

Rational make_rational(long p, long q)
{
    if (q == 0) throw DomainError("rational with zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

Rational parse_rational(const std::string& s)
{
    Rational r;
    if (r.set_str(s, 10) != 0) throw DomainError("not a rational: " + s);
    if (r.get_den() == 0) throw DomainError("rational with zero denominator");
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r)
{
    return r.get_str(10);
}

Rational factorial(unsigned n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

MultiPoly::MultiPoly(int nvars, Ring ring) : nvars_(nvars), ring_(ring)
{
    if (nvars < 0) throw DomainError("negative variable count");
}

MultiPoly MultiPoly::constant(const Rational& c, int nvars, Ring ring)
{
    MultiPoly p(nvars, ring);
    p.add_term(Exponents(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int index, int nvars, Ring ring)
{
    if (index < 0 || index >= nvars) throw DomainError("variable index out of range");
    MultiPoly p(nvars, ring);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.add_term(e, Rational(1));
    return p;
}

MultiPoly MultiPoly::monomial(const Rational& c, Exponents e, Ring ring)
{
    MultiPoly p(static_cast<int>(e.size()), ring);
    p.add_term(e, c);
    return p;
}

Rational MultiPoly::coefficient(const Exponents& e) const
{
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational MultiPoly::constant_term() const
{
    return coefficient(Exponents(nvars_, 0));
}

bool MultiPoly::is_constant() const
{
    return terms_.empty() || (terms_.size() == 1 && terms_.count(Exponents(nvars_, 0)) == 1);
}

int MultiPoly::degree(int var) const
{
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
}

int MultiPoly::total_degree() const
{
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int k : e) s += k;
        d = std::max(d, s);
    }
    return d;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c)
{
    if (static_cast<int>(e.size()) != nvars_) throw DomainError("exponent tuple has wrong length");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void MultiPoly::check_compatible(const MultiPoly& o) const
{
    if (nvars_ != o.nvars_ || ring_ != o.ring_)
        throw DomainError("polynomial arithmetic across different rings");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o)
{
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o)
{
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b)
{
    a.check_compatible(b);
    MultiPoly r(a.nvars_, a.ring_);
    if (a.is_zero() || b.is_zero()) return r;
    MultiPoly::Exponents e(a.nvars_);
    Rational prod;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (int k = 0; k < a.nvars_; ++k) e[k] = ea[k] + eb[k];
            prod = ca * cb;
            r.add_term(e, prod);
        }
    }
    return r;
}

MultiPoly MultiPoly::operator-() const
{
    MultiPoly r = *this;
    for (auto& [e, v] : r.terms_) v = -v;
    return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const
{
    return nvars_ == o.nvars_ && ring_ == o.ring_ && terms_ == o.terms_;
}

MultiPoly MultiPoly::pow(unsigned n) const
{
    MultiPoly result = constant(Rational(1), nvars_, ring_);
    MultiPoly base = *this;
    while (n > 0) {
        if (n & 1u) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

MultiPoly MultiPoly::derivative(int var) const
{
    if (var < 0 || var >= nvars_) throw DomainError("variable index out of range");
    MultiPoly r(nvars_, ring_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        r.add_term(d, c * e[var]);
    }
    return r;
}

MultiPoly MultiPoly::substitute(int var, const MultiPoly& value) const
{
    check_compatible(value);
    int maxdeg = degree(var);
    std::vector<MultiPoly> powers;
    powers.push_back(constant(Rational(1), nvars_, ring_));
    for (int k = 1; k <= maxdeg; ++k) powers.push_back(powers.back() * value);
    MultiPoly r(nvars_, ring_);
    for (const auto& [e, c] : terms_) {
        Exponents rest = e;
        int k = rest[var];
        rest[var] = 0;
        r += monomial(c, rest, ring_) * powers[k];
    }
    return r;
}

MultiPoly MultiPoly::project(const std::vector<int>& keep, Ring ring) const
{
    MultiPoly r(static_cast<int>(keep.size()), ring);
    for (const auto& [e, c] : terms_) {
        Exponents ne(keep.size());
        int kept = 0;
        for (std::size_t i = 0; i < keep.size(); ++i) {
            ne[i] = e[keep[i]];
            kept += ne[i];
        }
        int total = 0;
        for (int k : e) total += k;
        if (kept != total) throw DomainError("projection drops a variable that is present");
        r.add_term(ne, c);
    }
    return r;
}

MultiPoly MultiPoly::with_ring(Ring ring) const
{
    MultiPoly r = *this;
    r.ring_ = ring;
    return r;
}

double MultiPoly::evaluate(std::span<const double> values) const
{
    if (static_cast<int>(values.size()) != nvars_) throw DomainError("wrong number of values");
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = c.get_d();
        for (int k = 0; k < nvars_; ++k)
            for (int j = 0; j < e[k]; ++j) m *= values[k];
        s += m;
    }
    return s;
}

std::complex<double> MultiPoly::evaluate(std::span<const std::complex<double>> values) const
{
    if (static_cast<int>(values.size()) != nvars_) throw DomainError("wrong number of values");
    std::complex<double> s = 0.0;
    for (const auto& [e, c] : terms_) {
        std::complex<double> m = c.get_d();
        for (int k = 0; k < nvars_; ++k)
            for (int j = 0; j < e[k]; ++j) m *= values[k];
        s += m;
    }
    return s;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // Highest total degree first reads more naturally.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = abs(c);
        bool unit = (a == 1);
        os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        bool any = false;
        if (!unit) {
            os << qrm::to_string(a);
            any = true;
        }
        for (int k = 0; k < nvars_; ++k) {
            if (e[k] == 0) continue;
            if (any) os << "*";
            os << (k < static_cast<int>(names.size()) ? names[k] : "v" + std::to_string(k));
            if (e[k] > 1) os << "^" << e[k];
            any = true;
        }
        if (!any) os << "1";
        first = false;
    }
    return os.str();
}

} // namespace qrm

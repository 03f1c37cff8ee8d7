#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qrm {

// mpq_class keeps numerator/denominator canonical after every arithmetic
// operation; make_rational canonicalizes explicit p/q input.
using Rational = mpq_class;

Rational make_rational(long p, long q = 1);
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& r);   // "p/q", or "p" when q = 1
Rational factorial(unsigned n);

// Sparse multivariate polynomial with rational coefficients.
//
// The ring tag only guards against mixing polynomials from different
// coefficient rings.  Full and Parity polynomials use the variables
// (tau, G, D) where G = g^2 and D = Delta^2 (Full) or Delta (Parity).
// Generic polynomials may have any number of variables.
class MultiPoly {
public:
    enum class Ring { Generic, Full, Parity };
    using Exponents = std::vector<int>;
    using TermMap = std::map<Exponents, Rational>;

    MultiPoly() = default;
    MultiPoly(int nvars, Ring ring = Ring::Generic);

    static MultiPoly constant(const Rational& c, int nvars, Ring ring = Ring::Generic);
    static MultiPoly variable(int index, int nvars, Ring ring = Ring::Generic);
    static MultiPoly monomial(const Rational& c, Exponents e, Ring ring = Ring::Generic);

    int nvars() const { return nvars_; }
    Ring ring() const { return ring_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coefficient(const Exponents& e) const;
    // Constant term (exponents all zero).
    Rational constant_term() const;
    bool is_constant() const;
    int degree(int var) const;       // -1 for the zero polynomial
    int total_degree() const;

    void add_term(const Exponents& e, const Rational& c);

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
    friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    MultiPoly operator-() const;
    bool operator==(const MultiPoly& o) const;

    MultiPoly pow(unsigned n) const;
    MultiPoly derivative(int var) const;
    // Replace variable `var` by the polynomial `value` (same ring/nvars).
    MultiPoly substitute(int var, const MultiPoly& value) const;
    // Drop variables whose exponents are all zero; `keep` lists the
    // surviving variables in their new order.
    MultiPoly project(const std::vector<int>& keep, Ring ring) const;
    MultiPoly with_ring(Ring ring) const;

    double evaluate(std::span<const double> values) const;
    std::complex<double> evaluate(std::span<const std::complex<double>> values) const;

    // Human-readable form using the given variable names.
    std::string to_string(const std::vector<std::string>& names) const;

private:
    void check_compatible(const MultiPoly& o) const;

    int nvars_ = 0;
    Ring ring_ = Ring::Generic;
    TermMap terms_;
};

} // namespace qrm

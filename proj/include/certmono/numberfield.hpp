#pragma once

// Exact arithmetic in Q(nu) = Q[nu]/(m), m the minimal polynomial of nu.

#include <gmpxx.h>

#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace certmono {

/// Parses "a", "-a/b" or a decimal such as "0.125" exactly. "1/0" is a ParseError.
mpq_class parse_rational(std::string_view text);
std::string rational_to_string(const mpq_class& q);

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
using QPoly = std::vector<mpq_class>;

namespace qpoly {
void trim(QPoly& p);
int degree(const QPoly& p);   // -1 for the zero polynomial
QPoly add(const QPoly& a, const QPoly& b);
QPoly sub(const QPoly& a, const QPoly& b);
QPoly mul(const QPoly& a, const QPoly& b);
QPoly derivative(const QPoly& p);
/// a = q*b + r with deg r < deg b.
void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
QPoly mod(const QPoly& a, const QPoly& b);
/// Monic gcd; gcd(0, 0) = 0.
QPoly gcd(const QPoly& a, const QPoly& b);
} // namespace qpoly

class NumberField {
public:
    /// Coefficients lowest degree first. Non-monic input is scaled to monic.
    /// Throws Precondition when m has degree < 1 or is not squarefree.
    explicit NumberField(QPoly min_poly);

    static std::shared_ptr<const NumberField> rationals();

    const QPoly& min_poly() const { return min_poly_; }
    int degree() const { return static_cast<int>(min_poly_.size()) - 1; }

    bool operator==(const NumberField& other) const { return min_poly_ == other.min_poly_; }

private:
    QPoly min_poly_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

/// Element of Q(nu) in the power basis, always reduced mod m.
class NFElement {
public:
    NFElement() = default;   // zero of Q
    explicit NFElement(FieldPtr field);
    NFElement(FieldPtr field, QPoly coeffs);
    NFElement(FieldPtr field, const mpq_class& value);

    static NFElement generator(FieldPtr field);   // nu itself

    const FieldPtr& field() const { return field_; }
    const QPoly& coeffs() const { return coeffs_; }   // length deg m
    bool is_zero() const;
    bool is_rational() const;

    NFElement operator-() const;
    friend NFElement operator+(const NFElement& a, const NFElement& b);
    friend NFElement operator-(const NFElement& a, const NFElement& b);
    friend NFElement operator*(const NFElement& a, const NFElement& b);
    friend bool operator==(const NFElement& a, const NFElement& b);

    /// Throws InverseOfZero, or NotInvertible when m turns out reducible.
    NFElement inverse() const;
    NFElement pow(unsigned k) const;
    NFElement times_int(long k) const;

private:
    static FieldPtr common(const NFElement& a, const NFElement& b);

    FieldPtr field_;
    QPoly coeffs_;
};

std::ostream& operator<<(std::ostream& os, const NFElement& a);

/// Dense univariate polynomial over Q(nu), lowest degree first.
using NFPoly = std::vector<NFElement>;

namespace nfpoly {
void trim(NFPoly& p);
int degree(const NFPoly& p);
/// Remainder and quotient over the field Q(nu).
void divmod(const NFPoly& a, const NFPoly& b, NFPoly& q, NFPoly& r);
/// Monic gcd.
NFPoly gcd(NFPoly a, NFPoly b);
} // namespace nfpoly

/// Res_x(p, q) over Q(nu), by the Euclidean remainder sequence.
NFElement resultant(const NFPoly& p, const NFPoly& q);

} // namespace certmono

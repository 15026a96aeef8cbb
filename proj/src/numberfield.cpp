#include "certmono/numberfield.hpp"

#include "certmono/error.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace certmono {

mpq_class parse_rational(std::string_view text) {
    const std::string s(text);
    const auto bad = [&s]() { fail(ErrorKind::ParseError, "invalid rational '" + s + "'"); };
    if (s.empty()) bad();
    const auto slash = s.find('/');
    const auto is_int = [](std::string_view t) {
        std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i >= t.size()) return false;
        return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
    };
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den) || den[0] == '-' || den[0] == '+') bad();
        if (num[0] == '+') num.erase(0, 1);
        mpz_class n(num, 10), d(den, 10);
        if (d == 0) bad();
        mpq_class q(n, d);
        q.canonicalize();
        return q;
    }
    // Decimal with optional fraction and exponent, parsed exactly.
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '-' || s[i] == '+') negative = (s[i++] == '-');
    std::string digits;
    long scale = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits += c;
            seen_digit = true;
            if (seen_dot) --scale;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!seen_digit) bad();
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') bad();
        const std::string ex = s.substr(i + 1);
        if (!is_int(ex) || ex.size() > 6) bad();
        scale += std::stol(ex);
    }
    mpq_class q{mpz_class(digits, 10)};
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale >= 0)
        q *= ten_pow;
    else
        q /= ten_pow;
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
}

std::string rational_to_string(const mpq_class& q) { return q.get_str(); }

// ---------------------------------------------------------------- QPoly

namespace qpoly {

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const QPoly& p) {
    for (std::size_t i = p.size(); i > 0; --i)
        if (p[i - 1] != 0) return static_cast<int>(i) - 1;
    return -1;
}

QPoly add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

QPoly sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

QPoly derivative(const QPoly& p) {
    QPoly r;
    for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
    trim(r);
    return r;
}

void divmod(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    const int db = degree(b);
    if (db < 0) fail(ErrorKind::Precondition, "polynomial division by zero");
    r = a;
    trim(r);
    q.assign(std::max<int>(degree(r) - db + 1, 0), mpq_class(0));
    while (degree(r) >= db) {
        const int dr = degree(r);
        const mpq_class c = r[dr] / b[db];
        q[dr - db] = c;
        for (int k = 0; k <= db; ++k) r[dr - db + k] -= c * b[k];
        trim(r);
    }
    trim(q);
}

QPoly mod(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    divmod(a, b, q, r);
    return r;
}

QPoly gcd(const QPoly& a0, const QPoly& b0) {
    QPoly a = a0, b = b0;
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const mpq_class lc = a.back();
        for (auto& c : a) c /= lc;
    }
    return a;
}

} // namespace qpoly

// ---------------------------------------------------------------- NumberField

NumberField::NumberField(QPoly min_poly) : min_poly_(std::move(min_poly)) {
    qpoly::trim(min_poly_);
    if (qpoly::degree(min_poly_) < 1) fail(ErrorKind::Precondition, "minimal polynomial must have degree >= 1");
    const mpq_class lc = min_poly_.back();
    for (auto& c : min_poly_) c /= lc;
    if (qpoly::degree(qpoly::gcd(min_poly_, qpoly::derivative(min_poly_))) > 0)
        fail(ErrorKind::Precondition, "minimal polynomial is not squarefree");
}

FieldPtr NumberField::rationals() {
    static const FieldPtr q = std::make_shared<const NumberField>(QPoly{mpq_class(0), mpq_class(1)});
    return q;
}

// ---------------------------------------------------------------- NFElement

NFElement::NFElement(FieldPtr field) : field_(std::move(field)) {
    coeffs_.assign(static_cast<std::size_t>(field_->degree()), mpq_class(0));
}

NFElement::NFElement(FieldPtr field, QPoly coeffs) : field_(std::move(field)) {
    coeffs_ = qpoly::mod(coeffs, field_->min_poly());
    coeffs_.resize(static_cast<std::size_t>(field_->degree()), mpq_class(0));
}

NFElement::NFElement(FieldPtr field, const mpq_class& value) : NFElement(std::move(field)) {
    coeffs_[0] = value;
}

NFElement NFElement::generator(FieldPtr field) {
    return NFElement(field, QPoly{mpq_class(0), mpq_class(1)});
}

bool NFElement::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const mpq_class& c) { return c == 0; });
}

bool NFElement::is_rational() const {
    return std::all_of(coeffs_.begin() + (coeffs_.empty() ? 0 : 1), coeffs_.end(),
                       [](const mpq_class& c) { return c == 0; });
}

FieldPtr NFElement::common(const NFElement& a, const NFElement& b) {
    // A default-constructed element is a bare zero that adapts to any field.
    if (!a.field_) return b.field_;
    if (!b.field_) return a.field_;
    if (a.field_ != b.field_ && !(*a.field_ == *b.field_))
        fail(ErrorKind::Precondition, "arithmetic across different number fields");
    return a.field_;
}

NFElement NFElement::operator-() const {
    NFElement r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
}

namespace {
QPoly padded(const NFElement& a, const FieldPtr& f) {
    if (!f) return {};
    QPoly c = a.coeffs();
    c.resize(static_cast<std::size_t>(f->degree()), mpq_class(0));
    return c;
}
} // namespace

NFElement operator+(const NFElement& a, const NFElement& b) {
    FieldPtr f = NFElement::common(a, b);
    if (!f) return {};
    QPoly c = padded(a, f);
    const QPoly bc = padded(b, f);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += bc[i];
    NFElement r(f);
    r.coeffs_ = std::move(c);
    return r;
}

NFElement operator-(const NFElement& a, const NFElement& b) { return a + (-b); }

NFElement operator*(const NFElement& a, const NFElement& b) {
    FieldPtr f = NFElement::common(a, b);
    if (!f) return {};
    return NFElement(f, qpoly::mul(padded(a, f), padded(b, f)));
}

bool operator==(const NFElement& a, const NFElement& b) { return (a - b).is_zero(); }

NFElement NFElement::inverse() const {
    if (is_zero()) fail(ErrorKind::InverseOfZero, "inverse of zero in number field");
    // Extended Euclid on (a, m): s*a + t*m = g.
    QPoly r0 = coeffs_, r1 = field_->min_poly();
    qpoly::trim(r0);
    QPoly s0{mpq_class(1)}, s1;
    while (!r1.empty()) {
        QPoly q, r;
        qpoly::divmod(r0, r1, q, r);
        QPoly s = qpoly::sub(s0, qpoly::mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (qpoly::degree(r0) > 0)
        fail(ErrorKind::NotInvertible, "element shares a factor with the minimal polynomial (reducible m)");
    const mpq_class g = r0[0];
    for (auto& c : s0) c /= g;
    return NFElement(field_, s0);
}

NFElement NFElement::pow(unsigned k) const {
    NFElement result(field_, mpq_class(1));
    NFElement base = *this;
    while (k > 0) {
        if (k & 1u) result = result * base;
        k >>= 1u;
        if (k > 0) base = base * base;
    }
    return result;
}

NFElement NFElement::times_int(long k) const {
    NFElement r = *this;
    for (auto& c : r.coeffs_) c *= k;
    return r;
}

std::ostream& operator<<(std::ostream& os, const NFElement& a) {
    bool first = true;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
        if (a.coeffs()[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << a.coeffs()[i].get_str();
        if (i == 1) os << "*nu";
        if (i > 1) os << "*nu^" << i;
    }
    if (first) os << '0';
    return os;
}

// ---------------------------------------------------------------- NFPoly

namespace nfpoly {

void trim(NFPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

int degree(const NFPoly& p) {
    for (std::size_t i = p.size(); i > 0; --i)
        if (!p[i - 1].is_zero()) return static_cast<int>(i) - 1;
    return -1;
}

void divmod(const NFPoly& a, const NFPoly& b, NFPoly& q, NFPoly& r) {
    const int db = degree(b);
    if (db < 0) fail(ErrorKind::Precondition, "polynomial division by zero");
    r = a;
    trim(r);
    const NFElement inv_lc = b[db].inverse();
    q.assign(std::max<int>(degree(r) - db + 1, 0), NFElement());
    while (degree(r) >= db) {
        const int dr = degree(r);
        const NFElement c = r[dr] * inv_lc;
        q[dr - db] = c;
        for (int k = 0; k <= db; ++k) r[dr - db + k] = r[dr - db + k] - c * b[k];
        r[dr] = NFElement();
        trim(r);
    }
    trim(q);
}

NFPoly gcd(NFPoly a, NFPoly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        NFPoly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        const NFElement inv = a.back().inverse();
        for (auto& c : a) c = c * inv;
    }
    return a;
}

} // namespace nfpoly

NFElement resultant(const NFPoly& p0, const NFPoly& q0) {
    NFPoly a = p0, b = q0;
    nfpoly::trim(a);
    nfpoly::trim(b);
    require(!a.empty() && !b.empty(), "resultant of a zero polynomial");
    FieldPtr field = a.back().field() ? a.back().field() : b.back().field();
    if (!field) field = NumberField::rationals();
    NFElement acc(field, mpq_class(1));
    // Res(A, B) = (-1)^(mn) lc(B)^(m - r) Res(B, R), A = QB + R.
    while (true) {
        const int m = nfpoly::degree(a);
        const int n = nfpoly::degree(b);
        if (n == 0) return acc * b[0].pow(static_cast<unsigned>(m));
        if (m == 0) return acc * a[0].pow(static_cast<unsigned>(n));
        NFPoly q, r;
        nfpoly::divmod(a, b, q, r);
        if (r.empty()) return NFElement(field);
        const int dr = nfpoly::degree(r);
        if ((m * n) % 2 == 1) acc = -acc;
        acc = acc * b[n].pow(static_cast<unsigned>(m - dr));
        a = std::move(b);
        b = std::move(r);
    }
}

} // namespace certmono

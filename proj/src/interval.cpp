#include "certmono/interval.hpp"

#include "certmono/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <ostream>
#include <utility>

namespace certmono {

namespace {

mpfr_rnd_t to_mpfr(Round rnd) {
    switch (rnd) {
    case Round::Down: return MPFR_RNDD;
    case Round::Up: return MPFR_RNDU;
    case Round::Nearest: break;
    }
    return MPFR_RNDN;
}

Precision max_prec(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

} // namespace

// ---------------------------------------------------------------- Real

void Real::init(Precision prec) {
    if (mpfr_custom_get_size(prec) <= sizeof(buf_)) {
        mpfr_custom_init(buf_, prec);
        mpfr_custom_init_set(v_, MPFR_ZERO_KIND, 0, prec, buf_);
    } else {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
}

bool Real::is_inline() const { return mpfr_custom_get_significand(v_) == static_cast<const void*>(buf_); }

Real::Real(Precision prec) { init(prec); }

Real::Real(double v, Precision prec) {
    init(prec);
    mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(const Real& other) {
    init(other.precision());
    mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
    if (other.is_inline()) {
        init(other.precision());
        mpfr_set(v_, other.v_, MPFR_RNDN);
    } else {
        std::memcpy(v_, other.v_, sizeof(mpfr_t));
        other.init(MPFR_PREC_MIN);
    }
}

Real& Real::operator=(const Real& other) {
    if (this == &other) return *this;
    if (precision() != other.precision()) {
        if (!is_inline()) mpfr_clear(v_);
        init(other.precision());
    }
    mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
}

Real& Real::operator=(Real&& other) noexcept {
    if (this == &other) return *this;
    if (!other.is_inline()) {
        if (!is_inline()) mpfr_clear(v_);
        std::memcpy(v_, other.v_, sizeof(mpfr_t));
        other.init(MPFR_PREC_MIN);
        return *this;
    }
    if (precision() != other.precision()) {
        if (!is_inline()) mpfr_clear(v_);
        init(other.precision());
    }
    mpfr_set(v_, other.v_, MPFR_RNDN);
    return *this;
}

Real::~Real() {
    if (!is_inline()) mpfr_clear(v_);
}

Real Real::parse(std::string_view text, Precision prec, Round rnd) {
    std::string s(text);
    // mpfr_strtofr accepts leading blanks; we do not.
    if (s.empty() || std::isspace(static_cast<unsigned char>(s.front())))
        fail(ErrorKind::ParseError, "invalid number '" + s + "'");
    Real out(prec);
    char* end = nullptr;
    mpfr_strtofr(out.v_, s.c_str(), &end, 0, to_mpfr(rnd));
    if (end != s.c_str() + s.size() || !out.is_finite())
        fail(ErrorKind::ParseError, "invalid number '" + s + "'");
    return out;
}

Real Real::from_rational(const mpq_class& q, Precision prec, Round rnd) {
    Real out(prec);
    mpfr_set_q(out.v_, q.get_mpq_t(), to_mpfr(rnd));
    return out;
}

Real Real::from_integer(long v, Precision prec) {
    Real out(prec);
    mpfr_set_si(out.v_, v, MPFR_RNDN);
    return out;
}

Real Real::with_precision(Precision prec, Round rnd) const {
    Real out(prec);
    mpfr_set(out.v_, v_, to_mpfr(rnd));
    return out;
}

Real Real::nan(Precision prec) {
    Real out(prec);
    mpfr_set_nan(out.v_);
    return out;
}

mpq_class Real::to_rational() const {
    require(is_finite(), "to_rational of a non-finite value");
    mpz_class m;
    mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
    mpq_class q(m);
    if (e >= 0)
        mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    return q;
}

std::string Real::to_decimal(int digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Rg", digits, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

std::string Real::to_hex() const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%Ra", v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

Real add(const Real& a, const Real& b, Round rnd, Precision prec) {
    Real out(prec);
    mpfr_add(out.raw(), a.raw(), b.raw(), to_mpfr(rnd));
    return out;
}

Real sub(const Real& a, const Real& b, Round rnd, Precision prec) {
    Real out(prec);
    mpfr_sub(out.raw(), a.raw(), b.raw(), to_mpfr(rnd));
    return out;
}

Real mul(const Real& a, const Real& b, Round rnd, Precision prec) {
    Real out(prec);
    mpfr_mul(out.raw(), a.raw(), b.raw(), to_mpfr(rnd));
    return out;
}

Real div(const Real& a, const Real& b, Round rnd, Precision prec) {
    Real out(prec);
    mpfr_div(out.raw(), a.raw(), b.raw(), to_mpfr(rnd));
    return out;
}

Real neg(const Real& a) {
    Real out(a.precision());
    mpfr_neg(out.raw(), a.raw(), MPFR_RNDN);
    return out;
}

Real abs(const Real& a) {
    Real out(a.precision());
    mpfr_abs(out.raw(), a.raw(), MPFR_RNDN);
    return out;
}

Real mul_2si(const Real& a, long e) {
    Real out(a.precision());
    mpfr_mul_2si(out.raw(), a.raw(), e, MPFR_RNDN);
    return out;
}

const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_decimal(); }

// ---------------------------------------------------------------- RealInterval

RealInterval::RealInterval(Precision prec) : lo_(prec), hi_(prec) {}

RealInterval::RealInterval(Real lo, Real hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    settle();
    require(is_overflowed() || lo_ <= hi_, "interval with lo > hi");
}

RealInterval::RealInterval(const Real& point) : lo_(point), hi_(point) { settle(); }

RealInterval RealInterval::from_rational(const mpq_class& q, Precision prec) {
    return {Real::from_rational(q, prec, Round::Down), Real::from_rational(q, prec, Round::Up)};
}

RealInterval RealInterval::from_string(std::string_view text, Precision prec) {
    return {Real::parse(text, prec, Round::Down), Real::parse(text, prec, Round::Up)};
}

RealInterval RealInterval::overflowed(Precision prec) {
    RealInterval out(prec);
    out.lo_ = Real::nan(prec);
    out.hi_ = Real::nan(prec);
    return out;
}

void RealInterval::settle() {
    if (!lo_.is_finite() || !hi_.is_finite()) {
        const Precision p = precision();
        lo_ = Real::nan(p);
        hi_ = Real::nan(p);
    }
}

Precision RealInterval::precision() const { return max_prec(lo_, hi_); }

bool RealInterval::contains(const Real& x) const { return lo_ <= x && x <= hi_; }

bool RealInterval::contains(const RealInterval& other) const {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
}

bool RealInterval::contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0 && !is_overflowed(); }

bool RealInterval::intersects(const RealInterval& other) const {
    return lo_ <= other.hi_ && other.lo_ <= hi_;
}

Real RealInterval::width() const { return sub(hi_, lo_, Round::Up, precision()); }

Real RealInterval::magnitude() const {
    if (is_overflowed()) return Real::nan(precision());
    return max(abs(lo_), abs(hi_));
}

Real RealInterval::mignitude() const {
    if (is_overflowed()) return Real::nan(precision());
    if (contains_zero()) return Real(precision());
    return min(abs(lo_), abs(hi_));
}

Real RealInterval::midpoint(Precision prec) const {
    if (is_overflowed()) return Real::nan(prec);
    return mul_2si(add(lo_, hi_, Round::Nearest, prec), -1);
}

RealInterval RealInterval::operator-() const {
    RealInterval out(precision());
    out.lo_ = neg(hi_);
    out.hi_ = neg(lo_);
    return out;
}

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
    const Precision p = std::max(a.precision(), b.precision());
    RealInterval out(p);
    out.lo_ = add(a.lo_, b.lo_, Round::Down, p);
    out.hi_ = add(a.hi_, b.hi_, Round::Up, p);
    out.settle();
    return out;
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) {
    const Precision p = std::max(a.precision(), b.precision());
    RealInterval out(p);
    out.lo_ = sub(a.lo_, b.hi_, Round::Down, p);
    out.hi_ = sub(a.hi_, b.lo_, Round::Up, p);
    out.settle();
    return out;
}

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
    const Precision p = std::max(a.precision(), b.precision());
    if (a.is_overflowed() || b.is_overflowed()) return RealInterval::overflowed(p);
    const Real& al = a.lo_;
    const Real& ah = a.hi_;
    const Real& bl = b.lo_;
    const Real& bh = b.hi_;
    const auto lo = [p](const Real& x, const Real& y) { return mul(x, y, Round::Down, p); };
    const auto hi = [p](const Real& x, const Real& y) { return mul(x, y, Round::Up, p); };
    RealInterval out(p);
    if (al.sign() >= 0) {
        if (bl.sign() >= 0) {
            out.lo_ = lo(al, bl), out.hi_ = hi(ah, bh);
        } else if (bh.sign() <= 0) {
            out.lo_ = lo(ah, bl), out.hi_ = hi(al, bh);
        } else {
            out.lo_ = lo(ah, bl), out.hi_ = hi(ah, bh);
        }
    } else if (ah.sign() <= 0) {
        if (bl.sign() >= 0) {
            out.lo_ = lo(al, bh), out.hi_ = hi(ah, bl);
        } else if (bh.sign() <= 0) {
            out.lo_ = lo(ah, bh), out.hi_ = hi(al, bl);
        } else {
            out.lo_ = lo(al, bh), out.hi_ = hi(al, bl);
        }
    } else {
        if (bl.sign() >= 0) {
            out.lo_ = lo(al, bh), out.hi_ = hi(ah, bh);
        } else if (bh.sign() <= 0) {
            out.lo_ = lo(ah, bl), out.hi_ = hi(al, bl);
        } else {
            out.lo_ = min(lo(al, bh), lo(ah, bl));
            out.hi_ = max(hi(al, bl), hi(ah, bh));
        }
    }
    out.settle();
    return out;
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
    const Precision p = std::max(a.precision(), b.precision());
    if (a.is_overflowed() || b.is_overflowed()) return RealInterval::overflowed(p);
    if (b.contains_zero()) fail(ErrorKind::DivByIntervalContainingZero, "real division");
    const Real one(1.0, p);
    RealInterval recip(p);
    recip.lo_ = div(one, b.hi_, Round::Down, p);
    recip.hi_ = div(one, b.lo_, Round::Up, p);
    recip.settle();
    return a * recip;
}

RealInterval sqr(const RealInterval& a) {
    const Precision p = a.precision();
    if (a.is_overflowed()) return RealInterval::overflowed(p);
    RealInterval out(p);
    if (a.lo_.sign() >= 0) {
        out.lo_ = mul(a.lo_, a.lo_, Round::Down, p);
        out.hi_ = mul(a.hi_, a.hi_, Round::Up, p);
    } else if (a.hi_.sign() <= 0) {
        out.lo_ = mul(a.hi_, a.hi_, Round::Down, p);
        out.hi_ = mul(a.lo_, a.lo_, Round::Up, p);
    } else {
        out.lo_ = Real(p);
        out.hi_ = max(mul(a.lo_, a.lo_, Round::Up, p), mul(a.hi_, a.hi_, Round::Up, p));
    }
    out.settle();
    return out;
}

// ---------------------------------------------------------------- Complex

Complex Complex::parse(std::string_view re, std::string_view im, Precision prec) {
    return {Real::parse(re, prec, Round::Nearest), Real::parse(im, prec, Round::Nearest)};
}

Precision Complex::precision() const { return max_prec(re, im); }

namespace approx {

Complex add(const Complex& a, const Complex& b, Precision prec) {
    return {certmono::add(a.re, b.re, Round::Nearest, prec), certmono::add(a.im, b.im, Round::Nearest, prec)};
}

Complex sub(const Complex& a, const Complex& b, Precision prec) {
    return {certmono::sub(a.re, b.re, Round::Nearest, prec), certmono::sub(a.im, b.im, Round::Nearest, prec)};
}

Complex mul(const Complex& a, const Complex& b, Precision prec) {
    const Precision w = prec + 8;
    Real re = certmono::sub(certmono::mul(a.re, b.re, Round::Nearest, w), certmono::mul(a.im, b.im, Round::Nearest, w),
                            Round::Nearest, prec);
    Real im = certmono::add(certmono::mul(a.re, b.im, Round::Nearest, w), certmono::mul(a.im, b.re, Round::Nearest, w),
                            Round::Nearest, prec);
    return {std::move(re), std::move(im)};
}

Complex div(const Complex& a, const Complex& b, Precision prec) {
    const Precision w = prec + 8;
    Real den = certmono::add(certmono::mul(b.re, b.re, Round::Nearest, w), certmono::mul(b.im, b.im, Round::Nearest, w),
                             Round::Nearest, w);
    Complex conj{b.re, neg(b.im)};
    Complex num = mul(a, conj, w);
    return {certmono::div(num.re, den, Round::Nearest, prec), certmono::div(num.im, den, Round::Nearest, prec)};
}

Real abs_inf(const Complex& a) { return max(abs(a.re), abs(a.im)); }

} // namespace approx

// ---------------------------------------------------------------- ComplexInterval

ComplexInterval ComplexInterval::from_rational(const mpq_class& re, const mpq_class& im, Precision prec) {
    return {RealInterval::from_rational(re, prec), RealInterval::from_rational(im, prec)};
}

ComplexInterval ComplexInterval::from_int(long v, Precision prec) {
    return {RealInterval(Real::from_integer(v, prec)), RealInterval(prec)};
}

Precision ComplexInterval::precision() const { return std::max(re_.precision(), im_.precision()); }

bool ComplexInterval::is_zero() const {
    return re_.is_point() && im_.is_point() && re_.lo().is_zero() && im_.lo().is_zero();
}

Complex ComplexInterval::midpoint(Precision prec) const { return {re_.midpoint(prec), im_.midpoint(prec)}; }

Real ComplexInterval::magnitude() const { return max(re_.magnitude(), im_.magnitude()); }

Real ComplexInterval::width() const { return max(re_.width(), im_.width()); }

ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re_ + b.re_, a.im_ + b.im_};
}

ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re_ - b.re_, a.im_ - b.im_};
}

ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
    // Point factors are common (exact coefficients, centers); skip zero parts.
    if (a.im_.is_point() && a.im_.lo().is_zero()) return {a.re_ * b.re_, a.re_ * b.im_};
    if (b.im_.is_point() && b.im_.lo().is_zero()) return {a.re_ * b.re_, a.im_ * b.re_};
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
}

ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b) {
    if (b.contains_zero()) fail(ErrorKind::DivByIntervalContainingZero, "complex division");
    RealInterval den = sqr(b.re_) + sqr(b.im_);
    if (den.is_overflowed()) return {RealInterval::overflowed(den.precision()), RealInterval::overflowed(den.precision())};
    if (den.lo().sign() <= 0) fail(ErrorKind::DivByIntervalContainingZero, "complex division underflow");
    ComplexInterval num = a * ComplexInterval(b.re_, -b.im_);
    return {num.re_ / den, num.im_ / den};
}

ComplexInterval sqr(const ComplexInterval& a) {
    RealInterval two(Real(2.0, a.precision()));
    return {sqr(a.re()) - sqr(a.im()), two * (a.re() * a.im())};
}

ComplexInterval pow(const ComplexInterval& a, unsigned k) {
    ComplexInterval result = ComplexInterval::from_int(1, a.precision());
    ComplexInterval base = a;
    bool first = true;
    while (k > 0) {
        if (k & 1u) {
            result = first ? base : result * base;
            first = false;
        }
        k >>= 1u;
        if (k > 0) base = sqr(base);
    }
    return result;
}

// ---------------------------------------------------------------- boxes and matrices

ComplexBox box_ball(std::span<const Complex> center, const Real& r) {
    require(r.sign() > 0, "box_ball radius must be positive");
    ComplexBox out;
    out.reserve(center.size());
    for (const Complex& c : center) {
        const Precision p = std::max(c.precision(), r.precision());
        out.emplace_back(RealInterval(sub(c.re, r, Round::Down, p), add(c.re, r, Round::Up, p)),
                         RealInterval(sub(c.im, r, Round::Down, p), add(c.im, r, Round::Up, p)));
    }
    return out;
}

ComplexBox point_box(std::span<const Complex> center) {
    ComplexBox out;
    out.reserve(center.size());
    for (const Complex& c : center) out.emplace_back(c);
    return out;
}

bool box_contained(const ComplexBox& inner, std::span<const Complex> center, const Real& s) {
    require(inner.size() == center.size(), "box_contained dimension mismatch");
    const auto side = [&s](const RealInterval& iv, const Real& c) {
        if (iv.is_overflowed()) return false;
        const Precision p = std::max(c.precision(), s.precision());
        return sub(c, s, Round::Up, p) <= iv.lo() && iv.hi() <= add(c, s, Round::Down, p);
    };
    for (std::size_t i = 0; i < inner.size(); ++i) {
        if (!side(inner[i].re(), center[i].re) || !side(inner[i].im(), center[i].im)) return false;
    }
    return true;
}

ComplexBox mat_apply(const IntervalMatrix& m, const ComplexBox& v) {
    const std::size_t n = m.size();
    require(v.size() == n, "mat_apply dimension mismatch");
    ComplexBox out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ComplexInterval acc = m(i, 0) * v[0];
        for (std::size_t j = 1; j < n; ++j) acc = acc + m(i, j) * v[j];
        out.push_back(std::move(acc));
    }
    return out;
}

ComplexBox mat_apply(const ComplexMatrix& m, const ComplexBox& v) {
    const std::size_t n = m.size();
    require(v.size() == n, "mat_apply dimension mismatch");
    ComplexBox out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ComplexInterval acc = ComplexInterval(m(i, 0)) * v[0];
        for (std::size_t j = 1; j < n; ++j) acc = acc + ComplexInterval(m(i, j)) * v[j];
        out.push_back(std::move(acc));
    }
    return out;
}

IntervalMatrix mat_mul(const ComplexMatrix& a, const IntervalMatrix& b) {
    const std::size_t n = a.size();
    require(b.size() == n, "mat_mul dimension mismatch");
    IntervalMatrix out(n, ComplexInterval());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            ComplexInterval acc = ComplexInterval(a(i, 0)) * b(0, j);
            for (std::size_t k = 1; k < n; ++k) acc = acc + ComplexInterval(a(i, k)) * b(k, j);
            out(i, j) = std::move(acc);
        }
    }
    return out;
}

IntervalMatrix identity_matrix(std::size_t n, Precision prec) {
    IntervalMatrix out(n, ComplexInterval(prec));
    for (std::size_t i = 0; i < n; ++i) out(i, i) = ComplexInterval::from_int(1, prec);
    return out;
}

IntervalMatrix identity_minus(const IntervalMatrix& m) {
    const std::size_t n = m.size();
    IntervalMatrix out(n, ComplexInterval());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                out(i, j) = ComplexInterval::from_int(1, m(i, j).precision()) - m(i, j);
            else
                out(i, j) = -m(i, j);
        }
    }
    return out;
}

ComplexMatrix midpoint(const IntervalMatrix& m, Precision prec) {
    const std::size_t n = m.size();
    ComplexMatrix out(n, Complex(prec));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = m(i, j).midpoint(prec);
    return out;
}

ComplexVector midpoint(const ComplexBox& b, Precision prec) {
    ComplexVector out;
    out.reserve(b.size());
    for (const auto& c : b) out.push_back(c.midpoint(prec));
    return out;
}

bool invert(const ComplexMatrix& m, ComplexMatrix& out, Precision prec) {
    const std::size_t n = m.size();
    // Augmented [m | I], Gauss-Jordan.
    std::vector<std::vector<Complex>> a(n, std::vector<Complex>(2 * n, Complex(prec)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
        a[i][n + i] = Complex(1.0, 0.0, prec);
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        Real best = approx::abs_inf(a[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            Real v = approx::abs_inf(a[r][col]);
            if (v > best) best = std::move(v), piv = r;
        }
        if (best.is_zero() || !best.is_finite()) return false;
        std::swap(a[col], a[piv]);
        const Complex p = a[col][col];
        for (std::size_t j = 0; j < 2 * n; ++j) a[col][j] = approx::div(a[col][j], p, prec);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || (a[r][col].re.is_zero() && a[r][col].im.is_zero())) continue;
            const Complex f = a[r][col];
            for (std::size_t j = 0; j < 2 * n; ++j)
                a[r][j] = approx::sub(a[r][j], approx::mul(f, a[col][j], prec), prec);
        }
    }
    out = ComplexMatrix(n, Complex(prec));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i][n + j];
    return true;
}

Real distance_inf(std::span<const Complex> a, std::span<const Complex> b) {
    require(a.size() == b.size(), "distance_inf dimension mismatch");
    Real best(MPFR_PREC_MIN);
    const auto upd = [&best](const Real& x, const Real& y) {
        const Precision p = std::max(x.precision(), y.precision());
        Real d = max(abs(sub(x, y, Round::Up, p)), abs(sub(x, y, Round::Down, p)));
        if (d > best || !d.is_finite()) best = std::move(d);
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        upd(a[i].re, b[i].re);
        upd(a[i].im, b[i].im);
    }
    return best;
}

Real norm_inf(std::span<const Complex> a) {
    Real best(MPFR_PREC_MIN);
    for (const auto& c : a) {
        Real v = approx::abs_inf(c);
        if (v > best) best = std::move(v);
    }
    return best;
}

std::ostream& operator<<(std::ostream& os, const RealInterval& x) {
    return os << '[' << x.lo().to_decimal() << ", " << x.hi().to_decimal() << ']';
}

std::ostream& operator<<(std::ostream& os, const ComplexInterval& x) {
    return os << x.re() << " + " << x.im() << "i";
}

} // namespace certmono

#pragma once

// Arbitrary-precision real and complex interval arithmetic.
//
// Endpoints are MPFR floats. Every interval operation rounds its lower
// endpoint toward -inf and its upper endpoint toward +inf. The precision of
// a result is the larger of its operands' precisions; the only way to pick
// a precision is explicitly, through a Context or a constructor argument.

#include <mpfr.h>

#include <cstddef>
#include <gmpxx.h>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace certmono {

using Precision = mpfr_prec_t;

struct Context {
    Precision prec = 53;
};

enum class Round { Down, Up, Nearest };

/// One MPFR float. Precisions up to 128 bits live inline.
class Real {
public:
    explicit Real(Precision prec = 53);
    Real(double v, Precision prec);
    Real(const Real& other);
    Real(Real&& other) noexcept;
    Real& operator=(const Real& other);
    Real& operator=(Real&& other) noexcept;
    ~Real();

    // Parses decimal or hexadecimal ("0x1.8p-3") text; throws ParseError.
    static Real parse(std::string_view text, Precision prec, Round rnd);
    static Real from_rational(const mpq_class& q, Precision prec, Round rnd);
    static Real from_integer(long v, Precision prec);
    /// Same value re-rounded to prec.
    Real with_precision(Precision prec, Round rnd) const;

    Precision precision() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    mpq_class to_rational() const;
    std::string to_decimal(int digits = 17) const;
    /// Exact hexadecimal form, "0x1.8p-3" style; parse() reads it back exactly.
    std::string to_hex() const;

    static Real nan(Precision prec);

private:
    void init(Precision prec);
    bool is_inline() const;

    mpfr_t v_;
    mp_limb_t buf_[2];
};

Real add(const Real& a, const Real& b, Round rnd, Precision prec);
Real sub(const Real& a, const Real& b, Round rnd, Precision prec);
Real mul(const Real& a, const Real& b, Round rnd, Precision prec);
Real div(const Real& a, const Real& b, Round rnd, Precision prec);
Real neg(const Real& a);
Real abs(const Real& a);
Real mul_2si(const Real& a, long e);
const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

inline int compare(const Real& a, const Real& b) { return mpfr_cmp(a.raw(), b.raw()); }
inline bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.raw(), b.raw()) != 0; }
inline bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.raw(), b.raw()) != 0; }
inline bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.raw(), b.raw()) != 0; }
inline bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.raw(), b.raw()) != 0; }
inline bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Closed real interval [lo, hi]. A non-finite endpoint turns both into NaN
/// ("overflowed"); overflowed intervals propagate through every operation.
class RealInterval {
public:
    explicit RealInterval(Precision prec = 53);
    RealInterval(Real lo, Real hi);
    explicit RealInterval(const Real& point);

    static RealInterval from_rational(const mpq_class& q, Precision prec);
    static RealInterval from_string(std::string_view text, Precision prec);
    static RealInterval overflowed(Precision prec);

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    Precision precision() const;

    bool is_overflowed() const { return lo_.is_nan() || hi_.is_nan(); }
    bool is_point() const { return !is_overflowed() && lo_ == hi_; }
    bool contains(const Real& x) const;
    bool contains(const RealInterval& other) const;
    bool contains_zero() const;
    bool intersects(const RealInterval& other) const;

    Real width() const;       // rounded up
    Real magnitude() const;   // max |x|, rounded up
    Real mignitude() const;   // min |x|, rounded down
    Real midpoint(Precision prec) const;

    RealInterval operator-() const;
    friend RealInterval operator+(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator-(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator*(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator/(const RealInterval& a, const RealInterval& b);
    friend RealInterval sqr(const RealInterval& a);

private:
    void settle();

    Real lo_;
    Real hi_;
};

/// A point of C with dyadic coordinates.
struct Complex {
    Real re;
    Real im;

    Complex() = default;
    explicit Complex(Precision prec) : re(prec), im(prec) {}
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
    Complex(double r, double i, Precision prec) : re(r, prec), im(i, prec) {}

    static Complex parse(std::string_view re, std::string_view im, Precision prec);
    Precision precision() const;
};

// Round-to-nearest complex arithmetic for approximate computations (Newton
// steps, midpoint inverses). Never used where a bound is needed.
namespace approx {
Complex add(const Complex& a, const Complex& b, Precision prec);
Complex sub(const Complex& a, const Complex& b, Precision prec);
Complex mul(const Complex& a, const Complex& b, Precision prec);
Complex div(const Complex& a, const Complex& b, Precision prec);
Real abs_inf(const Complex& a);   // max(|re|, |im|)
} // namespace approx

/// Rectangle re x im in C.
class ComplexInterval {
public:
    explicit ComplexInterval(Precision prec = 53) : re_(prec), im_(prec) {}
    ComplexInterval(RealInterval re, RealInterval im) : re_(std::move(re)), im_(std::move(im)) {}
    explicit ComplexInterval(const Complex& point) : re_(point.re), im_(point.im) {}

    static ComplexInterval from_rational(const mpq_class& re, const mpq_class& im, Precision prec);
    static ComplexInterval from_int(long v, Precision prec);

    const RealInterval& re() const { return re_; }
    const RealInterval& im() const { return im_; }
    Precision precision() const;

    bool is_overflowed() const { return re_.is_overflowed() || im_.is_overflowed(); }
    bool is_point() const { return re_.is_point() && im_.is_point(); }
    bool is_zero() const;
    bool contains(const Complex& z) const { return re_.contains(z.re) && im_.contains(z.im); }
    bool contains(const ComplexInterval& o) const { return re_.contains(o.re_) && im_.contains(o.im_); }
    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
    bool intersects(const ComplexInterval& o) const {
        return re_.intersects(o.re_) && im_.intersects(o.im_);
    }

    Complex midpoint(Precision prec) const;
    Real magnitude() const;   // upper bound of the real-inf norm
    Real width() const;       // max of the two side lengths, rounded up

    ComplexInterval operator-() const { return {-re_, -im_}; }
    friend ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b);
    friend ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b);
    friend ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b);
    /// Multiplication by the enclosure of conj(b) / |b|^2. Throws
    /// DivByIntervalContainingZero when the rectangle b meets the origin.
    friend ComplexInterval operator/(const ComplexInterval& a, const ComplexInterval& b);

private:
    RealInterval re_;
    RealInterval im_;
};

ComplexInterval sqr(const ComplexInterval& a);
ComplexInterval pow(const ComplexInterval& a, unsigned k);

using ComplexBox = std::vector<ComplexInterval>;
using ComplexVector = std::vector<Complex>;

/// Square matrix stored row-major.
template <class T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    SquareMatrix(std::size_t n, const T& fill) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

using IntervalMatrix = SquareMatrix<ComplexInterval>;
using ComplexMatrix = SquareMatrix<Complex>;

/// x + rB: coordinate i is [Re c_i - r, Re c_i + r] x [Im c_i - r, Im c_i + r].
ComplexBox box_ball(std::span<const Complex> center, const Real& r);
ComplexBox point_box(std::span<const Complex> center);

/// True iff every coordinate of inner lies in the radius-s real-inf ball
/// around center. Overflowed coordinates give false.
bool box_contained(const ComplexBox& inner, std::span<const Complex> center, const Real& s);

ComplexBox mat_apply(const IntervalMatrix& m, const ComplexBox& v);
ComplexBox mat_apply(const ComplexMatrix& m, const ComplexBox& v);
IntervalMatrix mat_mul(const ComplexMatrix& a, const IntervalMatrix& b);
IntervalMatrix identity_minus(const IntervalMatrix& m);
IntervalMatrix identity_matrix(std::size_t n, Precision prec);
ComplexMatrix midpoint(const IntervalMatrix& m, Precision prec);
ComplexVector midpoint(const ComplexBox& b, Precision prec);

/// Approximate inverse by Gaussian elimination with partial pivoting.
/// Returns false when a pivot is exactly zero.
bool invert(const ComplexMatrix& m, ComplexMatrix& out, Precision prec);

/// Upper bound of max_i |a_i - b_i| in the real-inf sense.
Real distance_inf(std::span<const Complex> a, std::span<const Complex> b);
Real norm_inf(std::span<const Complex> a);

std::ostream& operator<<(std::ostream& os, const RealInterval& x);
std::ostream& operator<<(std::ostream& os, const ComplexInterval& x);

} // namespace certmono

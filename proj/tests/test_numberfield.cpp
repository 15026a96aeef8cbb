#include "certmono/embedding.hpp"
#include "certmono/error.hpp"
#include "certmono/numberfield.hpp"
#include "doctest.h"
#include "test_support.hpp"

#include <random>

using namespace certmono;
using namespace certmono::testing;

namespace {

FieldPtr sqrt2() { return std::make_shared<const NumberField>(QPoly{-2, 0, 1}); }
FieldPtr gaussian() { return std::make_shared<const NumberField>(QPoly{1, 0, 1}); }

NFElement elem(const FieldPtr& f, QPoly c) { return NFElement(f, std::move(c)); }

// sqrt(2) to 300 bits, independent of the Newton/Krawczyk path.
Real sqrt2_reference() {
    Real out(300);
    mpfr_sqrt_ui(out.raw(), 2, MPFR_RNDN);
    return out;
}

NFPoly random_nfpoly(std::mt19937_64& rng, const FieldPtr& f, int degree) {
    std::uniform_int_distribution<int> d(-3, 3);
    NFPoly p;
    for (int k = 0; k <= degree; ++k) p.push_back(elem(f, {d(rng), d(rng)}));
    if (p.back().is_zero()) p.back() = NFElement(f, mpq_class(1));
    return p;
}

NFPoly mul(const NFPoly& a, const NFPoly& b) {
    NFPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    return r;
}

} // namespace

TEST_CASE("parse_rational") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-3/6") == mpq_class(-1, 2));
    CHECK(parse_rational("0.125") == mpq_class(1, 8));
    CHECK(parse_rational("-1.5e2") == -150);
    CHECK(parse_rational("2E-3") == mpq_class(1, 500));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
    CHECK_THROWS_AS(parse_rational("1/-2"), Error);
    CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("number field construction") {
    CHECK(NumberField(QPoly{-4, 0, 2}).min_poly() == QPoly{-2, 0, 1});
    CHECK_THROWS_AS(NumberField(QPoly{1, 2, 1}), Error);   // (nu + 1)^2
    CHECK_THROWS_AS(NumberField(QPoly{5}), Error);
    CHECK(NumberField::rationals()->degree() == 1);
}

TEST_CASE("nf_arith") {
    const FieldPtr k = sqrt2();
    const NFElement nu = NFElement::generator(k);
    SUBCASE("nu * nu = 2") { CHECK(nu * nu == NFElement(k, mpq_class(2))); }
    SUBCASE("inverse of nu is nu / 2") { CHECK(nu.inverse() == elem(k, {0, mpq_class(1, 2)})); }
    SUBCASE("nu + (-nu) = 0") { CHECK((nu + (-nu)).is_zero()); }
    SUBCASE("inverse of zero") { CHECK_THROWS_AS(NFElement(k).inverse(), Error); }
    SUBCASE("reducible modulus is detected lazily") {
        const FieldPtr bad = std::make_shared<const NumberField>(QPoly{-1, 0, 1});
        try {
            (NFElement::generator(bad) - NFElement(bad, mpq_class(1))).inverse();
            FAIL("expected NotInvertible");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotInvertible);
        }
    }
    SUBCASE("field mismatch") { CHECK_THROWS_AS(nu + NFElement::generator(gaussian()), Error); }
    SUBCASE("inverse property on random elements") {
        std::mt19937_64 rng(5);
        const FieldPtr cubic = std::make_shared<const NumberField>(QPoly{-2, 0, 0, 1});
        std::uniform_int_distribution<int> d(-5, 5);
        for (int i = 0; i < 50; ++i) {
            const NFElement a = elem(cubic, {d(rng), d(rng), d(rng)});
            if (a.is_zero()) continue;
            CHECK(a * a.inverse() == NFElement(cubic, mpq_class(1)));
        }
    }
}

TEST_CASE("embed_root") {
    const Context ctx{53};
    SUBCASE("sqrt 2") {
        const Real w(std::ldexp(1.0, -40), 53);
        const EmbeddingBox e = embed_root(sqrt2(), Complex::parse("1.414", "0", 53), w, ctx);
        CHECK(e.alpha.width() <= w);
        CHECK(e.alpha.re().contains(sqrt2_reference()));
        CHECK(e.alpha.im().contains(Real(53)));
    }
    SUBCASE("degree one field gives an exact point") {
        const FieldPtr k = std::make_shared<const NumberField>(QPoly{-3, 1});
        const EmbeddingBox e = embed_root(k, Complex::parse("3.0", "0", 53), ctx);
        CHECK(e.alpha.is_point());
        CHECK(e.alpha.re().lo() == Real(3.0, 53));
    }
    SUBCASE("approximation near i selects i") {
        const EmbeddingBox e = embed_root(gaussian(), Complex::parse("0", "0.99", 53), ctx);
        CHECK(e.alpha.contains(Complex(0.0, 1.0, 53)));
        CHECK_FALSE(e.alpha.contains(Complex(0.0, -1.0, 53)));
    }
    SUBCASE("tighter target refines within the first enclosure") {
        const Complex approx = Complex::parse("1.4", "0", 53);
        const EmbeddingBox loose = embed_root(sqrt2(), approx, Real(std::ldexp(1.0, -20), 53), ctx);
        const EmbeddingBox tight = embed_root(sqrt2(), approx, Real(std::ldexp(1.0, -45), 53), ctx);
        CHECK(loose.alpha.contains(tight.alpha));
        const SquareSystem sys = min_poly_system(*sqrt2(), 53);
        CHECK(same_zero(sys, loose.proof, tight.proof, ctx));
    }
    SUBCASE("width beyond the precision cap escalates precision") {
        const EmbeddingBox e = embed_root(sqrt2(), Complex::parse("1.4", "0", 53), Real(std::ldexp(1.0, -120), 53), ctx);
        CHECK(e.prec > 53);
        CHECK(e.alpha.re().contains(sqrt2_reference()));
    }
    SUBCASE("ambiguous approximation fails") {
        // Halfway between the roots of nu^2 + 1 the derivative vanishes.
        try {
            embed_root(gaussian(), Complex::parse("0", "0", 53), ctx);
            FAIL("expected IsolationFailed");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::IsolationFailed);
        }
    }
}

TEST_CASE("nf_to_interval") {
    const Context ctx{53};
    const FieldPtr k = sqrt2();
    const EmbeddingBox e = embed_root(k, Complex::parse("1.414", "0", 53), ctx);
    CHECK(nf_to_interval(NFElement(k, mpq_class(1)), e).is_point());
    CHECK(nf_to_interval(NFElement::generator(k), e).re().lo() == e.alpha.re().lo());
    CHECK(nf_to_interval(NFElement::generator(k), e).re().hi() == e.alpha.re().hi());
    const NFElement zero = NFElement::generator(k) * NFElement::generator(k) - NFElement(k, mpq_class(2));
    CHECK(nf_to_interval(zero, e).is_zero());

    // The exact value of a(alpha) b(alpha) lies in both enclosures.
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> d(-9, 9);
    const Real s = sqrt2_reference();
    for (int i = 0; i < 100; ++i) {
        const NFElement a = elem(k, {d(rng), d(rng)});
        const NFElement b = elem(k, {d(rng), d(rng)});
        const auto at = [&s](const NFElement& x) {
            return add(Real::from_rational(x.coeffs()[0], 300, Round::Nearest),
                       mul(Real::from_rational(x.coeffs()[1], 300, Round::Nearest), s, Round::Nearest, 300),
                       Round::Nearest, 300);
        };
        const NFElement ab = a * b;
        if (ab.is_rational()) {
            const mpq_class q = ab.coeffs().empty() ? mpq_class(0) : ab.coeffs()[0];
            CHECK(contains(nf_to_interval(ab, e).re(), q));
            continue;
        }
        const Real value = mul(at(a), at(b), Round::Nearest, 300);
        CHECK(nf_to_interval(a * b, e).re().contains(value));
        CHECK((nf_to_interval(a, e) * nf_to_interval(b, e)).re().contains(value));
    }
}

TEST_CASE("resultant") {
    const FieldPtr q = NumberField::rationals();
    const auto r = [&q](long v) { return NFElement(q, mpq_class(v)); };
    CHECK(resultant({r(0), r(0), r(1)}, {r(1)}) == r(1));
    CHECK(resultant({r(-1), r(0), r(1)}, {r(-1), r(1)}).is_zero());
    const FieldPtr k = sqrt2();
    const NFElement one(k, mpq_class(1));
    const NFElement nu = NFElement::generator(k);
    CHECK(resultant({-nu, NFElement(k), one}, {-one, one}) == one - nu);
    // Res(x - a, x - b) = a - b ... up to the sign (-1)^(1*1).
    CHECK(resultant({r(-2), r(1)}, {r(-5), r(1)}) == r(-3));
}

TEST_CASE("resultant vanishes iff gcd is nonconstant") {
    std::mt19937_64 rng(2024);
    const FieldPtr k = sqrt2();
    int common = 0, coprime = 0;
    for (int i = 0; i < 60; ++i) {
        NFPoly a = random_nfpoly(rng, k, 1 + static_cast<int>(rng() % 3));
        NFPoly b = random_nfpoly(rng, k, 1 + static_cast<int>(rng() % 3));
        if (i % 2 == 0) {
            const NFPoly factor = random_nfpoly(rng, k, 1);
            a = mul(a, factor);
            b = mul(b, factor);
        }
        const bool res_zero = resultant(a, b).is_zero();
        const bool gcd_nontrivial = nfpoly::degree(nfpoly::gcd(a, b)) > 0;
        CHECK(res_zero == gcd_nontrivial);
        (gcd_nontrivial ? common : coprime) += 1;
    }
    CHECK(common >= 30);
    CHECK(coprime >= 10);
}

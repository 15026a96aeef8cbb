#include "certmono/certify.hpp"
#include "certmono/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

#include <cmath>

using namespace certmono;
using namespace certmono::testing;

namespace {

const Context ctx53{53};

IntervalPoly constant(std::size_t nvars, const mpq_class& c) {
    return IntervalPoly::constant(nvars, ComplexInterval::from_rational(c, 0, 53));
}

IntervalPoly var(std::size_t nvars, std::size_t i) {
    return IntervalPoly::variable(nvars, i, ComplexInterval::from_int(1, 53));
}

// x^2 - c
SquareSystem square_minus(const mpq_class& c) {
    const IntervalPoly x = var(1, 0);
    return SquareSystem({x * x - constant(1, c)});
}

ComplexMatrix scalar(double a) { return ComplexMatrix(1, Complex(a, 0.0, 53)); }

ComplexVector at(double re, double im = 0) { return {Complex(re, im, 53)}; }

// |root - x|_inf <= rho r, decided in exact rationals.
bool encloses(const MooreBox& m, const std::vector<QComplex>& root) {
    const mpq_class bound = m.inner_radius().to_rational();
    for (std::size_t i = 0; i < root.size(); ++i) {
        const QComplex d = root[i] - to_qcomplex(m.x[i]);
        if (abs(d.re) > bound || abs(d.im) > bound) return false;
    }
    return true;
}

QComplex random_qcomplex(std::mt19937_64& rng) { return {random_dyadic(rng, 6), random_dyadic(rng, 6)}; }

IntervalPoly qconst(std::size_t nvars, const QComplex& c) {
    return IntervalPoly::constant(nvars, ComplexInterval::from_rational(c.re, c.im, 53));
}

} // namespace

TEST_CASE("moore_check examples") {
    SUBCASE("linear system, exact Newton") {
        const SquareSystem s({var(1, 0)});
        CHECK(moore_check(s, at(0), Real(1.0, 53), scalar(1), rho::corrector, ctx53));
    }
    SUBCASE("x^2 - 1 near 1") {
        const SquareSystem s = square_minus(1);
        CHECK(moore_check(s, at(1), Real(0.1, 53), scalar(0.5), rho::predictor, ctx53));
    }
    SUBCASE("x^2 - 1 at 0.5 is not proven") {
        const SquareSystem s = square_minus(1);
        CHECK_FALSE(moore_check(s, at(0.5), Real(0.1, 53), scalar(0.5), rho::predictor, ctx53));
    }
    SUBCASE("monotone in rho") {
        const SquareSystem s = square_minus(1);
        std::mt19937_64 rng(8);
        for (int i = 0; i < 200; ++i) {
            const double x = 1.0 + std::ldexp(static_cast<double>(rng() % 64) - 32.0, -8);
            const Real r(std::ldexp(1.0, -static_cast<int>(rng() % 10)), 53);
            const double a = 0.5 + std::ldexp(static_cast<double>(rng() % 16) - 8.0, -6);
            for (double rh : {1.0 / 8, 1.0 / 3, 1.0 / 2}) {
                if (moore_check(s, at(x), r, scalar(a), rh, ctx53))
                    CHECK(moore_check(s, at(x), r, scalar(a), rho::predictor, ctx53));
            }
        }
    }
}

TEST_CASE("refine") {
    const SquareSystem s = square_minus(1);
    const MooreBox m{at(1.03), Real(0.1, 53), scalar(0.5), rho::predictor};
    REQUIRE(moore_check(s, m, rho::predictor, ctx53));
    SUBCASE("to 1/8 converges to the root") {
        const MooreBox r = refine(s, m, rho::corrector, ctx53);
        CHECK(moore_check(s, r, rho::corrector, ctx53));
        CHECK(r.r <= m.r);
        CHECK(std::abs(r.x[0].re.to_double() - 1.0) <= std::ldexp(1.0, -40));
        CHECK(same_zero(s, m, r, ctx53));
    }
    SUBCASE("idempotent on a 1/8 box") {
        const MooreBox r = refine(s, m, rho::corrector, ctx53);
        const MooreBox rr = refine(s, r, rho::corrector, ctx53);
        CHECK(moore_check(s, rr, rho::corrector, ctx53));
        CHECK(same_zero(s, r, rr, ctx53));
    }
    SUBCASE("radius cap") {
        const Real cap(std::ldexp(1.0, -30), 53);
        const MooreBox r = refine(s, m, rho::equality, ctx53, &cap);
        CHECK(r.r <= cap);
        CHECK(moore_check(s, r, rho::equality, ctx53));
    }
}

TEST_CASE("same_zero") {
    const SquareSystem s = square_minus(1);
    const MooreBox near_one = certify_approx(s, at(1.01), ctx53);
    const MooreBox also_one = certify_approx(s, at(0.98, 0.01), ctx53);
    const MooreBox minus_one = certify_approx(s, at(-1.0), ctx53);
    CHECK(same_zero(s, near_one, also_one, ctx53));
    CHECK(same_zero(s, also_one, near_one, ctx53));
    CHECK(same_zero(s, near_one, near_one, ctx53));
    CHECK_FALSE(same_zero(s, near_one, minus_one, ctx53));
    CHECK_FALSE(same_zero(s, minus_one, near_one, ctx53));
}

TEST_CASE("same_zero partitions roots of unity") {
    const IntervalPoly x = var(1, 0);
    const SquareSystem s({x.pow(5, ComplexInterval::from_int(1, 53)) - constant(1, 1)});
    std::vector<MooreBox> boxes;
    for (int k = 0; k < 10; ++k) {
        const double a = 2 * M_PI * (k % 5) / 5 + (k < 5 ? 0.01 : -0.02);
        boxes.push_back(certify_approx(s, at(std::cos(a), std::sin(a)), ctx53));
    }
    std::vector<int> cls(boxes.size(), -1);
    int classes = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = classes;
        for (std::size_t j = i + 1; j < boxes.size(); ++j)
            if (same_zero(s, boxes[i], boxes[j], ctx53)) cls[j] = classes;
        ++classes;
    }
    CHECK(classes == 5);
    for (int k = 0; k < 5; ++k) CHECK(cls[static_cast<std::size_t>(k)] == cls[static_cast<std::size_t>(k + 5)]);
}

TEST_CASE("certify_approx examples") {
    SUBCASE("sqrt 2") {
        const SquareSystem s = square_minus(2);
        const MooreBox m = certify_approx(s, at(1.4142136), ctx53);
        CHECK(moore_check(s, m, rho::equality, ctx53));
        Real root(300);
        mpfr_sqrt_ui(root.raw(), 2, MPFR_RNDN);
        const Real d = abs(sub(root, m.x[0].re, Round::Up, 300));
        CHECK(d <= m.inner_radius());
    }
    SUBCASE("singular zero") {
        const IntervalPoly x = var(1, 0);
        try {
            certify_approx(SquareSystem({x * x}), at(0), ctx53);
            FAIL("expected CertifyFailed");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::CertifyFailed);
        }
    }
    SUBCASE("linear") {
        const SquareSystem s({var(1, 0) - constant(1, 5)});
        const MooreBox m = certify_approx(s, at(4.9), ctx53);
        CHECK(encloses(m, {{5, 0}}));
    }
}

TEST_CASE("no false fusion of close roots") {
    const mpq_class eps(mpz_class(1), mpz_class(1) << 20);
    const SquareSystem s = square_minus(eps * eps);
    const double e = std::ldexp(1.0, -20);
    const MooreBox plus = certify_approx(s, at(e * 1.01), ctx53);
    const MooreBox minus = certify_approx(s, at(-e * 0.99), ctx53);
    CHECK(encloses(plus, {{eps, 0}}));
    CHECK(encloses(minus, {{-eps, 0}}));
    CHECK_FALSE(same_zero(s, plus, minus, ctx53));
}

TEST_CASE("project_box") {
    // (x^2 - 1/2, z * 1 - 1) in (x, z) and its reduction x^2 - 1/2.
    const IntervalPoly x = var(2, 0), z = var(2, 1);
    const SquareSystem enlarged({x * x - constant(2, mpq_class(1, 2)), z - constant(2, 1)});
    const IntervalPoly x1 = var(1, 0);
    const SquareSystem reduced({x1 * x1 - constant(1, mpq_class(1, 2))});
    const MooreBox big = certify_approx(enlarged, ComplexVector{Complex(0.7071, 0.0, 53), Complex(1.0, 0.0, 53)}, ctx53);
    const MooreBox small = project_box(enlarged, reduced, big, ctx53);
    REQUIRE(small.dim() == 1);
    CHECK(moore_check(reduced, small, rho::equality, ctx53));
    CHECK(std::abs(small.x[0].re.to_double() - std::sqrt(0.5)) < 1e-6);
    CHECK_THROWS_AS(project_box(enlarged, enlarged, big, ctx53), Error);
}

TEST_CASE("certify_approx soundness on systems with known roots") {
    std::mt19937_64 rng(20240601);
    int certified = 0;
    for (int i = 0; i < 200; ++i) {
        if (i % 2 == 0) {
            // Univariate product of linear factors with dyadic roots.
            const std::size_t deg = 2 + rng() % 4;
            std::vector<QComplex> roots;
            IntervalPoly p = constant(1, 1);
            for (std::size_t k = 0; k < deg; ++k) {
                roots.push_back(random_qcomplex(rng));
                p = p * (var(1, 0) - qconst(1, roots.back()));
            }
            const SquareSystem s({p});
            const QComplex target = roots[rng() % deg];
            const Complex guess(target.re.get_d() + 1e-7, target.im.get_d() - 1e-7, 53);
            try {
                const MooreBox m = certify_approx(s, ComplexVector{guess}, ctx53);
                // The box may have captured a different root when roots are close; it must contain one.
                bool any = false;
                for (const auto& r : roots) any = any || encloses(m, {r});
                CHECK(any);
                ++certified;
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::CertifyFailed);
            }
        } else {
            // f = M(x, y) (x - a, y - b) with M random affine: (a, b) is a zero.
            const QComplex a = random_qcomplex(rng), b = random_qcomplex(rng);
            const IntervalPoly dx = var(2, 0) - qconst(2, a), dy = var(2, 1) - qconst(2, b);
            const auto affine = [&rng]() {
                return qconst(2, random_qcomplex(rng)) + var(2, 0) * qconst(2, random_qcomplex(rng)) +
                       var(2, 1) * qconst(2, random_qcomplex(rng));
            };
            const SquareSystem s({affine() * dx + affine() * dy, affine() * dx + affine() * dy});
            const ComplexVector guess{Complex(a.re.get_d() - 1e-7, a.im.get_d(), 53),
                                      Complex(b.re.get_d(), b.im.get_d() + 1e-7, 53)};
            try {
                const MooreBox m = certify_approx(s, guess, ctx53);
                // Other zeros are generically far away; the one found must be (a, b).
                CHECK(encloses(m, {a, b}));
                ++certified;
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::CertifyFailed);
            }
        }
    }
    CHECK(certified >= 180);
}

TEST_CASE("refine preserves the zero") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 50; ++i) {
        const QComplex a = random_qcomplex(rng), b = random_qcomplex(rng);
        const IntervalPoly x = var(1, 0);
        const SquareSystem s({(x - qconst(1, a)) * (x - qconst(1, b))});
        MooreBox m;
        try {
            m = certify_approx(s, ComplexVector{to_complex(a, 53)}, ctx53, rho::predictor);
        } catch (const Error&) {
            continue;
        }
        for (double tau : {rho::corrector, rho::equality, 0.5}) {
            const MooreBox r = refine(s, m, tau, ctx53);
            CHECK(moore_check(s, r, tau, ctx53));
            CHECK(same_zero(s, m, r, ctx53));
        }
    }
}

#include "certmono/error.hpp"
#include "certmono/track.hpp"
#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <complex>
#include <sstream>

using namespace certmono;
using namespace certmono::testing;

namespace {

const Context ctx53{53};

IntervalPoly constant(std::size_t nvars, const mpq_class& re, const mpq_class& im = 0) {
    return IntervalPoly::constant(nvars, ComplexInterval::from_rational(re, im, 53));
}

IntervalPoly var(std::size_t nvars, std::size_t i) {
    return IntervalPoly::variable(nvars, i, ComplexInterval::from_int(1, 53));
}

// F(t, x) = x^2 - t
ParametricSystem sqrt_family() {
    const IntervalPoly t = var(2, 0), x = var(2, 1);
    return ParametricSystem({x * x - t});
}

MooreBox start_box(const ParametricSystem& f, const Complex& t0, ComplexVector approx) {
    return certify_approx(specialize(f, ComplexInterval(t0)), approx, ctx53, rho::corrector);
}

Complex c(double re, double im = 0) { return Complex(re, im, 53); }

bool box_contains(const MooreBox& m, std::complex<double> z, double slack = 1e-12) {
    const double rr = m.inner_radius().to_double() + slack;
    return std::abs(m.x[0].re.to_double() - z.real()) <= rr && std::abs(m.x[0].im.to_double() - z.imag()) <= rr;
}

} // namespace

TEST_CASE("predict_step examples") {
    SUBCASE("x - t at t = 0") {
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - t});
        const MooreBox m{{c(0)}, Real(0.25, 53), ComplexMatrix(1, c(1)), rho::corrector};
        // K = -(x - s) over s in [0, delta]: passes iff delta <= 7/8 r.
        CHECK(predict_step(f, Real(0.0, 128), Real(0.125, 128), m, ctx53));
        CHECK(predict_step(f, Real(0.0, 128), Real(0.21875, 128), m, ctx53));
        CHECK_FALSE(predict_step(f, Real(0.0, 128), Real(0.25, 128), m, ctx53));
    }
    SUBCASE("constant in t") {
        const IntervalPoly x = var(2, 1);
        const ParametricSystem f({x * x - constant(2, 4)});
        const MooreBox m = start_box(f, c(0), {c(2.01)});
        REQUIRE(moore_check(f.at(ComplexInterval(c(0))), m, rho::predictor, ctx53));
        CHECK(predict_step(f, Real(0.0, 128), Real(1.0, 128), m, ctx53));
    }
    SUBCASE("interval spanning a branch point") {
        // x^2 - (t - 1/16): zeros +-i/4 at t = 0 collide at t = 1/16.
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x * x - t + constant(2, mpq_class(1, 16))});
        const MooreBox m = start_box(f, c(0), {c(0, 0.25)});
        CHECK_FALSE(predict_step(f, Real(0.0, 128), Real(0.125, 128), m, ctx53));
        CHECK(predict_step(f, Real(0.0, 128), Real(1.0 / 1024, 128), m, ctx53));
    }
}

TEST_CASE("track_segment") {
    const TrackConfig cfg;
    SUBCASE("linear path") {
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - t});
        const MooreBox end = track_segment(f, start_box(f, c(0), {c(0)}), cfg);
        CHECK(box_contains(end, {1.0, 0.0}));
    }
    SUBCASE("square root along 1/2 -> i/2") {
        const ParametricSystem f = compose_segment(sqrt_family(), c(0.5), c(0, 0.5));
        const MooreBox m0 = start_box(f, c(0), {c(std::sqrt(0.5))});
        TrackStats stats;
        const MooreBox end = track_segment(f, m0, cfg, {}, &stats);
        const std::complex<double> expected = std::polar(std::pow(2.0, -0.5), M_PI / 4) ;
        CHECK(std::abs(expected - std::sqrt(std::complex<double>(0, 0.5))) < 1e-15);
        CHECK(box_contains(end, expected));
        CHECK_FALSE(box_contains(end, -expected));
        CHECK(moore_check(f.at(ComplexInterval(c(1))), end, rho::corrector, ctx53));
        CHECK(stats.steps > 0);
    }
    SUBCASE("singular start") {
        const MooreBox bogus{{c(0)}, Real(0.25, 53), ComplexMatrix(1, c(1)), rho::corrector};
        CHECK_THROWS_AS(track_segment(sqrt_family(), bogus, cfg), Error);
    }
    SUBCASE("trace output") {
        std::ostringstream out;
        TrackConfig traced = cfg;
        traced.trace = &out;
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - t});
        track_segment(f, start_box(f, c(0), {c(0)}), traced);
        std::istringstream lines(out.str());
        std::string line;
        int count = 0;
        while (std::getline(lines, line)) {
            CHECK(line.rfind("t=", 0) == 0);
            CHECK(line.find(" delta=") != std::string::npos);
            CHECK(line.find(" r=") != std::string::npos);
            CHECK(line.find(" prec=53") != std::string::npos);
            ++count;
        }
        CHECK(count > 0);
    }
    SUBCASE("divergence") {
        // x (1 - t) - 1 = 0: the zero 1 / (1 - t) escapes as t -> 1.
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - x * t - constant(2, 1)});
        try {
            track_segment(f, start_box(f, c(0), {c(1)}), cfg);
            FAIL("expected Diverged");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Diverged);
        }
    }
    SUBCASE("precision cap") {
        // The zero 1 / (1 - t) cannot be tracked with no room to escalate.
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - x * t - constant(2, 1)});
        TrackConfig capped = cfg;
        capped.diverge_norm = 1e300;
        capped.max_prec = 64;
        try {
            track_segment(f, start_box(f, c(0), {c(1)}), capped);
            FAIL("expected Stalled");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Stalled);
        }
    }
}

TEST_CASE("track_path") {
    const TrackConfig cfg;
    const PLPath diamond{{c(0.5), c(0, 0.5), c(-0.5), c(0, -0.5), c(0.5)}};
    SUBCASE("diamond around the branch point swaps square roots") {
        const ParametricSystem f = sqrt_family();
        const MooreBox m0 = start_box(f, c(0.5), {c(std::sqrt(0.5))});
        const MooreBox end = track_path(f, diamond, m0, cfg);
        CHECK(box_contains(end, {-std::sqrt(0.5), 0}));
    }
    SUBCASE("single-valued function has trivial monodromy") {
        const IntervalPoly t = var(2, 0), x = var(2, 1);
        const ParametricSystem f({x - t * t});
        const PLPath square{{c(0.5), c(0.5, 0.5), c(-0.5, 0.5), c(-0.5, -0.5), c(0.5, -0.5), c(0.5)}};
        const MooreBox m0 = start_box(f, c(0.5), {c(0.25)});
        const MooreBox end = track_path(f, square, m0, cfg);
        const SquareSystem fb = specialize(f, ComplexInterval(c(0.5)));
        CHECK(same_zero(fb, m0, end, ctx53));
    }
    SUBCASE("degenerate path") {
        const ParametricSystem f = sqrt_family();
        const MooreBox m0 = start_box(f, c(0.5), {c(std::sqrt(0.5))});
        CHECK_THROWS_AS(track_path(f, PLPath{{c(0.5)}}, m0, cfg), Error);
        CHECK_THROWS_AS(track_path(f, PLPath{{c(0.5), c(0.5)}}, m0, cfg), Error);
    }
    SUBCASE("cancellation") {
        const ParametricSystem f = sqrt_family();
        const MooreBox m0 = start_box(f, c(0.5), {c(std::sqrt(0.5))});
        CancelToken token;
        token.cancel();
        try {
            track_path(f, diamond, m0, cfg, token);
            FAIL("expected Cancelled");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Cancelled);
        }
    }
    SUBCASE("reversibility") {
        const ParametricSystem f = sqrt_family();
        const PLPath out{{c(0.5), c(1, 1), c(-1, 1), c(-1, -0.25)}};
        const PLPath back{{c(-1, -0.25), c(-1, 1), c(1, 1), c(0.5)}};
        const MooreBox m0 = start_box(f, c(0.5), {c(-std::sqrt(0.5))});
        const MooreBox there = track_path(f, out, m0, cfg);
        const MooreBox home = track_path(f, back, there, cfg);
        CHECK(same_zero(specialize(f, ComplexInterval(c(0.5))), m0, home, ctx53));
    }
}

TEST_CASE("schedule independence") {
    const ParametricSystem f = sqrt_family();
    const PLPath diamond{{c(0.5), c(0, 0.5), c(-0.5), c(0, -0.5), c(0.5)}};
    const SquareSystem fb = specialize(f, ComplexInterval(c(0.5)));
    const MooreBox m0 = start_box(f, c(0.5), {c(std::sqrt(0.5))});
    const MooreBox other = start_box(f, c(0.5), {c(-std::sqrt(0.5))});
    for (double d : {0.5, 0.125, 1.0 / 64}) {
        for (Precision p : {53, 128}) {
            TrackConfig cfg;
            cfg.delta_init = d;
            cfg.prec = p;
            const MooreBox end = track_path(f, diamond, m0, cfg);
            CHECK(same_zero(fb, end, other, ctx53));
        }
    }
}

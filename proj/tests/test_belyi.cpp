#include "certmono/belyi.hpp"
#include "certmono/error.hpp"
#include "doctest.h"

#include <random>

using namespace certmono;

namespace {

const FieldPtr Q = NumberField::rationals();
const FieldPtr Qsqrt2 = std::make_shared<const NumberField>(QPoly{-2, 0, 1});

NFElement q(long v, const FieldPtr& f = Q) { return NFElement(f, mpq_class(v)); }
NFElement nu(const FieldPtr& f) { return NFElement::generator(f); }

// Sum of c * prod vars^e.
NamedPoly poly(std::vector<std::string> vars, const std::vector<std::pair<NFElement, Monomial>>& terms) {
    ExactPoly p(vars.size());
    for (const auto& [c, m] : terms) p.add_term(m, c);
    return {std::move(vars), std::move(p)};
}

NamedPoly univariate(const std::vector<long>& coeffs) {
    std::vector<std::pair<NFElement, Monomial>> terms;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        if (coeffs[k] != 0) terms.push_back({q(coeffs[k]), {static_cast<std::uint32_t>(k)}});
    return poly({"x"}, terms);
}

Permutation P(const char* text, std::size_t d) { return Permutation::parse(text, d); }

PermutationTriple triple(const char* a, const char* b, const char* c, std::size_t d) { return {P(a, d), P(b, d), P(c, d)}; }

BelyiEntry p1_entry(const std::string& label, const std::vector<long>& num, PermutationTriple expected) {
    BelyiEntry e;
    e.label = label;
    e.degree = num.size() - 1;
    e.field = Q;
    e.embedding_re = "0";
    e.embedding_im = "0";
    e.model = P1Model{univariate(num), univariate({1})};
    e.expected = std::move(expected);
    return e;
}

BelyiEntry smooth_entry() {
    // y^2 - x^3 - 1 with phi = (y + 1) / 2, variables (x, y).
    BelyiEntry e;
    e.label = "smooth-y2-x3-1";
    e.degree = 3;
    e.field = Q;
    e.embedding_re = "0";
    e.embedding_im = "0";
    SmoothModel m;
    m.equations.push_back(poly({"x", "y"}, {{q(1), {0, 2}}, {q(-1), {3, 0}}, {q(-1), {0, 0}}}));
    m.num = poly({"x", "y"}, {{q(1), {0, 1}}, {q(1), {0, 0}}});
    m.den = poly({"x", "y"}, {{q(2), {0, 0}}});
    e.model = m;
    e.expected = triple("(1,2,3)", "(1,2,3)", "(1,2,3)", 3);
    e.group_order = 3;
    return e;
}

BelyiEntry plane_entry() {
    BelyiEntry e;
    e.label = "plane-x(1-x)";
    e.degree = 2;
    e.field = Q;
    e.embedding_re = "0";
    e.embedding_im = "0";
    // x(1 - x) - t over (t, x)
    e.model = PlaneModel{poly({"t", "x"}, {{q(1), {0, 1}}, {q(-1), {0, 2}}, {q(-1), {1, 0}}}), q(4)};
    e.expected = triple("()", "(1,2)", "(1,2)", 2);
    return e;
}

VerifyConfig config() { return VerifyConfig{}; }

} // namespace

TEST_CASE("build_system examples") {
    SUBCASE("p1 x^2") {
        const auto [tracked, boot] = exact_system(P1Model{univariate({0, 0, 1}), univariate({1})}, Q);
        ExactPoly expect(2);
        expect.add_term({0, 2}, q(1));
        expect.add_term({1, 0}, q(-1));
        REQUIRE(tracked.size() == 1);
        CHECK(tracked[0] == expect);
        CHECK(boot[0] == expect);
    }
    SUBCASE("smooth y^2 - x^3 - 1") {
        const auto [tracked, boot] = exact_system(std::get<SmoothModel>(smooth_entry().model), Q);
        REQUIRE(tracked.size() == 2);
        REQUIRE(boot.size() == 3);
        ExactPoly g(3), f(3), z(4);
        g.add_term({0, 0, 2}, q(1));
        g.add_term({0, 3, 0}, q(-1));
        g.add_term({0, 0, 0}, q(-1));
        f.add_term({0, 0, 1}, q(1));
        f.add_term({0, 0, 0}, q(1));
        f.add_term({1, 0, 0}, q(-2));
        z.add_term({0, 0, 0, 1}, q(2));
        z.add_term({0, 0, 0, 0}, q(-1));
        CHECK(tracked[0] == g);
        CHECK(tracked[1] == f);
        CHECK(boot[0] == g.embed(4, {0, 1, 2}));
        CHECK(boot[1] == f.embed(4, {0, 1, 2}));
        CHECK(boot[2] == z);
    }
    SUBCASE("plane x(1 - x) - t with lambda 4") {
        const auto [tracked, boot] = exact_system(plane_entry().model, Q);
        ExactPoly expect(2);
        expect.add_term({0, 1}, q(1));
        expect.add_term({0, 2}, q(-1));
        expect.add_term({1, 0}, NFElement(Q, mpq_class(-1, 4)));
        CHECK(tracked[0] == expect);
    }
    SUBCASE("plane lambda in Q(sqrt 2) is inverted exactly") {
        const PlaneModel m{poly({"t", "x"}, {{q(1, Qsqrt2), {0, 2}}, {q(-1, Qsqrt2), {2, 0}}}), nu(Qsqrt2)};
        const auto [tracked, boot] = exact_system(m, Qsqrt2);
        // t^2 / nu^2 = t^2 / 2
        ExactPoly expect(2);
        expect.add_term({0, 2}, q(1, Qsqrt2));
        expect.add_term({2, 0}, NFElement(Qsqrt2, mpq_class(-1, 2)));
        CHECK(tracked[0] == expect);
    }
    SUBCASE("not coprime") {
        try {
            exact_system(P1Model{univariate({-1, 0, 1}), univariate({-1, 1})}, Q);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NotCoprime);
        }
        // (x - nu)(x + nu) over x - nu, only visible over Q(sqrt 2).
        const NamedPoly num = poly({"x"}, {{q(1, Qsqrt2), {2}}, {q(-2, Qsqrt2), {0}}});
        const NamedPoly den = poly({"x"}, {{q(1, Qsqrt2), {1}}, {-nu(Qsqrt2), {0}}});
        CHECK_THROWS_AS(exact_system(P1Model{num, den}, Qsqrt2), Error);
        const NamedPoly den2 = poly({"x"}, {{q(1, Qsqrt2), {1}}, {q(-1, Qsqrt2), {0}}});
        CHECK_NOTHROW(exact_system(P1Model{num, den2}, Qsqrt2));
    }
    SUBCASE("degenerate models") {
        CHECK_THROWS_AS(exact_system(P1Model{univariate({3}), univariate({1})}, Q), Error);
        const PlaneModel no_x{poly({"t", "x"}, {{q(1), {1, 0}}, {q(-1), {0, 0}}}), q(1)};
        CHECK_THROWS_AS(exact_system(no_x, Q), Error);
        SmoothModel bad = std::get<SmoothModel>(smooth_entry().model);
        bad.equations.clear();
        CHECK_THROWS_AS(exact_system(bad, Q), Error);
    }
}

TEST_CASE("compare_triples ladder") {
    const PermutationTriple cube = triple("(1,2,3)", "()", "(1,3,2)", 3);
    VerifyReport r;
    compare_triples(cube, cube, r);
    CHECK(r.status == VerifyStatus::Pass);
    REQUIRE(r.conjugator.has_value());

    compare_triples(cube, s3_swap(cube), r);
    CHECK(r.status == VerifyStatus::PassUpToS3);
    CHECK(r.s3_index.has_value());

    compare_triples(cube, triple("(1,2)", "(1,2)", "()", 3), r);
    CHECK(r.status == VerifyStatus::FailTriple);
    CHECK_FALSE(r.conjugator.has_value());

    // A triple whose orientation reversal is not an S3 relabeling of it.
    std::mt19937_64 rng(11);
    bool found = false;
    for (int i = 0; i < 500 && !found; ++i) {
        std::vector<std::uint32_t> a(7), b(7);
        for (std::uint32_t k = 0; k < 7; ++k) a[k] = b[k] = k;
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        const Permutation s0(a), s1(b);
        const PermutationTriple t{s0, s1, (s0 * s1).inverse()};
        compare_triples(t, inverse_triple(t), r);
        if (r.status == VerifyStatus::PassInverse) {
            found = true;
            REQUIRE(r.conjugator.has_value());
            // Reversing twice is the identity, so the witness relabels t itself.
            const auto orbit = s3_orbit(inverse_triple(inverse_triple(t)));
            CHECK(conjugate(t.s0, *r.conjugator) == orbit[*r.s3_index].s0);
            CHECK(conjugate(t.s1, *r.conjugator) == orbit[*r.s3_index].s1);
        }
    }
    CHECK(found);
}

TEST_CASE("verify_entry examples") {
    SUBCASE("x^3 passes") {
        const VerifyReport r = verify_entry(p1_entry("x3", {0, 0, 0, 1}, triple("(1,2,3)", "()", "(1,3,2)", 3)), config());
        CHECK(r.status == VerifyStatus::Pass);
        CHECK(r.group_order == "3");
        CHECK(r.transitive);
        REQUIRE(r.computed.has_value());
        CHECK(r.computed->valid());
        CHECK(r.timings.size() == 5);
    }
    SUBCASE("swapped expectation passes up to S3") {
        const VerifyReport r = verify_entry(p1_entry("x3", {0, 0, 0, 1}, triple("()", "(1,2,3)", "(1,3,2)", 3)), config());
        CHECK(r.status == VerifyStatus::PassUpToS3);
    }
    SUBCASE("wrong cycle types fail") {
        const VerifyReport r =
            verify_entry(p1_entry("x3", {0, 0, 0, 1}, triple("(1,2)", "(2,3)", "(1,2,3)", 3)), config());
        CHECK(r.status == VerifyStatus::FailTriple);
        CHECK_FALSE(r.conjugator.has_value());
    }
    SUBCASE("smooth model") {
        const VerifyReport r = verify_entry(smooth_entry(), config());
        CHECK(r.status == VerifyStatus::Pass);
        CHECK(r.group_order == "3");
        REQUIRE(r.computed.has_value());
        CHECK(cycle_type(r.computed->s0) == CycleType{3});
        CHECK(cycle_type(r.computed->s1) == CycleType{3});
        CHECK(cycle_type(r.computed->sinf) == CycleType{3});
    }
    SUBCASE("plane model") {
        const VerifyReport r = verify_entry(plane_entry(), config());
        CHECK(r.status == VerifyStatus::Pass);
        CHECK(r.group_order == "2");
    }
    SUBCASE("coefficients in Q(sqrt 2)") {
        // (x - nu)^2: a double point over 0 only.
        BelyiEntry e;
        e.label = "sqrt2";
        e.degree = 2;
        e.field = Qsqrt2;
        e.embedding_re = "1.41";
        e.embedding_im = "0";
        e.model = P1Model{poly({"x"}, {{q(1, Qsqrt2), {2}}, {nu(Qsqrt2).times_int(-2), {1}}, {q(2, Qsqrt2), {0}}}),
                          poly({"x"}, {{q(1, Qsqrt2), {0}}})};
        e.expected = triple("(1,2)", "()", "(1,2)", 2);
        const VerifyReport r = verify_entry(e, config());
        CHECK(r.status == VerifyStatus::Pass);
        CHECK(r.alpha.rfind("1.41421356", 0) == 0);
    }
    SUBCASE("errors are statuses with a phase") {
        BelyiEntry e = p1_entry("bad", {-1, 0, 1}, triple("(1,2)", "()", "(1,2)", 2));
        e.model = P1Model{univariate({-1, 0, 1}), univariate({-1, 1})};
        const VerifyReport r = verify_entry(e, config());
        CHECK(r.status == VerifyStatus::Error);
        CHECK(r.error_kind == ErrorKind::NotCoprime);
        CHECK(r.error_phase == "system");

        BelyiEntry wrong_degree = p1_entry("deg", {0, 0, 1}, triple("(1,2)", "()", "(1,2)", 2));
        wrong_degree.degree = 3;
        const VerifyReport r2 = verify_entry(wrong_degree, config());
        CHECK(r2.error_kind == ErrorKind::FiberCountMismatch);
        CHECK(r2.error_phase == "fiber");
    }
    SUBCASE("start fiber escape hatch") {
        VerifyConfig cfg = config();
        cfg.start_fiber = std::vector<ComplexVector>{{Complex(0.7, 0.0, 53)}, {Complex(-0.7, 0.0, 53)}};
        const VerifyReport r = verify_entry(p1_entry("x2", {0, 0, 1}, triple("(1,2)", "()", "(1,2)", 2)), cfg);
        CHECK(r.status == VerifyStatus::Pass);
        cfg.start_fiber->pop_back();
        const VerifyReport r2 = verify_entry(p1_entry("x2", {0, 0, 1}, triple("(1,2)", "()", "(1,2)", 2)), cfg);
        CHECK(r2.error_kind == ErrorKind::FiberCountMismatch);
    }
}

TEST_CASE("seed does not change the triple") {
    std::optional<PermutationTriple> first;
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        VerifyConfig cfg = config();
        cfg.seed = seed;
        const VerifyReport r = verify_entry(smooth_entry(), cfg);
        REQUIRE(r.computed.has_value());
        if (!first) first = r.computed;
        CHECK(*r.computed == *first);
    }
}

TEST_CASE("verify_batch") {
    BatchSummary summary;
    CHECK(verify_batch({}, config(), &summary).empty());
    CHECK(summary.total() == 0);

    std::vector<BatchItem> items;
    items.push_back({"x2", [] { return p1_entry("x2", {0, 0, 1}, triple("(1,2)", "()", "(1,2)", 2)); }});
    items.push_back({"broken", []() -> BelyiEntry { fail(ErrorKind::ParseError, "line 3: bad rational"); }});
    items.push_back({"plane", [] { return plane_entry(); }});
    VerifyConfig cfg = config();
    cfg.threads = 2;
    const auto reports = verify_batch(items, cfg, &summary);
    REQUIRE(reports.size() == 3);
    CHECK(summary.pass == 2);
    CHECK(summary.error == 1);
    CHECK(reports[1].label == "broken");
    CHECK(reports[1].error_phase == "parse");
    CHECK(reports[1].error_kind == ErrorKind::ParseError);
    CHECK(exit_code(reports) == 2);

    const auto again = verify_batch(items, config(), nullptr);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(again[i].status == reports[i].status);
        CHECK(again[i].computed == reports[i].computed);
        CHECK(again[i].conjugator == reports[i].conjugator);
    }

    std::vector<VerifyReport> rs(2);
    rs[0].status = VerifyStatus::Pass;
    rs[1].status = VerifyStatus::PassInverse;
    CHECK(exit_code(rs) == 0);
    rs[1].status = VerifyStatus::FailTriple;
    CHECK(exit_code(rs) == 1);
}

#include "certmono/belyi.hpp"

#include "certmono/error.hpp"
#include "certmono/parallel.hpp"

#include <algorithm>
#include <sstream>

namespace certmono {

namespace {

using Clock = std::chrono::steady_clock;

NFElement one_of(const FieldPtr& field) { return NFElement(field, mpq_class(1)); }

ExactPoly variable(std::size_t nvars, std::size_t var, const FieldPtr& field) {
    return ExactPoly::variable(nvars, var, one_of(field));
}

// p over (x_1..x_n) as a polynomial over (t, x_1..x_n), plus one spare
// variable at the end when `extra` is set.
ExactPoly lift(const NamedPoly& p, std::size_t n, bool extra = false) {
    std::vector<std::size_t> positions(p.poly.nvars());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i + 1;
    return p.poly.embed(n + 1 + (extra ? 1 : 0), positions);
}

NFPoly dense(const ExactPoly& p, const FieldPtr& field) {
    NFPoly out(p.degree_in(0) + 1, NFElement(field));
    for (const auto& [m, c] : p.terms()) out[m[0]] = c;
    return out;
}

void check_vars(const NamedPoly& p, std::size_t n, const char* what) {
    if (p.poly.nvars() != n || p.vars.size() != n)
        fail(ErrorKind::DegenerateModel, std::string(what) + ": expected " + std::to_string(n) + " variables");
}

std::string interval_text(const ComplexInterval& z) {
    const Complex mid = z.midpoint(64);
    std::ostringstream os;
    os << mid.re.to_decimal(20) << (mid.im.sign() < 0 ? " - " : " + ") << abs(mid.im).to_decimal(20) << "i +/- "
       << z.width().to_decimal(3);
    return os.str();
}

struct PhaseClock {
    VerifyReport& report;
    std::string current;
    Clock::time_point start;

    void begin(std::string phase) {
        current = std::move(phase);
        start = Clock::now();
    }
    void end() {
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        for (auto& t : report.timings) {
            if (t.phase == current) {
                t.seconds += secs;
                return;
            }
        }
        report.timings.push_back({current, secs});
    }
};

} // namespace

std::pair<std::vector<ExactPoly>, std::vector<ExactPoly>> exact_system(const BelyiModel& model, const FieldPtr& field) {
    const NFElement one = one_of(field);
    if (const auto* p1 = std::get_if<P1Model>(&model)) {
        check_vars(p1->num, 1, "p1 numerator");
        check_vars(p1->den, 1, "p1 denominator");
        if (p1->den.poly.is_zero()) fail(ErrorKind::DegenerateModel, "p1 denominator is zero");
        if (p1->num.poly.is_zero()) fail(ErrorKind::DegenerateModel, "p1 numerator is zero");
        const NFElement res = resultant(dense(p1->num.poly, field), dense(p1->den.poly, field));
        if (res.is_zero()) fail(ErrorKind::NotCoprime, "numerator and denominator have a common factor");
        const ExactPoly t = variable(2, 0, field);
        ExactPoly f = lift(p1->num, 1) - t * lift(p1->den, 1);
        if (f.degree_in(1) == 0) fail(ErrorKind::DegenerateModel, "constant map");
        return {{f}, {f}};
    }
    if (const auto* sm = std::get_if<SmoothModel>(&model)) {
        const std::size_t n = sm->num.poly.nvars();
        if (n < 1 || sm->equations.size() + 1 != n)
            fail(ErrorKind::DegenerateModel, "smooth model needs n - 1 equations in n variables");
        check_vars(sm->num, n, "smooth numerator");
        check_vars(sm->den, n, "smooth denominator");
        for (const auto& g : sm->equations) {
            check_vars(g, n, "smooth equation");
            if (g.vars != sm->num.vars) fail(ErrorKind::DegenerateModel, "smooth model variables differ");
            if (g.poly.is_zero()) fail(ErrorKind::DegenerateModel, "zero chart equation");
        }
        if (sm->den.vars != sm->num.vars) fail(ErrorKind::DegenerateModel, "smooth model variables differ");
        if (sm->den.poly.is_zero()) fail(ErrorKind::DegenerateModel, "smooth denominator is zero");
        std::vector<ExactPoly> tracked, boot;
        for (const auto& g : sm->equations) {
            tracked.push_back(lift(g, n));
            boot.push_back(lift(g, n, true));
        }
        tracked.push_back(lift(sm->num, n) - variable(n + 1, 0, field) * lift(sm->den, n));
        boot.push_back(lift(sm->num, n, true) - variable(n + 2, 0, field) * lift(sm->den, n, true));
        // q z - 1 keeps the bootstrap away from the common zeros of p and q.
        boot.push_back(lift(sm->den, n, true) * variable(n + 2, n + 1, field) - ExactPoly::constant(n + 2, one));
        return {tracked, boot};
    }
    const auto& pl = std::get<PlaneModel>(model);
    check_vars(pl.curve, 2, "plane curve");
    if (pl.curve.poly.degree_in(0) == 0 || pl.curve.poly.degree_in(1) == 0)
        fail(ErrorKind::DegenerateModel, "plane curve must involve both t and x");
    if (pl.lambda.is_zero()) fail(ErrorKind::DegenerateModel, "lambda is zero");
    // t -> t / lambda, exactly.
    const NFElement mu = pl.lambda.inverse();
    ExactPoly f(2);
    for (const auto& [m, c] : pl.curve.poly.terms()) f.add_term(m, c * mu.pow(m[0]));
    return {{f}, {f}};
}

BuiltSystem build_system(const BelyiModel& model, const EmbeddingBox& emb) {
    auto [tracked, boot] = exact_system(model, emb.field);
    const auto embed_all = [&](const std::vector<ExactPoly>& ps) {
        std::vector<IntervalPoly> out;
        for (const auto& p : ps) out.push_back(substitute_nu(p, emb));
        return ParametricSystem(std::move(out));
    };
    BuiltSystem b{embed_all(tracked), embed_all(boot), FiberMode::Univariate};
    if (std::holds_alternative<SmoothModel>(model)) b.mode = FiberMode::Multivariate;
    return b;
}

std::string_view to_string(VerifyStatus s) {
    switch (s) {
    case VerifyStatus::Pass: return "PASS";
    case VerifyStatus::PassUpToS3: return "PASS_UP_TO_S3";
    case VerifyStatus::PassInverse: return "PASS_INVERSE";
    case VerifyStatus::FailTriple: return "FAIL_TRIPLE";
    case VerifyStatus::Error: return "ERROR";
    }
    return "ERROR";
}

void compare_triples(const PermutationTriple& computed, const PermutationTriple& expected, VerifyReport& report) {
    report.s3_index.reset();
    report.conjugator.reset();
    if (computed.degree() != expected.degree()) {
        report.status = VerifyStatus::FailTriple;
        return;
    }
    const auto search = [&](const std::vector<PermutationTriple>& orbit, bool skip_first) -> bool {
        for (std::size_t i = skip_first ? 1 : 0; i < orbit.size(); ++i) {
            if (auto pi = simultaneously_conjugate(computed, orbit[i])) {
                report.s3_index = i;
                report.conjugator = std::move(*pi);
                return true;
            }
        }
        return false;
    };
    const auto orbit = s3_orbit(expected);
    if (auto pi = simultaneously_conjugate(computed, expected)) {
        report.status = VerifyStatus::Pass;
        report.conjugator = std::move(*pi);
    } else if (search(orbit, true)) {
        report.status = VerifyStatus::PassUpToS3;
    } else if (search(s3_orbit(inverse_triple(expected)), false)) {
        report.status = VerifyStatus::PassInverse;
    } else {
        report.status = VerifyStatus::FailTriple;
    }
}

namespace {

constexpr int kRetries = 3;

void run_pipeline(const BelyiEntry& entry, const VerifyConfig& cfg, VerifyReport& report, PhaseClock& clock) {
    const Context ctx{cfg.track.prec};
    clock.begin("embedding");
    const Complex approx = Complex::parse(entry.embedding_re, entry.embedding_im, ctx.prec);
    Real width(1.0, 53);
    mpfr_mul_2si(width.raw(), width.raw(), -static_cast<long>(ctx.prec - 10), MPFR_RNDN);
    const EmbeddingBox emb = embed_root(entry.field, approx, width, ctx);
    report.alpha = interval_text(emb.alpha);
    clock.end();

    clock.begin("system");
    const BuiltSystem sys = build_system(entry.model, emb);
    const Complex base = Complex::parse(cfg.base, "0", 128);
    const Real radius = Real::parse(cfg.radius, 128, Round::Nearest);
    clock.end();

    clock.begin("fiber");
    Fiber fiber;
    if (cfg.start_fiber) {
        fiber = certify_fiber(specialize(sys.tracked, ComplexInterval(base)), base, *cfg.start_fiber, entry.degree,
                              ctx);
    } else if (sys.mode == FiberMode::Univariate) {
        fiber = univariate_fiber(sys.tracked, base, entry.degree, cfg.seed, ctx);
    } else {
        fiber = bootstrap_fiber(sys.tracked, sys.bootstrap, base, entry.degree, cfg.seed, cfg.track, cfg.threads);
    }
    clock.end();

    clock.begin("monodromy");
    const PermutationTriple t = monodromy_triple(sys.tracked, fiber, radius, cfg.track, cfg.threads);
    clock.end();

    clock.begin("compare");
    const std::vector<Permutation> gens{t.s0, t.s1};
    report.group_order = group_order(gens, t.degree()).get_str();
    report.transitive = is_transitive(gens, t.degree());
    report.computed = t;
    compare_triples(t, entry.expected, report);
    clock.end();
}

} // namespace

VerifyReport verify_entry(const BelyiEntry& entry, const VerifyConfig& cfg) {
    VerifyReport report;
    report.label = entry.label;
    report.seed = cfg.seed;
    report.prec = cfg.track.prec;
    report.base = cfg.base;
    report.radius = cfg.radius;
    PhaseClock clock{report, {}, {}};
    // Stalls usually mean the coefficient enclosures are too wide: retry with
    // doubled precision and a correspondingly tighter embedding.
    const auto retryable = [](ErrorKind k) {
        return k == ErrorKind::Stalled || k == ErrorKind::RefineStalled || k == ErrorKind::CertifyFailed ||
               k == ErrorKind::MatchFailed || k == ErrorKind::FiberCountMismatch || k == ErrorKind::IsolationFailed;
    };
    for (int attempt = 0;; ++attempt) {
        VerifyConfig run = cfg;
        run.track.prec = std::min(cfg.track.max_prec, cfg.track.prec << attempt);
        run.seed = cfg.seed + static_cast<std::uint64_t>(attempt);
        report.final_prec = run.track.prec;
        report.retries = static_cast<std::size_t>(attempt);
        try {
            run_pipeline(entry, run, report, clock);
            report.error_kind.reset();
            report.error_phase.clear();
            report.error_message.clear();
            return report;
        } catch (const Error& e) {
            report.status = VerifyStatus::Error;
            report.error_kind = e.kind();
            report.error_phase = clock.current;
            report.error_message = e.what();
            if (!retryable(e.kind()) || attempt == kRetries || run.track.prec >= cfg.track.max_prec) return report;
        } catch (const std::exception& e) {
            report.status = VerifyStatus::Error;
            report.error_kind = ErrorKind::Precondition;
            report.error_phase = clock.current;
            report.error_message = e.what();
            return report;
        }
    }
}

std::vector<VerifyReport> verify_batch(const std::vector<BatchItem>& items, const VerifyConfig& cfg,
                                       BatchSummary* summary) {
    std::vector<VerifyReport> reports(items.size());
    VerifyConfig inner = cfg;
    if (items.size() > 1) inner.threads = 1;
    parallel_for(items.size(), items.size() > 1 ? cfg.threads : 1, [&](std::size_t i) {
        BelyiEntry entry;
        try {
            entry = items[i].load();
        } catch (const std::exception& e) {
            VerifyReport r;
            r.label = items[i].label;
            r.status = VerifyStatus::Error;
            const auto* err = dynamic_cast<const Error*>(&e);
            r.error_kind = err != nullptr ? err->kind() : ErrorKind::ParseError;
            r.error_phase = "parse";
            r.error_message = e.what();
            r.seed = cfg.seed;
            r.prec = cfg.track.prec;
            r.base = cfg.base;
            r.radius = cfg.radius;
            reports[i] = std::move(r);
            return;
        }
        reports[i] = verify_entry(entry, inner);
    });
    if (summary != nullptr) {
        *summary = {};
        for (const auto& r : reports) {
            switch (r.status) {
            case VerifyStatus::Pass: ++summary->pass; break;
            case VerifyStatus::PassUpToS3: ++summary->pass_up_to_s3; break;
            case VerifyStatus::PassInverse: ++summary->pass_inverse; break;
            case VerifyStatus::FailTriple: ++summary->fail_triple; break;
            case VerifyStatus::Error: ++summary->error; break;
            }
        }
    }
    return reports;
}

int exit_code(const std::vector<VerifyReport>& reports) {
    int code = 0;
    for (const auto& r : reports) {
        if (r.status == VerifyStatus::Error) code = 2;
        else if (r.status == VerifyStatus::FailTriple) code = std::max(code, 1);
    }
    return code;
}

} // namespace certmono

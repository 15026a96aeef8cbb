#include "certmono/track.hpp"

#include "certmono/error.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace certmono {

namespace {

constexpr Precision kParamPrec = 128;

ComplexInterval param(const Real& lo, const Real& hi) {
    return {RealInterval(lo, hi), RealInterval(kParamPrec)};
}

ComplexInterval param(const Real& t) { return param(t, t); }

void trace_line(std::ostream& out, const Real& t, const Real& delta, const Real& r, Precision prec) {
    static std::mutex mu;
    std::ostringstream line;
    line << "t=" << t.to_decimal(12) << " delta=" << delta.to_decimal(6) << " r=" << r.to_decimal(6)
         << " prec=" << prec << '\n';
    const std::lock_guard<std::mutex> lock(mu);
    out << line.str();
}

bool diverged(const ComplexVector& x, const TrackConfig& cfg) {
    if (!cfg.projective_coordinate) return norm_inf(x) > Real(cfg.diverge_norm, 53);
    // |x_i| > D |x_k| for some i, in the real inf-norm used everywhere else.
    const Real scaled = mul(approx::abs_inf(x.at(*cfg.projective_coordinate)), Real(cfg.diverge_norm, 53), Round::Up, 53);
    return norm_inf(x) > scaled;
}

} // namespace

bool predict_step(const ParametricSystem& f, const Real& t, const Real& delta, const MooreBox& m,
                  const Context& ctx) {
    const Real end = add(t, delta, Round::Up, std::max(kParamPrec, t.precision()));
    return moore_check(f.at(param(t, end)), m, rho::predictor, ctx);
}

MooreBox track_segment(const ParametricSystem& f, const MooreBox& m0, const TrackConfig& cfg,
                       const CancelToken& cancel, TrackStats* stats) {
    require(cfg.delta_min > 0 && cfg.delta_min < cfg.delta_init && cfg.delta_growth > 1,
            "track: invalid step configuration");
    require(m0.dim() == f.dim(), "track: dimension mismatch");
    Context ctx{std::max(cfg.prec, m0.r.precision())};
    const Real one(1.0, kParamPrec);
    Real t(0.0, kParamPrec);
    require(moore_check(f.at(param(t)), m0, m0.rho, ctx), "track: start box is not a Moore box at t = 0");

    const Real delta_min(cfg.delta_min, kParamPrec);
    const Real growth(cfg.delta_growth, 53);
    Real delta(cfg.delta_init, kParamPrec);
    MooreBox m = m0;
    std::size_t escalations = 0;
    std::size_t steps = 0;

    const auto escalate = [&]() {
        const Precision next = ctx.prec * 2;
        if (next > cfg.max_prec)
            fail(ErrorKind::Stalled, "precision cap " + std::to_string(cfg.max_prec) + " reached at t = " +
                                         t.to_decimal(12));
        ctx.prec = next;
        ++escalations;
    };

    bool at_end = false;
    while (true) {
        if (cancel.cancelled()) fail(ErrorKind::Cancelled, "tracking cancelled");
        const auto slice = f.at(param(t));
        try {
            m = refine(slice, m, rho::corrector, ctx);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RefineStalled) throw;
            escalate();
            continue;
        }
        if (diverged(m.x, cfg))
            fail(ErrorKind::Diverged, "path diverged at t = " + t.to_decimal(12));
        if (at_end) break;

        // A larger uniqueness radius allows longer steps; it contains the old
        // inclusion region, so the zero is the same.
        for (int k = 0; k < 6; ++k) {
            Real wider = mul_2si(m.r, 1);
            if (!moore_check(slice, m.x, wider, m.A, rho::corrector, ctx)) break;
            m.r = std::move(wider);
        }

        const Real remaining = sub(one, t, Round::Nearest, kParamPrec);
        Real step = mul(delta, growth, Round::Nearest, kParamPrec);
        bool accepted = false;
        while (true) {
            if (step > remaining) step = remaining;
            if (predict_step(f, t, step, m, ctx)) {
                accepted = true;
                break;
            }
            if (step < delta_min) break;
            step = mul_2si(step, -1);
        }
        if (!accepted) {
            escalate();
            continue;
        }
        if (cfg.max_steps != 0 && ++steps > cfg.max_steps)
            fail(ErrorKind::Stalled, "step budget exhausted at t = " + t.to_decimal(12));
        t = add(t, step, Round::Nearest, kParamPrec);
        delta = step;
        m.rho = rho::predictor;
        if (stats != nullptr) ++stats->steps;
        if (cfg.trace != nullptr) trace_line(*cfg.trace, t, step, m.r, ctx.prec);
        at_end = t >= one;
    }
    if (stats != nullptr) {
        stats->escalations += escalations;
        stats->final_prec = std::max(stats->final_prec, ctx.prec);
    }
    return m;
}

MooreBox track_path(const ParametricSystem& f, const PLPath& path, const MooreBox& m0, const TrackConfig& cfg,
                    const CancelToken& cancel, TrackStats* stats) {
    const auto& v = path.vertices;
    require(v.size() >= 2, "track_path: a path needs at least two vertices");
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        require(v[i].re != v[i + 1].re || v[i].im != v[i + 1].im, "track_path: consecutive vertices coincide");
    TrackConfig c = cfg;
    MooreBox m = m0;
    TrackStats local;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        m = track_segment(compose_segment(f, v[i], v[i + 1]), m, c, cancel, &local);
        c.prec = std::max(c.prec, local.final_prec);
    }
    if (stats != nullptr) {
        stats->steps += local.steps;
        stats->escalations += local.escalations;
        stats->final_prec = std::max(stats->final_prec, local.final_prec);
    }
    return m;
}

} // namespace certmono

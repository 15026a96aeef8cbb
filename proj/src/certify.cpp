#include "certmono/certify.hpp"

#include "certmono/error.hpp"

#include <algorithm>

namespace certmono {

namespace {

ComplexVector rounded(std::span<const Complex> x, Precision prec) {
    ComplexVector out;
    out.reserve(x.size());
    for (const auto& c : x)
        out.emplace_back(c.re.with_precision(prec, Round::Nearest), c.im.with_precision(prec, Round::Nearest));
    return out;
}

Real times(double k, const Real& r, Round rnd) {
    const Precision p = std::max<Precision>(r.precision(), 53);
    return mul(Real(k, 53), r, rnd, p);
}

bool inverse_jacobian(const SystemEvaluator& s, std::span<const Complex> x, ComplexMatrix& out, Precision prec) {
    const IntervalMatrix j = s.jacobian(point_box(x));
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::size_t k = 0; k < j.size(); ++k)
            if (j(i, k).is_overflowed()) return false;
    return invert(midpoint(j, prec), out, prec);
}

// d + s <= bound, all upper bounds.
bool sum_le(const Real& d, const Real& s, const Real& bound) {
    const Precision p = std::max({d.precision(), s.precision(), bound.precision()});
    return add(d, s, Round::Up, p) <= bound;
}

// One attempt at tau for center x and matrix a, radii descending from hi.
// `old` links the result to the previous zero.
bool radius_ladder(const SystemEvaluator& s, const ComplexVector& x, const ComplexMatrix& a, double tau,
                   const Context& ctx, const MooreBox& old, Real hi, MooreBox& out) {
    const Real d = distance_inf(x, old.x);
    const Real old_inner = old.inner_radius();
    const Real floor = mul_2si(add(Real(1.0, 53), norm_inf(x), Round::Up, 53), -(ctx.prec - 8));
    for (int k = 0; k < 48 && hi >= floor; ++k, hi = mul_2si(hi, -1)) {
        const bool inside_old = sum_le(d, hi, old.r);
        const bool covers_old = sum_le(d, old_inner, hi);
        if (!inside_old && !covers_old) continue;
        if (moore_check(s, x, hi, a, tau, ctx)) {
            out = MooreBox{x, hi, a, tau};
            return true;
        }
    }
    return false;
}

} // namespace

Real MooreBox::inner_radius() const { return times(rho, r, Round::Up); }

bool moore_check(const SystemEvaluator& s, std::span<const Complex> x, const Real& r, const ComplexMatrix& a,
                 double rho_value, const Context& ctx) {
    require(rho_value > 0.0 && rho_value < 1.0, "moore_check: rho must lie in (0, 1)");
    require(r.sign() > 0, "moore_check: radius must be positive");
    const std::size_t n = s.dim();
    require(x.size() == n && a.size() == n, "moore_check: dimension mismatch");

    const ComplexBox fx = s.eval(point_box(x));
    const IntervalMatrix j = s.jacobian(box_ball(x, r));
    const IntervalMatrix contraction = identity_minus(mat_mul(a, j));

    const ComplexVector origin(n, Complex(ctx.prec));
    const ComplexBox v = box_ball(origin, r);
    const ComplexBox afx = mat_apply(a, fx);
    const ComplexBox mv = mat_apply(contraction, v);
    ComplexBox k;
    k.reserve(n);
    for (std::size_t i = 0; i < n; ++i) k.push_back(mv[i] - afx[i]);

    return box_contained(k, origin, times(rho_value, r, Round::Down));
}

bool newton_step(const SystemEvaluator& s, ComplexVector& x, ComplexMatrix& a, const Context& ctx) {
    if (!inverse_jacobian(s, x, a, ctx.prec)) return false;
    const ComplexVector fx = midpoint(s.eval(point_box(x)), ctx.prec);
    const std::size_t n = x.size();
    ComplexVector next;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc(ctx.prec);
        for (std::size_t j = 0; j < n; ++j) acc = approx::add(acc, approx::mul(a(i, j), fx[j], ctx.prec), ctx.prec);
        next.push_back(approx::sub(x[i], acc, ctx.prec));
    }
    for (const auto& c : next)
        if (!c.re.is_finite() || !c.im.is_finite()) return false;
    x = std::move(next);
    return true;
}

MooreBox refine(const SystemEvaluator& s, const MooreBox& m, double tau, const Context& ctx, const Real* max_radius) {
    require(tau > 0.0 && tau < 1.0, "refine: tau must lie in (0, 1)");
    const bool capped = max_radius != nullptr;
    if ((!capped || m.r <= *max_radius) && moore_check(s, m, tau, ctx)) {
        MooreBox out = m;
        out.rho = tau;
        return out;
    }
    ComplexVector x = rounded(m.x, ctx.prec);
    ComplexMatrix a;
    MooreBox out;
    Real floor(1.0, 53);
    mpfr_mul_2si(floor.raw(), floor.raw(), -static_cast<long>(ctx.prec - 8), MPFR_RNDN);
    for (int iter = 0; iter < 6; ++iter) {
        // Newton until the steps stop shrinking quadratically or reach rounding level.
        bool ok = true;
        Real last(53);
        for (int k = 0; k < 6; ++k) {
            const ComplexVector prev = x;
            if (!(ok = newton_step(s, x, a, ctx))) break;
            const Real step = distance_inf(prev, x);
            if (step <= mul(floor, add(Real(1.0, 53), norm_inf(x), Round::Up, 53), Round::Up, 53)) break;
            if (k > 0 && step > mul_2si(last, -1)) break;
            last = step;
        }
        if (!ok || !inverse_jacobian(s, x, a, ctx.prec)) break;
        Real hi = m.r;
        if (capped && *max_radius < hi) hi = *max_radius;
        if (radius_ladder(s, x, a, tau, ctx, m, hi, out)) return out;
    }
    fail(ErrorKind::RefineStalled, "cannot refine Moore box at " + std::to_string(ctx.prec) + " bits");
}

Real distance_inf_lower(std::span<const Complex> a, std::span<const Complex> b) {
    require(a.size() == b.size(), "distance_inf_lower dimension mismatch");
    Real best(MPFR_PREC_MIN);
    const auto upd = [&best](const Real& x, const Real& y) {
        const Precision p = std::max(x.precision(), y.precision());
        const Real lo = sub(x, y, Round::Down, p);
        const Real hi = sub(x, y, Round::Up, p);
        if (lo.sign() * hi.sign() <= 0) return;
        Real d = min(abs(lo), abs(hi));
        if (d > best) best = std::move(d);
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        upd(a[i].re, b[i].re);
        upd(a[i].im, b[i].im);
    }
    return best;
}

bool same_zero(const SystemEvaluator& s, const MooreBox& m1, const MooreBox& m2, const Context& ctx) {
    require(m1.dim() == m2.dim() && m1.dim() == s.dim(), "same_zero: dimension mismatch");
    MooreBox a = refine(s, m1, rho::equality, ctx);
    MooreBox b = refine(s, m2, rho::equality, ctx);
    for (int round = 0; round < 8; ++round) {
        const Real d_hi = distance_inf(a.x, b.x);
        if (sum_le(d_hi, b.inner_radius(), a.r) || sum_le(d_hi, a.inner_radius(), b.r)) return true;
        const Real d_lo = distance_inf_lower(a.x, b.x);
        const Precision p = std::max(a.r.precision(), b.r.precision());
        if (add(a.inner_radius(), b.inner_radius(), Round::Up, p) < d_lo) return false;
        // Undecided: shrink both and look again.
        const Real cap_a = mul_2si(a.r, -4);
        const Real cap_b = mul_2si(b.r, -4);
        a = refine(s, a, rho::equality, ctx, &cap_a);
        b = refine(s, b, rho::equality, ctx, &cap_b);
    }
    fail(ErrorKind::RefineStalled, "same_zero undecided");
}

MooreBox certify_approx(const SystemEvaluator& s, std::span<const Complex> approx, const Context& ctx,
                        double rho_value) {
    require(approx.size() == s.dim(), "certify_approx: dimension mismatch");
    ComplexVector x = rounded(approx, ctx.prec);
    ComplexMatrix a;
    const Real start = mul_2si(add(Real(1.0, 53), norm_inf(x), Round::Up, 53), -4);
    for (int polish = 0; polish < 5; ++polish) {
        if (!newton_step(s, x, a, ctx)) break;
        if (!inverse_jacobian(s, x, a, ctx.prec)) break;
        if (polish < 1) continue;
        Real r = start;
        for (int k = 0; k <= 40; ++k, r = mul_2si(r, -1)) {
            if (moore_check(s, x, r, a, rho_value, ctx)) return MooreBox{x, r, a, rho_value};
        }
    }
    fail(ErrorKind::CertifyFailed, "no certified radius around the approximation");
}

MooreBox project_box(const SystemEvaluator& enlarged, const SystemEvaluator& reduced, const MooreBox& m,
                     const Context& ctx) {
    require(enlarged.dim() == reduced.dim() + 1, "project_box: reduced system must drop one equation");
    require(m.dim() == enlarged.dim(), "project_box: box does not match the enlarged system");
    const ComplexVector head(m.x.begin(), m.x.end() - 1);
    const MooreBox out = certify_approx(reduced, head, ctx);
    // The enlarged zero projects into head + rho r B; it must land in the
    // uniqueness region of the reduced box.
    MooreBox src = m;
    for (int round = 0; round < 6; ++round) {
        const ComplexVector proj(src.x.begin(), src.x.end() - 1);
        if (sum_le(distance_inf(proj, out.x), src.inner_radius(), out.r)) return out;
        const Real cap = mul_2si(src.r, -4);
        src = refine(enlarged, src, rho::equality, ctx, &cap);
    }
    fail(ErrorKind::CertifyFailed, "projected box does not isolate the enlarged zero");
}

} // namespace certmono

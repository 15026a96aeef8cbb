#include "certmono/embedding.hpp"

#include "certmono/error.hpp"

#include <algorithm>

namespace certmono {

SquareSystem min_poly_system(const NumberField& field, Precision prec) {
    IntervalPoly p(1);
    const QPoly& m = field.min_poly();
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k] == 0) continue;
        p.add_term(Monomial{static_cast<std::uint32_t>(k)}, ComplexInterval::from_rational(m[k], 0, prec));
    }
    return SquareSystem({std::move(p)});
}

EmbeddingBox embed_root(const FieldPtr& field, const Complex& approx, const Real& target_width, const Context& ctx) {
    require(field != nullptr, "embed_root: missing field");
    require(target_width.sign() > 0, "embed_root: target width must be positive");
    // The zero lies in x + rho r B, a square of side 2 rho r.
    const Precision cap_prec = std::max<Precision>(4 * ctx.prec, 512);
    for (Context c = ctx; c.prec <= cap_prec; c.prec *= 2) {
        try {
            const SquareSystem sys = min_poly_system(*field, c.prec);
            MooreBox box = certify_approx(sys, ComplexVector{approx}, c);
            if (field->degree() == 1) {
                // nu = -m_0 exactly.
                ComplexInterval alpha = ComplexInterval::from_rational(-field->min_poly()[0], 0, c.prec);
                if (alpha.width() > target_width) continue;
                return EmbeddingBox{field, std::move(alpha), std::move(box), c.prec};
            }
            const Real max_r = div(target_width, Real(2.0 * rho::equality, 53), Round::Down, c.prec);
            if (max_r < box.r) box = refine(sys, box, rho::equality, c, &max_r);
            const Real inner = box.inner_radius();
            ComplexInterval alpha = box_ball(box.x, inner).front();
            if (alpha.width() > target_width) continue;
            return EmbeddingBox{field, std::move(alpha), std::move(box), c.prec};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CertifyFailed && e.kind() != ErrorKind::RefineStalled) throw;
        }
    }
    fail(ErrorKind::IsolationFailed, "cannot isolate a root of the minimal polynomial near the given approximation");
}

EmbeddingBox embed_root(const FieldPtr& field, const Complex& approx, const Context& ctx) {
    Real width(1.0, 53);
    mpfr_mul_2si(width.raw(), width.raw(), -static_cast<long>(ctx.prec / 2), MPFR_RNDN);
    return embed_root(field, approx, width, ctx);
}

ComplexInterval nf_to_interval(const NFElement& a, const EmbeddingBox& emb) {
    const QPoly& c = a.coeffs();
    if (a.is_rational()) return ComplexInterval::from_rational(c.empty() ? mpq_class(0) : c[0], 0, emb.prec);
    require(a.field() == emb.field || *a.field() == *emb.field, "nf_to_interval: element from another field");
    std::size_t top = c.size();
    while (top > 0 && c[top - 1] == 0) --top;
    ComplexInterval acc = ComplexInterval::from_rational(c[top - 1], 0, emb.prec);
    for (std::size_t k = top - 1; k > 0; --k)
        acc = acc * emb.alpha + ComplexInterval::from_rational(c[k - 1], 0, emb.prec);
    return acc;
}

IntervalPoly substitute_nu(const ExactPoly& p, const EmbeddingBox& emb) {
    return p.map_coeffs([&emb](const NFElement& c) { return nf_to_interval(c, emb); });
}

} // namespace certmono

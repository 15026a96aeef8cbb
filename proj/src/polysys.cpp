#include "certmono/polysys.hpp"

#include <algorithm>
#include <map>

namespace certmono {

// ---------------------------------------------------------------- HornerForm

HornerForm::HornerForm(const IntervalPoly& p) : nvars_(p.nvars()), zero_(p.is_zero()) {
    if (zero_) return;
    std::vector<const std::pair<const Monomial, ComplexInterval>*> terms;
    terms.reserve(p.terms().size());
    for (const auto& t : p.terms()) terms.push_back(&t);
    root_ = build(std::move(terms), 0, nvars_);
}

HornerForm::Node HornerForm::build(std::vector<const std::pair<const Monomial, ComplexInterval>*> terms,
                                   std::size_t var, std::size_t nvars) {
    while (var < nvars &&
           std::all_of(terms.begin(), terms.end(), [var](const auto* t) { return t->first[var] == 0; }))
        ++var;
    Node node;
    if (var == nvars) {
        // Exponent vectors are distinct, so exactly one term remains.
        node.leaf = true;
        node.coeff = terms.front()->second;
        return node;
    }
    node.leaf = false;
    node.var = var;
    std::map<unsigned, std::vector<const std::pair<const Monomial, ComplexInterval>*>, std::greater<>> groups;
    for (const auto* t : terms) groups[t->first[var]].push_back(t);
    for (auto& [power, group] : groups) {
        node.powers.push_back(power);
        node.children.push_back(build(std::move(group), var + 1, nvars));
    }
    return node;
}

ComplexInterval HornerForm::eval(const Node& node, const ComplexBox& x) {
    if (node.leaf) return node.coeff;
    const ComplexInterval& v = x[node.var];
    ComplexInterval acc = eval(node.children[0], x);
    unsigned cur = node.powers[0];
    for (std::size_t i = 1; i < node.children.size(); ++i) {
        const unsigned gap = cur - node.powers[i];
        acc = (gap == 1 ? acc * v : acc * pow(v, gap)) + eval(node.children[i], x);
        cur = node.powers[i];
    }
    if (cur == 1) return acc * v;
    if (cur > 1) return acc * pow(v, cur);
    return acc;
}

ComplexInterval HornerForm::eval(const ComplexBox& x) const {
    require(x.size() == nvars_, "eval: box dimension does not match variable count");
    if (zero_) return ComplexInterval(x.empty() ? Precision(53) : x.front().precision());
    return eval(root_, x);
}

ComplexInterval eval_box(const IntervalPoly& p, const ComplexBox& x) { return HornerForm(p).eval(x); }

// ---------------------------------------------------------------- CompiledSystem

namespace detail {

CompiledSystem::CompiledSystem(const std::vector<IntervalPoly>& polys, std::size_t off)
    : n(polys.size()), offset(off) {
    for (const auto& p : polys) require(p.nvars() == n + offset, "system is not square");
    f.reserve(n);
    jac.reserve(n * n);
    jac_polys.reserve(n * n);
    for (const auto& p : polys) f.emplace_back(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            jac_polys.push_back(polys[i].derivative(offset + j));
            jac.emplace_back(jac_polys.back());
        }
    }
    for (const auto& q : jac_polys) {
        for (std::size_t k = 0; k < n + offset; ++k) {
            const IntervalPoly d = q.derivative(k);
            hess_zero.push_back(d.is_zero());
            hess.emplace_back(d);
        }
    }
}

ComplexBox CompiledSystem::eval(const ComplexBox& full) const {
    ComplexBox out;
    out.reserve(n);
    for (const auto& h : f) out.push_back(h.eval(full));
    return out;
}

// Mean-value form J(c) + sum_k dJ/dv_k(box) (box_k - c_k) about the center c.
// Plain Horner over the box overestimates by the size of the partial sums,
// which for large coefficients dwarfs the true variation.
IntervalMatrix CompiledSystem::jacobian(const ComplexBox& full) const {
    const std::size_t nv = n + offset;
    ComplexBox center, offsets;
    std::vector<bool> moving(nv);
    center.reserve(nv);
    offsets.reserve(nv);
    for (std::size_t k = 0; k < nv; ++k) {
        moving[k] = !full[k].is_point();
        center.emplace_back(moving[k] ? ComplexInterval(full[k].midpoint(full[k].precision())) : full[k]);
        offsets.push_back(moving[k] ? full[k] - center[k] : ComplexInterval(full[k].precision()));
    }
    IntervalMatrix out(n, ComplexInterval());
    for (std::size_t e = 0; e < n * n; ++e) {
        ComplexInterval acc = jac[e].eval(center);
        for (std::size_t k = 0; k < nv; ++k) {
            if (!moving[k] || hess_zero[e * nv + k]) continue;
            acc = acc + hess[e * nv + k].eval(full) * offsets[k];
        }
        out(e / n, e % n) = std::move(acc);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- SquareSystem

SquareSystem::SquareSystem(std::vector<IntervalPoly> polys)
    : polys_(std::move(polys)), compiled_(std::make_shared<const detail::CompiledSystem>(polys_, 0)) {}

const IntervalPoly& SquareSystem::jacobian_poly(std::size_t i, std::size_t j) const {
    return compiled_->jac_polys.at(i * dim() + j);
}

ComplexBox SquareSystem::eval(const ComplexBox& x) const { return compiled_->eval(x); }

IntervalMatrix SquareSystem::jacobian(const ComplexBox& x) const { return compiled_->jacobian(x); }

std::vector<std::vector<IntervalPoly>> jacobian(const SquareSystem& s) {
    std::vector<std::vector<IntervalPoly>> out(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) out[i].push_back(s.jacobian_poly(i, j));
    return out;
}

// ---------------------------------------------------------------- ParametricSystem

ParametricSystem::ParametricSystem(std::vector<IntervalPoly> polys)
    : polys_(std::move(polys)), compiled_(std::make_shared<const detail::CompiledSystem>(polys_, 1)) {}

ParametricSystem::Slice ParametricSystem::at(const ComplexInterval& t) const { return Slice(compiled_, t); }

ComplexBox ParametricSystem::Slice::full(const ComplexBox& x) const {
    ComplexBox out;
    out.reserve(x.size() + 1);
    out.push_back(t_);
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

ComplexBox ParametricSystem::Slice::eval(const ComplexBox& x) const { return sys_->eval(full(x)); }

IntervalMatrix ParametricSystem::Slice::jacobian(const ComplexBox& x) const { return sys_->jacobian(full(x)); }

SquareSystem specialize(const ParametricSystem& f, const ComplexInterval& t) {
    std::vector<IntervalPoly> out;
    out.reserve(f.dim());
    for (const auto& p : f.polys()) {
        IntervalPoly q(p.nvars() - 1);
        for (const auto& [m, c] : p.terms()) {
            Monomial rest(m.begin() + 1, m.end());
            q.add_term(rest, m[0] == 0 ? c : c * pow(t, m[0]));
        }
        out.push_back(std::move(q));
    }
    return SquareSystem(std::move(out));
}

IntervalPoly compose_affine(const IntervalPoly& p, const ComplexInterval& a, const ComplexInterval& slope) {
    // (a + slope t)^k = sum_j C(k, j) a^(k-j) slope^j t^j
    IntervalPoly out(p.nvars());
    const Precision prec = std::max(a.precision(), slope.precision());
    for (const auto& [m, c] : p.terms()) {
        const unsigned k = m[0];
        if (k == 0) {
            out.add_term(m, c);
            continue;
        }
        mpz_class binom = 1;
        for (unsigned j = 0; j <= k; ++j) {
            if (j > 0) {
                binom *= (k - j + 1);
                binom /= j;
            }
            ComplexInterval term = c * ComplexInterval::from_rational(mpq_class(binom), 0, prec);
            if (k - j > 0) term = term * pow(a, k - j);
            if (j > 0) term = term * pow(slope, j);
            Monomial e = m;
            e[0] = j;
            out.add_term(e, term);
        }
    }
    return out;
}

ParametricSystem compose_segment(const ParametricSystem& f, const Complex& a, const Complex& b) {
    require(!(a.re == b.re && a.im == b.im), "compose_segment: endpoints must differ");
    const ComplexInterval ia(a);
    const ComplexInterval slope = ComplexInterval(b) - ia;
    std::vector<IntervalPoly> out;
    out.reserve(f.dim());
    for (const auto& p : f.polys()) out.push_back(compose_affine(p, ia, slope));
    return ParametricSystem(std::move(out));
}

} // namespace certmono

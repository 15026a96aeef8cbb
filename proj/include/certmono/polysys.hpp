#pragma once

#include "certmono/interval.hpp"
#include "certmono/mpoly.hpp"

#include <memory>
#include <vector>

namespace certmono {

/// Recursive Horner representation of an interval polynomial, variables
/// nested in input order (variable 0 outermost).
class HornerForm {
public:
    HornerForm() = default;
    explicit HornerForm(const IntervalPoly& p);

    /// Enclosure of p over the box x (x.size() == nvars).
    ComplexInterval eval(const ComplexBox& x) const;

private:
    struct Node {
        std::size_t var = 0;
        bool leaf = true;
        ComplexInterval coeff;
        std::vector<unsigned> powers;   // strictly decreasing
        std::vector<Node> children;
    };

    static Node build(std::vector<const std::pair<const Monomial, ComplexInterval>*> terms, std::size_t var,
                      std::size_t nvars);
    static ComplexInterval eval(const Node& node, const ComplexBox& x);

    std::size_t nvars_ = 0;
    bool zero_ = true;
    Node root_;
};

ComplexInterval eval_box(const IntervalPoly& p, const ComplexBox& x);

/// What the Krawczyk test needs from a square system: enclosures of f and
/// of its Jacobian over a box.
class SystemEvaluator {
public:
    virtual ~SystemEvaluator() = default;
    virtual std::size_t dim() const = 0;
    virtual ComplexBox eval(const ComplexBox& x) const = 0;
    virtual IntervalMatrix jacobian(const ComplexBox& x) const = 0;
};

namespace detail {
// f and df/dx for polynomials whose first `offset` variables are parameters.
struct CompiledSystem {
    CompiledSystem(const std::vector<IntervalPoly>& polys, std::size_t offset);

    std::size_t n = 0;
    std::size_t offset = 0;
    std::vector<IntervalPoly> jac_polys;   // row-major n x n
    std::vector<HornerForm> f;
    std::vector<HornerForm> jac;
    // d jac(i, j) / d v_k over all n + offset variables, row-major (i, j, k).
    std::vector<HornerForm> hess;
    std::vector<bool> hess_zero;

    ComplexBox eval(const ComplexBox& full) const;
    IntervalMatrix jacobian(const ComplexBox& full) const;
};
} // namespace detail

/// n polynomials in n unknowns, no parameter.
class SquareSystem final : public SystemEvaluator {
public:
    SquareSystem() = default;
    explicit SquareSystem(std::vector<IntervalPoly> polys);

    const std::vector<IntervalPoly>& polys() const { return polys_; }
    /// Symbolic Jacobian, entry (i, j) = d polys_i / d x_j.
    const IntervalPoly& jacobian_poly(std::size_t i, std::size_t j) const;

    std::size_t dim() const override { return polys_.size(); }
    ComplexBox eval(const ComplexBox& x) const override;
    IntervalMatrix jacobian(const ComplexBox& x) const override;

private:
    std::vector<IntervalPoly> polys_;
    std::shared_ptr<const detail::CompiledSystem> compiled_;
};

std::vector<std::vector<IntervalPoly>> jacobian(const SquareSystem& s);

/// F(t, x): n polynomials in variables (t, x_1..x_n), t at index 0.
/// Immutable; copies share the compiled forms.
class ParametricSystem {
public:
    ParametricSystem() = default;
    explicit ParametricSystem(std::vector<IntervalPoly> polys);

    const std::vector<IntervalPoly>& polys() const { return polys_; }
    std::size_t dim() const { return polys_.size(); }

    /// Lightweight evaluator of F at the parameter interval t.
    class Slice final : public SystemEvaluator {
    public:
        Slice(std::shared_ptr<const detail::CompiledSystem> sys, ComplexInterval t)
            : sys_(std::move(sys)), t_(std::move(t)) {}
        std::size_t dim() const override { return sys_->n; }
        ComplexBox eval(const ComplexBox& x) const override;
        IntervalMatrix jacobian(const ComplexBox& x) const override;
        const ComplexInterval& parameter() const { return t_; }

    private:
        ComplexBox full(const ComplexBox& x) const;
        std::shared_ptr<const detail::CompiledSystem> sys_;
        ComplexInterval t_;
    };

    Slice at(const ComplexInterval& t) const;

private:
    std::vector<IntervalPoly> polys_;
    std::shared_ptr<const detail::CompiledSystem> compiled_;
};

/// Substitutes t and materializes the polynomials of F_t.
SquareSystem specialize(const ParametricSystem& f, const ComplexInterval& t);

/// Reparametrizes t -> (1 - t) a + t b, so t in [0, 1] runs along [a, b].
ParametricSystem compose_segment(const ParametricSystem& f, const Complex& a, const Complex& b);

/// Substitutes t -> (1 - t) a + t b in one polynomial whose variable 0 is t.
IntervalPoly compose_affine(const IntervalPoly& p, const ComplexInterval& a, const ComplexInterval& slope);

} // namespace certmono

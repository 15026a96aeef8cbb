#pragma once

// Moore boxes: (x, r, A) with
//     -A f(x) + (I - A df(x + u)) v  in  rho r B   for all u, v in rB,
// which proves that f has a unique zero in x + rB, and that it lies in
// x + rho r B (B the unit ball of the real inf-norm on C^n).

#include "certmono/interval.hpp"
#include "certmono/polysys.hpp"

#include <span>

namespace certmono {

namespace rho {
inline constexpr double corrector = 1.0 / 8.0;
inline constexpr double predictor = 7.0 / 8.0;
inline constexpr double equality = 1.0 / 3.0;
} // namespace rho

struct MooreBox {
    ComplexVector x;   // dyadic center
    Real r;            // radius
    ComplexMatrix A;
    double rho = rho::equality;

    std::size_t dim() const { return x.size(); }
    /// Upper bound of rho * r: the zero lies within this distance of x.
    Real inner_radius() const;
};

bool moore_check(const SystemEvaluator& s, std::span<const Complex> x, const Real& r, const ComplexMatrix& a,
                 double rho, const Context& ctx);
inline bool moore_check(const SystemEvaluator& s, const MooreBox& m, double rho, const Context& ctx) {
    return moore_check(s, m.x, m.r, m.A, rho, ctx);
}

/// Returns a tau-Moore box for the zero of m. Each accepted box either lies
/// inside the previous uniqueness region or contains the previous inclusion
/// region, so the zero is the same. If max_radius is given the result also
/// has r <= max_radius. Throws RefineStalled.
MooreBox refine(const SystemEvaluator& s, const MooreBox& m, double tau, const Context& ctx,
                const Real* max_radius = nullptr);

/// Equality of the zeros of two Moore boxes of the same system. Refines both
/// to 1/3-boxes; shrunken boxes that intersect imply the same zero, disjoint
/// ones imply distinct zeros. Throws RefineStalled.
bool same_zero(const SystemEvaluator& s, const MooreBox& a, const MooreBox& b, const Context& ctx);

/// Newton polish then a geometric radius search for a rho-Moore box around
/// an approximate zero. Throws CertifyFailed.
MooreBox certify_approx(const SystemEvaluator& s, std::span<const Complex> approx, const Context& ctx,
                        double rho = rho::equality);

/// From a box for the enlarged system (..., q z - 1) to a box for the same
/// system without its last equation and variable. Throws CertifyFailed.
MooreBox project_box(const SystemEvaluator& enlarged, const SystemEvaluator& reduced, const MooreBox& m,
                     const Context& ctx);

/// One quasi-Newton step x - A f(x) with A the inverse midpoint Jacobian at
/// x. Returns false if that Jacobian is numerically singular.
bool newton_step(const SystemEvaluator& s, ComplexVector& x, ComplexMatrix& a, const Context& ctx);

/// Lower bound of the real-inf distance between two points.
Real distance_inf_lower(std::span<const Complex> a, std::span<const Complex> b);

} // namespace certmono

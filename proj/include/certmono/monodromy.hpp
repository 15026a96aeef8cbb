#pragma once

// Fibers over a base point, loops around 0 and 1, and the permutations
// obtained by continuing every fiber point along a loop.

#include "certmono/group.hpp"
#include "certmono/track.hpp"

#include <cstdint>
#include <utility>

namespace certmono {

struct Fiber {
    SquareSystem system;            // F at the base point
    std::vector<MooreBox> boxes;    // canonical order
    Complex base;
    std::size_t degree() const { return boxes.size(); }
};

/// Diamonds b -> i r -> -r -> -i r -> b and b -> 1 - i r -> 1 + r -> 1 + i r -> b,
/// counterclockwise around 0 and 1 respectively. Throws DegenerateLoop
/// unless each winds once around its point, never around the other, and
/// keeps off both.
std::pair<PLPath, PLPath> standard_loops(const Complex& base, const Real& radius);

/// b -> -1 + i -> -1 - i -> 2 - i -> 2 + i -> b, homotopic to loop0 * loop1.
PLPath big_loop(const Complex& base);

PLPath reversed(const PLPath& path);

/// Winding number of a closed polygon around p (floating point; the loops
/// used here stay far from p).
int winding_number(const PLPath& path, const Complex& p);

/// Dedupes candidate boxes by same_zero, requires exactly d, and orders
/// them canonically. Throws FiberCountMismatch.
Fiber make_fiber(const SquareSystem& system, const Complex& base, std::vector<MooreBox> candidates, std::size_t d,
                 const Context& ctx);

/// Certifies approximate points (e.g. from a start-fiber file) into a fiber.
Fiber certify_fiber(const SquareSystem& system, const Complex& base, const std::vector<ComplexVector>& points,
                    std::size_t d, const Context& ctx);

/// Roots of a univariate polynomial by Aberth-Ehrlich, then certified.
Fiber univariate_fiber(const ParametricSystem& f, const Complex& base, std::size_t d, std::uint64_t seed,
                       const Context& ctx);

/// Total-degree homotopy to the enlarged system at the base point, then
/// projection to the tracked system (when the enlarged one has an extra
/// variable). Retries with seed + 1, seed + 2 before FiberCountMismatch.
Fiber bootstrap_fiber(const ParametricSystem& tracked, const ParametricSystem& enlarged, const Complex& base,
                      std::size_t d, std::uint64_t seed, const TrackConfig& cfg, std::size_t threads);

/// Continues each fiber point along the loop. With early_halt, the last
/// run is cancelled once d - 1 endpoints are matched and its image is
/// filled in by elimination. Throws MatchFailed and tracking errors.
Permutation loop_permutation(const ParametricSystem& f, const Fiber& fiber, const PLPath& loop,
                             const TrackConfig& cfg, std::size_t threads, bool early_halt = true);

/// s0, s1 from the standard loops, sinf = (s0 s1)^-1.
PermutationTriple monodromy_triple(const ParametricSystem& f, const Fiber& fiber, const Real& radius,
                                   const TrackConfig& cfg, std::size_t threads);

} // namespace certmono

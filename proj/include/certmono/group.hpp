#pragma once

// Permutations of {0, ..., d-1} (printed 1-based) acting on the right:
// (s * t)(i) = t(s(i)), so a product of loops composes left to right.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace certmono {

class Permutation {
public:
    Permutation() = default;
    /// images[i] is the image of i; must be a bijection of {0..d-1}.
    explicit Permutation(std::vector<std::uint32_t> images);
    static Permutation identity(std::size_t d);

    /// Cycle notation "(1,2,3)(4,5)", 1-based, "()" for the identity.
    static Permutation parse(std::string_view text, std::size_t degree);
    std::string to_string() const;

    std::size_t degree() const { return images_.size(); }
    std::uint32_t operator()(std::uint32_t i) const { return images_[i]; }
    const std::vector<std::uint32_t>& images() const { return images_; }
    bool is_identity() const;
    Permutation inverse() const;

    friend Permutation operator*(const Permutation& a, const Permutation& b);
    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::uint32_t> images_;
};

/// pi^-1 * s * pi
Permutation conjugate(const Permutation& s, const Permutation& pi);

struct PermutationTriple {
    Permutation s0, s1, sinf;

    std::size_t degree() const { return s0.degree(); }
    /// Same degree everywhere and s0 * s1 * sinf = 1.
    bool valid() const;
    friend bool operator==(const PermutationTriple&, const PermutationTriple&) = default;
};

/// Cycle lengths including fixed points, sorted descending.
using CycleType = std::vector<std::size_t>;

CycleType cycle_type(const Permutation& p);
std::string to_string(const CycleType& c);

bool is_transitive(std::span<const Permutation> gens, std::size_t d);

/// Order of the generated group by deterministic Schreier-Sims.
mpz_class group_order(std::span<const Permutation> gens, std::size_t d);

/// Some pi with pi^-1 a_k pi = b_k for all three components, if any.
std::optional<Permutation> simultaneously_conjugate(const PermutationTriple& a, const PermutationTriple& b);

/// Images of t under the six relabelings of {0,1,oo}, built from
/// r: (a,b,c) -> (b,c,a) and s: (a,b,c) -> (b,a,a^-1 b^-1) as the words
/// 1, r, r^2, s, s r, s r^2; duplicates removed. Element 0 is t itself.
std::vector<PermutationTriple> s3_orbit(const PermutationTriple& t);

PermutationTriple s3_rotate(const PermutationTriple& t);
PermutationTriple s3_swap(const PermutationTriple& t);

/// (c^-1, b^-1, a^-1): the triple seen with reversed loop orientation.
PermutationTriple inverse_triple(const PermutationTriple& t);

} // namespace certmono

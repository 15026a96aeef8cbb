#pragma once

// Embeddings Q(nu) -> C given by a certified enclosure of one root alpha of
// the minimal polynomial, and the substitution nu -> alpha in polynomials.

#include "certmono/certify.hpp"
#include "certmono/mpoly.hpp"
#include "certmono/numberfield.hpp"

namespace certmono {

struct EmbeddingBox {
    FieldPtr field;
    ComplexInterval alpha;   // contains exactly one root of the minimal polynomial
    MooreBox proof;          // 1x1 Moore box for that polynomial
    Precision prec = 53;     // precision coefficients are enclosed at
};

/// Certified enclosure of width <= target_width of the root of K's minimal
/// polynomial nearest to `approx` (in the Newton sense). Throws IsolationFailed.
EmbeddingBox embed_root(const FieldPtr& field, const Complex& approx, const Real& target_width, const Context& ctx);

/// Default target width 2^(-prec/2).
EmbeddingBox embed_root(const FieldPtr& field, const Complex& approx, const Context& ctx);

/// Enclosure of a(alpha) by Horner evaluation over emb.alpha.
ComplexInterval nf_to_interval(const NFElement& a, const EmbeddingBox& emb);

/// Every coefficient mapped through nf_to_interval.
IntervalPoly substitute_nu(const ExactPoly& p, const EmbeddingBox& emb);

/// The minimal polynomial as a 1x1 interval system in nu.
SquareSystem min_poly_system(const NumberField& field, Precision prec);

} // namespace certmono

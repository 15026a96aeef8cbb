#pragma once

// Sparse multivariate polynomials over a coefficient ring C (exact number
// field elements or complex intervals).

#include "certmono/error.hpp"
#include "certmono/interval.hpp"
#include "certmono/numberfield.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace certmono {

using Monomial = std::vector<std::uint32_t>;

inline bool coeff_is_zero(const NFElement& c) { return c.is_zero(); }
inline bool coeff_is_zero(const ComplexInterval& c) { return c.is_zero(); }
inline NFElement coeff_times_int(const NFElement& c, long k) { return c.times_int(k); }
inline ComplexInterval coeff_times_int(const ComplexInterval& c, long k) {
    return c * ComplexInterval::from_int(k, c.precision());
}

template <class C>
class MPoly {
public:
    using Coeff = C;
    using TermMap = std::map<Monomial, C>;

    MPoly() = default;
    explicit MPoly(std::size_t nvars) : nvars_(nvars) {}

    static MPoly constant(std::size_t nvars, const C& c) {
        MPoly p(nvars);
        p.add_term(Monomial(nvars, 0), c);
        return p;
    }
    static MPoly variable(std::size_t nvars, std::size_t var, const C& one) {
        MPoly p(nvars);
        Monomial m(nvars, 0);
        m.at(var) = 1;
        p.add_term(m, one);
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Monomial& m, const C& c) {
        require(m.size() == nvars_, "monomial length does not match variable count");
        if (coeff_is_zero(c)) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
            return;
        }
        it->second = it->second + c;
        if (coeff_is_zero(it->second)) terms_.erase(it);
    }

    unsigned degree_in(std::size_t var) const {
        unsigned d = 0;
        for (const auto& [m, c] : terms_) d = std::max<unsigned>(d, m.at(var));
        return d;
    }

    /// Total degree over the variables in [first, nvars).
    unsigned total_degree(std::size_t first = 0) const {
        unsigned d = 0;
        for (const auto& [m, c] : terms_) {
            unsigned s = 0;
            for (std::size_t i = first; i < m.size(); ++i) s += m[i];
            d = std::max(d, s);
        }
        return d;
    }

    MPoly operator-() const {
        MPoly r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend MPoly operator+(const MPoly& a, const MPoly& b) {
        require(a.nvars_ == b.nvars_, "variable count mismatch");
        MPoly r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m, c);
        return r;
    }

    friend MPoly operator-(const MPoly& a, const MPoly& b) { return a + (-b); }

    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        require(a.nvars_ == b.nvars_, "variable count mismatch");
        MPoly r(a.nvars_);
        Monomial m(a.nvars_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                r.add_term(m, ca * cb);
            }
        }
        return r;
    }

    MPoly scaled(const C& s) const {
        MPoly r(nvars_);
        for (const auto& [m, c] : terms_) r.add_term(m, c * s);
        return r;
    }

    MPoly pow(unsigned k, const C& one) const {
        MPoly result = constant(nvars_, one);
        MPoly base = *this;
        while (k > 0) {
            if (k & 1u) result = result * base;
            k >>= 1u;
            if (k > 0) base = base * base;
        }
        return result;
    }

    MPoly derivative(std::size_t var) const {
        MPoly r(nvars_);
        for (const auto& [m, c] : terms_) {
            if (m.at(var) == 0) continue;
            Monomial d = m;
            d[var] -= 1;
            r.add_term(d, coeff_times_int(c, static_cast<long>(m[var])));
        }
        return r;
    }

    /// Maps every coefficient through f; zero images are dropped.
    template <class F>
    auto map_coeffs(F&& f) const -> MPoly<decltype(f(std::declval<const C&>()))> {
        MPoly<decltype(f(std::declval<const C&>()))> r(nvars_);
        for (const auto& [m, c] : terms_) r.add_term(m, f(c));
        return r;
    }

    /// Re-indexes variables: variable i of this polynomial becomes variable
    /// positions[i] of a polynomial in `nvars` variables.
    MPoly embed(std::size_t nvars, const std::vector<std::size_t>& positions) const {
        require(positions.size() == nvars_, "embed: position count mismatch");
        MPoly r(nvars);
        for (const auto& [m, c] : terms_) {
            Monomial e(nvars, 0);
            for (std::size_t i = 0; i < nvars_; ++i) e.at(positions[i]) += m[i];
            r.add_term(e, c);
        }
        return r;
    }

    friend bool operator==(const MPoly& a, const MPoly& b) {
        if (a.nvars_ != b.nvars_ || a.terms_.size() != b.terms_.size()) return false;
        auto ia = a.terms_.begin();
        for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib) {
            if (ia->first != ib->first || !coeff_is_zero(ia->second - ib->second)) return false;
        }
        return true;
    }

private:
    std::size_t nvars_ = 0;
    TermMap terms_;
};

using ExactPoly = MPoly<NFElement>;
using IntervalPoly = MPoly<ComplexInterval>;

} // namespace certmono

#include "certmono/group.hpp"

#include "certmono/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace certmono {

Permutation::Permutation(std::vector<std::uint32_t> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (const auto v : images_) {
        require(v < images_.size() && !seen[v], "permutation: images are not a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t d) {
    std::vector<std::uint32_t> im(d);
    for (std::size_t i = 0; i < d; ++i) im[i] = static_cast<std::uint32_t>(i);
    return Permutation(std::move(im));
}

Permutation Permutation::parse(std::string_view text, std::size_t degree) {
    const std::string src(text);
    const auto bad = [&src](const std::string& why) {
        fail(ErrorKind::ParseError, "permutation '" + src + "': " + why);
    };
    std::vector<std::uint32_t> im(degree);
    for (std::size_t i = 0; i < degree; ++i) im[i] = static_cast<std::uint32_t>(i);
    std::vector<bool> used(degree, false);
    std::size_t i = 0;
    const auto skip_ws = [&]() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    };
    skip_ws();
    if (i == src.size()) bad("empty");
    while (i < src.size()) {
        if (src[i] != '(') bad("expected '('");
        ++i;
        skip_ws();
        std::vector<std::uint32_t> cycle;
        if (i < src.size() && src[i] == ')') {
            ++i;
            skip_ws();
            continue;
        }
        while (true) {
            skip_ws();
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j == i || j - i > 9) bad("expected a point");
            const unsigned long v = std::stoul(src.substr(i, j - i));
            if (v < 1 || v > degree) bad("point " + std::to_string(v) + " out of range 1.." + std::to_string(degree));
            if (used[v - 1]) bad("point " + std::to_string(v) + " repeated");
            used[v - 1] = true;
            cycle.push_back(static_cast<std::uint32_t>(v - 1));
            i = j;
            skip_ws();
            if (i < src.size() && src[i] == ',') {
                ++i;
                continue;
            }
            if (i < src.size() && src[i] == ')') {
                ++i;
                break;
            }
            bad("expected ',' or ')'");
        }
        for (std::size_t k = 0; k < cycle.size(); ++k) im[cycle[k]] = cycle[(k + 1) % cycle.size()];
        skip_ws();
    }
    return Permutation(std::move(im));
}

std::string Permutation::to_string() const {
    std::ostringstream out;
    std::vector<bool> seen(degree(), false);
    bool any = false;
    for (std::uint32_t i = 0; i < degree(); ++i) {
        if (seen[i] || images_[i] == i) continue;
        any = true;
        out << '(';
        for (std::uint32_t j = i; !seen[j]; j = images_[j]) {
            if (j != i) out << ',';
            out << j + 1;
            seen[j] = true;
        }
        out << ')';
    }
    return any ? out.str() : "()";
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i)
        if (images_[i] != i) return false;
    return true;
}

Permutation Permutation::inverse() const {
    std::vector<std::uint32_t> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = static_cast<std::uint32_t>(i);
    Permutation p;
    p.images_ = std::move(inv);
    return p;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
    require(a.degree() == b.degree(), "permutation product: degree mismatch");
    Permutation p;
    p.images_.resize(a.degree());
    for (std::size_t i = 0; i < a.degree(); ++i) p.images_[i] = b.images_[a.images_[i]];
    return p;
}

Permutation conjugate(const Permutation& s, const Permutation& pi) { return pi.inverse() * s * pi; }

bool PermutationTriple::valid() const {
    const std::size_t d = s0.degree();
    return d > 0 && s1.degree() == d && sinf.degree() == d && (s0 * s1 * sinf).is_identity();
}

CycleType cycle_type(const Permutation& p) {
    CycleType parts;
    std::vector<bool> seen(p.degree(), false);
    for (std::uint32_t i = 0; i < p.degree(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::uint32_t j = i; !seen[j]; j = p(j)) {
            seen[j] = true;
            ++len;
        }
        parts.push_back(len);
    }
    std::sort(parts.rbegin(), parts.rend());
    return parts;
}

std::string to_string(const CycleType& c) {
    std::string s = "[";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + "]";
}

namespace {

std::vector<std::uint32_t> orbit_of(std::uint32_t start, std::span<const Permutation> gens, std::size_t d) {
    std::vector<bool> seen(d, false);
    std::vector<std::uint32_t> orbit{start};
    seen[start] = true;
    for (std::size_t k = 0; k < orbit.size(); ++k) {
        for (const auto& g : gens) {
            const std::uint32_t y = g(orbit[k]);
            if (!seen[y]) {
                seen[y] = true;
                orbit.push_back(y);
            }
        }
    }
    return orbit;
}

// One level of a stabilizer chain: base point, generators fixing the
// earlier base points, and a transversal u with base^u = point.
struct Level {
    std::uint32_t base = 0;
    std::vector<Permutation> gens;
    std::map<std::uint32_t, Permutation> transversal;
};

void build_orbit(Level& level, std::size_t d) {
    level.transversal.clear();
    level.transversal.emplace(level.base, Permutation::identity(d));
    std::deque<std::uint32_t> queue{level.base};
    while (!queue.empty()) {
        const std::uint32_t x = queue.front();
        queue.pop_front();
        const Permutation ux = level.transversal.at(x);
        for (const auto& g : level.gens) {
            const std::uint32_t y = g(x);
            if (level.transversal.count(y)) continue;
            level.transversal.emplace(y, ux * g);
            queue.push_back(y);
        }
    }
}

// Sift g through levels [from, end). Returns the residue and the level at
// which it dropped out (levels.size() if it sifted through).
std::pair<Permutation, std::size_t> strip(const std::vector<Level>& levels, std::size_t from, Permutation g) {
    for (std::size_t i = from; i < levels.size(); ++i) {
        const auto it = levels[i].transversal.find(g(levels[i].base));
        if (it == levels[i].transversal.end()) return {std::move(g), i};
        g = g * it->second.inverse();
    }
    return {std::move(g), levels.size()};
}

std::uint32_t first_moved(const Permutation& g) {
    for (std::uint32_t i = 0; i < g.degree(); ++i)
        if (g(i) != i) return i;
    return 0;
}

} // namespace

bool is_transitive(std::span<const Permutation> gens, std::size_t d) {
    require(d > 0, "is_transitive: empty point set");
    for (const auto& g : gens) require(g.degree() == d, "is_transitive: degree mismatch");
    return orbit_of(0, gens, d).size() == d;
}

mpz_class group_order(std::span<const Permutation> gens, std::size_t d) {
    require(d > 0 && d <= 1000, "group_order: degree out of range");
    std::vector<Permutation> nontrivial;
    for (const auto& g : gens) {
        require(g.degree() == d, "group_order: degree mismatch");
        if (!g.is_identity()) nontrivial.push_back(g);
    }
    if (nontrivial.empty()) return 1;

    std::vector<Level> levels;
    levels.reserve(d + 1);   // a base has at most d points; references stay valid
    const auto add_base_point = [&levels](std::uint32_t b) {
        levels.push_back(Level{b, {}, {}});
    };
    // Every generator moves some base point.
    for (const auto& g : nontrivial) {
        bool moves = false;
        for (const auto& l : levels) moves = moves || g(l.base) != l.base;
        if (!moves) add_base_point(first_moved(g));
    }
    for (const auto& g : nontrivial) {
        for (auto& l : levels) {
            l.gens.push_back(g);
            if (g(l.base) != l.base) break;
        }
    }
    for (auto& l : levels) build_orbit(l, d);

    std::size_t i = levels.size();
    while (i > 0) {
        Level& level = levels[i - 1];
        bool extended = false;
        for (auto it = level.transversal.begin(); it != level.transversal.end() && !extended; ++it) {
            for (std::size_t gi = 0; gi < level.gens.size() && !extended; ++gi) {
                const Permutation& s = level.gens[gi];
                const Permutation h = it->second * s * level.transversal.at(s(it->first)).inverse();
                if (h.is_identity()) continue;
                auto [y, j] = strip(levels, i, h);
                if (j == levels.size() && y.is_identity()) continue;
                if (j == levels.size()) add_base_point(first_moved(y));
                for (std::size_t l = i; l <= j; ++l) {
                    levels[l].gens.push_back(y);
                    build_orbit(levels[l], d);
                }
                i = j + 1;
                extended = true;
            }
        }
        if (!extended) --i;
    }
    mpz_class order = 1;
    for (const auto& l : levels) order *= static_cast<unsigned long>(l.transversal.size());
    return order;
}

std::optional<Permutation> simultaneously_conjugate(const PermutationTriple& a, const PermutationTriple& b) {
    const std::size_t d = a.degree();
    if (b.degree() != d || a.s1.degree() != d || a.sinf.degree() != d || b.s1.degree() != d || b.sinf.degree() != d)
        return std::nullopt;
    const Permutation* as[3] = {&a.s0, &a.s1, &a.sinf};
    const Permutation* bs[3] = {&b.s0, &b.s1, &b.sinf};
    for (int k = 0; k < 3; ++k)
        if (cycle_type(*as[k]) != cycle_type(*bs[k])) return std::nullopt;

    // pi(a_k(y)) = b_k(pi(y)). Orbits of <a> are handled one at a time: the
    // image of a representative determines pi on its orbit.
    const std::vector<Permutation> agens{a.s0, a.s1, a.sinf};
    std::vector<std::vector<std::uint32_t>> orbits;
    std::vector<bool> covered(d, false);
    for (std::uint32_t p = 0; p < d; ++p) {
        if (covered[p]) continue;
        orbits.push_back(orbit_of(p, agens, d));
        for (const auto q : orbits.back()) covered[q] = true;
    }
    constexpr std::uint32_t unset = ~0u;
    std::vector<std::uint32_t> pi(d, unset);
    std::vector<bool> used(d, false);

    const auto propagate = [&](const std::vector<std::uint32_t>& orbit, std::uint32_t image) {
        pi[orbit[0]] = image;
        used[image] = true;
        std::vector<std::uint32_t> assigned{orbit[0]};
        bool ok = true;
        for (std::size_t k = 0; k < assigned.size() && ok; ++k) {
            const std::uint32_t y = assigned[k];
            for (int g = 0; g < 3 && ok; ++g) {
                const std::uint32_t from = (*as[g])(y);
                const std::uint32_t to = (*bs[g])(pi[y]);
                if (pi[from] == unset) {
                    if (used[to]) {
                        ok = false;
                        break;
                    }
                    pi[from] = to;
                    used[to] = true;
                    assigned.push_back(from);
                } else if (pi[from] != to) {
                    ok = false;
                }
            }
        }
        return std::pair{ok, assigned};
    };
    const auto undo = [&](const std::vector<std::uint32_t>& assigned) {
        for (const auto y : assigned) {
            used[pi[y]] = false;
            pi[y] = unset;
        }
    };

    const auto search = [&](auto&& self, std::size_t k) -> bool {
        if (k == orbits.size()) return true;
        const auto& orbit = orbits[k];
        for (std::uint32_t c = 0; c < d; ++c) {
            if (used[c]) continue;
            auto [ok, assigned] = propagate(orbit, c);
            if (ok && self(self, k + 1)) return true;
            undo(assigned);
        }
        return false;
    };
    if (!search(search, 0)) return std::nullopt;
    Permutation p(pi);
    for (int k = 0; k < 3; ++k)
        if (conjugate(*as[k], p) != *bs[k]) return std::nullopt;
    return p;
}

PermutationTriple s3_rotate(const PermutationTriple& t) { return {t.s1, t.sinf, t.s0}; }

PermutationTriple s3_swap(const PermutationTriple& t) { return {t.s1, t.s0, t.s0.inverse() * t.s1.inverse()}; }

PermutationTriple inverse_triple(const PermutationTriple& t) {
    return {t.sinf.inverse(), t.s1.inverse(), t.s0.inverse()};
}

std::vector<PermutationTriple> s3_orbit(const PermutationTriple& t) {
    // r and s generate S3 only modulo simultaneous conjugation, so the orbit
    // is taken over the six words 1, r, r^2, s, s r, s r^2 rather than closed.
    const PermutationTriple r1 = s3_rotate(t), r2 = s3_rotate(r1);
    std::vector<PermutationTriple> orbit;
    for (const PermutationTriple& e : {t, r1, r2, s3_swap(t), s3_swap(r1), s3_swap(r2)}) {
        if (std::find(orbit.begin(), orbit.end(), e) == orbit.end()) orbit.push_back(e);
    }
    return orbit;
}

} // namespace certmono

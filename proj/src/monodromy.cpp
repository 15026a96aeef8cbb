#include "certmono/monodromy.hpp"

#include "certmono/error.hpp"
#include "certmono/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

namespace certmono {

namespace {

using cd = std::complex<double>;

constexpr Precision kVertexPrec = 128;
constexpr std::size_t kPieces = 8;

cd to_cd(const Complex& z) { return {z.re.to_double(), z.im.to_double()}; }

Complex vertex(const Complex& base, double re, double im, const Real& scale) {
    // base + (re + i im) * scale, exact for the dyadic inputs used here.
    const Real sre = mul(Real(re, 53), scale, Round::Nearest, kVertexPrec);
    const Real sim = mul(Real(im, 53), scale, Round::Nearest, kVertexPrec);
    return {add(base.re, sre, Round::Nearest, kVertexPrec), add(base.im, sim, Round::Nearest, kVertexPrec)};
}

Complex point(double re, double im) { return {Real(re, kVertexPrec), Real(im, kVertexPrec)}; }

// Distance from p to the segment [a, b].
double segment_distance(cd a, cd b, cd p) {
    const cd ab = b - a;
    const double len2 = std::norm(ab);
    double s = len2 > 0 ? std::real((p - a) * std::conj(ab)) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(a + s * ab - p);
}

Context context_for(const MooreBox& m, Precision floor) {
    Precision p = floor;
    for (const auto& c : m.x) p = std::max({p, c.re.precision(), c.im.precision()});
    return Context{p};
}

// Rank of each box per real coordinate: boxes whose enclosures chain
// together by overlap share a rank. Returns nullopt on a tie.
std::optional<std::vector<std::size_t>> canonical_order(const std::vector<MooreBox>& boxes) {
    const std::size_t d = boxes.size();
    if (d == 0) return std::vector<std::size_t>{};
    const std::size_t n = boxes[0].dim();
    std::vector<ComplexBox> enclosures;
    for (const auto& m : boxes) enclosures.push_back(box_ball(m.x, m.inner_radius()));
    std::vector<std::vector<std::size_t>> keys(d);
    for (std::size_t k = 0; k < 2 * n; ++k) {
        const auto coord = [&](std::size_t i) -> const RealInterval& {
            const ComplexInterval& c = enclosures[i][k / 2];
            return k % 2 == 0 ? c.re() : c.im();
        };
        std::vector<std::size_t> idx(d);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return coord(a).lo() < coord(b).lo(); });
        std::size_t rank = 0;
        Real reach = coord(idx[0]).hi();
        for (std::size_t j = 0; j < d; ++j) {
            const RealInterval& iv = coord(idx[j]);
            if (j > 0 && iv.lo() > reach) {
                ++rank;
                reach = iv.hi();
            } else if (iv.hi() > reach) {
                reach = iv.hi();
            }
            keys[idx[j]].push_back(rank);
        }
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    for (std::size_t j = 1; j < d; ++j)
        if (keys[order[j]] == keys[order[j - 1]]) return std::nullopt;
    return order;
}

std::vector<cd> aberth(const std::vector<cd>& c, std::uint64_t seed) {
    const std::size_t d = c.size() - 1;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
    double radius = 1.0;
    if (std::abs(c[0]) > 0) radius = std::pow(std::abs(c[0] / c[d]), 1.0 / static_cast<double>(d));
    const double offset = angle(rng);
    std::vector<cd> z(d);
    for (std::size_t k = 0; k < d; ++k)
        z[k] = std::polar(radius * (1.0 + 0.05 * static_cast<double>(k % 3)),
                          offset + 2 * M_PI * static_cast<double>(k) / static_cast<double>(d));
    for (int iter = 0; iter < 2000; ++iter) {
        double worst = 0;
        for (std::size_t k = 0; k < d; ++k) {
            cd p = c[d], dp = 0;
            for (std::size_t j = d; j-- > 0;) {
                dp = dp * z[k] + p;
                p = p * z[k] + c[j];
            }
            if (p == cd(0)) continue;
            const cd ratio = p / dp;
            cd sum = 0;
            for (std::size_t j = 0; j < d; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            const cd w = ratio / (1.0 - ratio * sum);
            if (std::isfinite(w.real()) && std::isfinite(w.imag())) z[k] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[k])));
        }
        if (worst < 1e-15) break;
    }
    return z;
}

} // namespace

std::pair<PLPath, PLPath> standard_loops(const Complex& base, const Real& radius) {
    if (radius.sign() <= 0) fail(ErrorKind::DegenerateLoop, "loop radius must be positive");
    const Complex b{base.re.with_precision(kVertexPrec, Round::Nearest), base.im.with_precision(kVertexPrec, Round::Nearest)};
    const Complex zero = point(0, 0), one = point(1, 0);
    PLPath loop0{{b, vertex(zero, 0, 1, radius), vertex(zero, -1, 0, radius), vertex(zero, 0, -1, radius), b}};
    PLPath loop1{{b, vertex(one, 0, -1, radius), vertex(one, 1, 0, radius), vertex(one, 0, 1, radius), b}};
    for (const PLPath* p : {&loop0, &loop1}) {
        for (std::size_t i = 0; i + 1 < p->vertices.size(); ++i) {
            const cd a = to_cd(p->vertices[i]), c = to_cd(p->vertices[i + 1]);
            if (a == c || segment_distance(a, c, 0.0) < 1e-9 || segment_distance(a, c, 1.0) < 1e-9)
                fail(ErrorKind::DegenerateLoop, "loop touches a branch point or repeats a vertex");
        }
    }
    if (winding_number(loop0, zero) != 1 || winding_number(loop0, one) != 0 || winding_number(loop1, one) != 1 ||
        winding_number(loop1, zero) != 0)
        fail(ErrorKind::DegenerateLoop, "base point and radius do not give simple loops around 0 and 1");
    return {std::move(loop0), std::move(loop1)};
}

PLPath big_loop(const Complex& base) {
    const Complex b{base.re.with_precision(kVertexPrec, Round::Nearest), base.im.with_precision(kVertexPrec, Round::Nearest)};
    return PLPath{{b, point(-1, 1), point(-1, -1), point(2, -1), point(2, 1), b}};
}

PLPath reversed(const PLPath& path) {
    PLPath r = path;
    std::reverse(r.vertices.begin(), r.vertices.end());
    return r;
}

int winding_number(const PLPath& path, const Complex& p) {
    const cd c = to_cd(p);
    double total = 0;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
        total += std::arg((to_cd(path.vertices[i + 1]) - c) / (to_cd(path.vertices[i]) - c));
    return static_cast<int>(std::lround(total / (2 * M_PI)));
}

Fiber make_fiber(const SquareSystem& system, const Complex& base, std::vector<MooreBox> candidates, std::size_t d,
                 const Context& ctx) {
    std::vector<MooreBox> distinct;
    for (auto& m : candidates) {
        bool seen = false;
        for (const auto& e : distinct) {
            if (same_zero(system, e, m, context_for(m, ctx.prec))) {
                seen = true;
                break;
            }
        }
        if (!seen) distinct.push_back(std::move(m));
    }
    if (distinct.size() != d)
        fail(ErrorKind::FiberCountMismatch,
             "found " + std::to_string(distinct.size()) + " distinct fiber points, expected " + std::to_string(d));

    for (auto& m : distinct)
        if (m.rho != rho::corrector) m = refine(system, m, rho::corrector, context_for(m, ctx.prec));

    // Shrink copies, at rising precision, until every point has its own key.
    // The fiber keeps the working-precision boxes.
    std::vector<MooreBox> tight = distinct;
    for (int round = 0; round < 6; ++round) {
        try {
            for (auto& m : tight) {
                const Context c = context_for(m, ctx.prec << round);
                const long bits = static_cast<long>(c.prec / 2) + 8L * round;
                Real cap = mul_2si(add(Real(1.0, 53), norm_inf(m.x), Round::Down, 53), -bits);
                if (m.r > cap) m = refine(system, m, rho::corrector, c, &cap);
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RefineStalled) throw;
            continue;
        }
        if (const auto order = canonical_order(tight)) {
            Fiber f{system, {}, base};
            for (const auto i : *order) f.boxes.push_back(distinct[i]);
            return f;
        }
    }
    fail(ErrorKind::MatchFailed, "cannot separate fiber points for canonical ordering");
}

Fiber certify_fiber(const SquareSystem& system, const Complex& base, const std::vector<ComplexVector>& points,
                    std::size_t d, const Context& ctx) {
    std::vector<MooreBox> boxes;
    for (const auto& p : points) {
        if (p.size() != system.dim())
            fail(ErrorKind::FiberCountMismatch, "start point has " + std::to_string(p.size()) +
                                                     " coordinates, system has " + std::to_string(system.dim()));
        try {
            boxes.push_back(certify_approx(system, p, ctx));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::CertifyFailed) throw;
        }
    }
    return make_fiber(system, base, std::move(boxes), d, ctx);
}

Fiber univariate_fiber(const ParametricSystem& f, const Complex& base, std::size_t d, std::uint64_t seed,
                       const Context& ctx) {
    require(f.dim() == 1, "univariate_fiber: system must have one unknown");
    const SquareSystem sys = specialize(f, ComplexInterval(base));
    const IntervalPoly& p = sys.polys()[0];
    const std::size_t deg = p.degree_in(0);
    if (deg != d)
        fail(ErrorKind::FiberCountMismatch,
             "polynomial has degree " + std::to_string(deg) + " in x at the base point, expected " + std::to_string(d));
    std::vector<cd> c(deg + 1, 0.0);
    for (const auto& [m, coeff] : p.terms()) {
        const Complex mid = coeff.midpoint(53);
        c[m[0]] = cd(mid.re.to_double(), mid.im.to_double());
    }
    if (c[deg] == cd(0)) fail(ErrorKind::FiberCountMismatch, "leading coefficient vanishes at the base point");
    std::vector<ComplexVector> points;
    for (const cd& z : aberth(c, seed)) points.push_back({Complex(z.real(), z.imag(), ctx.prec)});
    return certify_fiber(sys, base, points, d, ctx);
}

Fiber bootstrap_fiber(const ParametricSystem& tracked, const ParametricSystem& enlarged, const Complex& base,
                      std::size_t d, std::uint64_t seed, const TrackConfig& cfg, std::size_t threads) {
    const std::size_t n = enlarged.dim();
    require(n == tracked.dim() || n == tracked.dim() + 1, "bootstrap_fiber: enlarged system has wrong shape");
    const Context ctx{cfg.prec};
    const SquareSystem target = specialize(enlarged, ComplexInterval(base));
    const SquareSystem reduced = specialize(tracked, ComplexInterval(base));

    std::vector<unsigned> degrees;
    for (const auto& p : target.polys()) {
        degrees.push_back(p.total_degree());
        if (degrees.back() == 0) fail(ErrorKind::DegenerateModel, "constant equation in the fiber system");
    }
    std::vector<std::vector<std::size_t>> starts{{}};
    for (const unsigned deg : degrees) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& s : starts) {
            for (std::size_t k = 0; k < deg; ++k) {
                next.push_back(s);
                next.back().push_back(k);
            }
        }
        starts = std::move(next);
    }

    const ComplexInterval one = ComplexInterval::from_int(1, ctx.prec);
    // Homogenized target in (s, X0, X1..Xn).
    std::vector<IntervalPoly> homogeneous;
    for (std::size_t i = 0; i < n; ++i) {
        IntervalPoly h(n + 2);
        for (const auto& [m, c] : target.polys()[i].terms()) {
            Monomial e(n + 2, 0);
            unsigned used = 0;
            for (std::size_t k = 0; k < n; ++k) {
                e[k + 2] = m[k];
                used += m[k];
            }
            e[1] = degrees[i] - used;
            h.add_term(e, c);
        }
        homogeneous.push_back(std::move(h));
    }

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
        std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
        const auto unit = [&]() {
            const double a = angle(rng);
            return ComplexInterval(Complex(std::cos(a), std::sin(a), 53));
        };
        const ComplexInterval gamma = unit();

        //   H(s, X) = gamma (1 - s) G(X) + s F_b(X),  G_i = X_i^d_i - X0^d_i,
        // in projective coordinates so excess paths end at infinity instead of
        // diverging. Each piece of [0, 1] is tracked in the affine chart
        // conj(X) . Y = |X|^2 through the point X reached so far. Tracking stops
        // just short of s = 1 and Newton finishes on F_b: the endpoints are
        // certified afresh and only their count matters.
        const auto var = [&](std::size_t k) { return IntervalPoly::variable(n + 2, k, one); };
        const IntervalPoly s = var(0);
        const IntervalPoly one_minus_s = IntervalPoly::constant(n + 2, one) - s;
        std::vector<IntervalPoly> h;
        for (std::size_t i = 0; i < n; ++i) {
            const IntervalPoly g = var(i + 2).pow(degrees[i], one) - var(1).pow(degrees[i], one);
            h.push_back((one_minus_s * g).scaled(gamma) + s * homogeneous[i]);
        }
        const auto piece = [&](std::size_t j, const std::vector<cd>& x) {
            double norm2 = 0;
            for (const cd& v : x) norm2 += std::norm(v);
            std::vector<IntervalPoly> polys = h;
            IntervalPoly patch = -IntervalPoly::constant(n + 2, one);
            for (std::size_t k = 0; k <= n; ++k) {
                const cd a = std::conj(x[k]) / norm2;
                patch = patch + var(k + 1).scaled(ComplexInterval(Complex(a.real(), a.imag(), 53)));
            }
            polys.push_back(std::move(patch));
            const double lo = static_cast<double>(j) / kPieces;
            const double hi = j + 1 == kPieces ? 1 - 0x1p-10 : static_cast<double>(j + 1) / kPieces;
            return compose_segment(ParametricSystem(std::move(polys)), Complex(lo, 0.0, 53), Complex(hi, 0.0, 53));
        };

        // Paths heading to infinity or to singular endpoints are not worth
        // precision or steps: the first attempt gives up on them quickly.
        TrackConfig bcfg = cfg;
        bcfg.mode = TrackMode::Bootstrap;
        bcfg.trace = nullptr;
        bcfg.max_prec = attempt == 0 ? cfg.prec : std::min<Precision>(cfg.max_prec, 4 * cfg.prec);
        bcfg.max_steps = std::size_t{400} << (2 * attempt);
        bcfg.projective_coordinate = 0;

        std::vector<std::optional<MooreBox>> ends(starts.size());
        parallel_for(starts.size(), threads, [&](std::size_t k) {
            std::vector<cd> x{1.0};
            for (std::size_t i = 0; i < n; ++i)
                x.push_back(std::polar(1.0, 2 * M_PI * static_cast<double>(starts[k][i]) / degrees[i]));
            try {
                for (std::size_t j = 0; j < kPieces; ++j) {
                    const ParametricSystem f = piece(j, x);
                    ComplexVector x0;
                    for (const cd& v : x) x0.emplace_back(v.real(), v.imag(), ctx.prec);
                    const MooreBox m0 = certify_approx(f.at(ComplexInterval(Complex(0.0, 0.0, 53))), x0, ctx,
                                                       rho::corrector);
                    const MooreBox end = track_segment(f, m0, bcfg);
                    for (std::size_t i = 0; i <= n; ++i) x[i] = to_cd(end.x[i]);
                }
                double size = 0;
                for (const cd& v : x) size = std::max(size, std::abs(v));
                if (std::abs(x[0]) * cfg.diverge_norm < size) return;
                ComplexVector affine;
                for (std::size_t i = 1; i <= n; ++i) {
                    const cd v = x[i] / x[0];
                    affine.emplace_back(v.real(), v.imag(), ctx.prec);
                }
                ends[k] = certify_approx(target, affine, ctx, rho::corrector);
            } catch (const Error& e) {
                // Paths to infinity or to singular endpoints are expected here.
                if (e.kind() != ErrorKind::Diverged && e.kind() != ErrorKind::Stalled &&
                    e.kind() != ErrorKind::CertifyFailed)
                    throw;
            }
        });

        try {
            std::vector<MooreBox> candidates;
            for (auto& e : ends)
                if (e) candidates.push_back(std::move(*e));
            if (n != reduced.dim()) {
                // One representative per zero of the enlarged system before projecting.
                std::vector<MooreBox> distinct;
                for (auto& m : candidates) {
                    bool seen = false;
                    for (const auto& e : distinct) {
                        if (same_zero(target, e, m, context_for(m, ctx.prec))) {
                            seen = true;
                            break;
                        }
                    }
                    if (!seen) distinct.push_back(std::move(m));
                }
                candidates.clear();
                for (const auto& m : distinct) candidates.push_back(project_box(target, reduced, m, context_for(m, ctx.prec)));
            }
            return make_fiber(reduced, base, std::move(candidates), d, ctx);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::FiberCountMismatch && e.kind() != ErrorKind::RefineStalled &&
                e.kind() != ErrorKind::CertifyFailed)
                throw;
            last_error = e.what();
        }
    }
    fail(ErrorKind::FiberCountMismatch, "bootstrap failed after 3 seeds: " + last_error);
}

Permutation loop_permutation(const ParametricSystem& f, const Fiber& fiber, const PLPath& loop,
                             const TrackConfig& cfg, std::size_t threads, bool early_halt) {
    const std::size_t d = fiber.degree();
    require(d > 0, "loop_permutation: empty fiber");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, d);

    struct Outcome {
        std::size_t index;
        std::optional<MooreBox> end;
        std::exception_ptr error;
    };
    const CancelToken cancel;
    std::mutex mu;
    std::condition_variable ready;
    std::deque<Outcome> outcomes;
    std::atomic<std::size_t> next{0};

    const auto worker = [&]() {
        for (std::size_t i = next++; i < d; i = next++) {
            Outcome out{i, std::nullopt, nullptr};
            if (!cancel.cancelled()) {
                try {
                    out.end = track_path(f, loop, fiber.boxes[i], cfg, cancel);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::Cancelled) out.error = std::current_exception();
                } catch (...) {
                    out.error = std::current_exception();
                }
            }
            {
                const std::lock_guard<std::mutex> lock(mu);
                outcomes.push_back(std::move(out));
            }
            ready.notify_one();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);

    constexpr std::uint32_t unset = ~0u;
    std::vector<std::uint32_t> image(d, unset);
    std::vector<bool> hit(d, false);
    std::size_t matched = 0;
    std::exception_ptr failure;
    for (std::size_t received = 0; received < d; ++received) {
        Outcome out;
        {
            std::unique_lock<std::mutex> lock(mu);
            ready.wait(lock, [&] { return !outcomes.empty(); });
            out = std::move(outcomes.front());
            outcomes.pop_front();
        }
        if (failure) continue;
        if (out.error) {
            failure = out.error;
            cancel.cancel();
            continue;
        }
        if (!out.end) continue;
        try {
            const Context ctx = context_for(*out.end, cfg.prec);
            std::uint32_t found = unset;
            for (std::uint32_t j = 0; j < d && found == unset; ++j)
                if (same_zero(fiber.system, fiber.boxes[j], *out.end, ctx)) found = j;
            if (found == unset)
                fail(ErrorKind::MatchFailed, "endpoint of path " + std::to_string(out.index + 1) + " matches no fiber point");
            if (hit[found])
                fail(ErrorKind::MatchFailed, "two paths end at fiber point " + std::to_string(found + 1));
            hit[found] = true;
            image[out.index] = found;
            if (++matched == d - 1 && early_halt) cancel.cancel();
        } catch (...) {
            failure = std::current_exception();
            cancel.cancel();
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    if (matched + 1 == d) {
        const auto from = static_cast<std::size_t>(std::find(image.begin(), image.end(), unset) - image.begin());
        const auto to = static_cast<std::size_t>(std::find(hit.begin(), hit.end(), false) - hit.begin());
        image[from] = static_cast<std::uint32_t>(to);
    } else if (matched != d) {
        fail(ErrorKind::MatchFailed, "only " + std::to_string(matched) + " of " + std::to_string(d) + " paths matched");
    }
    return Permutation(std::move(image));
}

PermutationTriple monodromy_triple(const ParametricSystem& f, const Fiber& fiber, const Real& radius,
                                   const TrackConfig& cfg, std::size_t threads) {
    const auto [loop0, loop1] = standard_loops(fiber.base, radius);
    Permutation s0 = loop_permutation(f, fiber, loop0, cfg, threads);
    Permutation s1 = loop_permutation(f, fiber, loop1, cfg, threads);
    Permutation sinf = (s0 * s1).inverse();
    return {std::move(s0), std::move(s1), std::move(sinf)};
}

} // namespace certmono

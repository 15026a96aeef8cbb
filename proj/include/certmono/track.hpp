#pragma once

// Certified predictor-corrector continuation of one regular zero of
// F(t, .) along t in [0, 1] and along piecewise linear paths.

#include "certmono/certify.hpp"
#include "certmono/polysys.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

namespace certmono {

struct PLPath {
    std::vector<Complex> vertices;
};

enum class TrackMode { Strict, Bootstrap };

struct TrackConfig {
    Precision prec = 53;
    Precision max_prec = 4096;
    double delta_init = 1.0 / 8.0;
    double delta_growth = 2.0;
    double delta_min = 0x1p-60;
    double diverge_norm = 1e8;
    std::size_t max_steps = 0;       // per segment, 0 for no limit
    /// In projective coordinates, the index of the homogenizing coordinate:
    /// divergence is then measured on x / x_k.
    std::optional<std::size_t> projective_coordinate;
    TrackMode mode = TrackMode::Strict;
    std::ostream* trace = nullptr;   // one line per accepted step
};

/// Set-once flag shared between concurrent runs.
class CancelToken {
public:
    CancelToken() : flag_(std::make_shared<std::atomic<bool>>(false)) {}
    void cancel() const { flag_->store(true, std::memory_order_relaxed); }
    bool cancelled() const { return flag_->load(std::memory_order_relaxed); }

private:
    std::shared_ptr<std::atomic<bool>> flag_;
};

struct TrackStats {
    std::size_t steps = 0;
    std::size_t escalations = 0;
    Precision final_prec = 0;
};

/// m's (x, r, A) is a 7/8-Moore box for F_s for every s in [t, t + delta].
bool predict_step(const ParametricSystem& f, const Real& t, const Real& delta, const MooreBox& m,
                  const Context& ctx);

/// Continues the zero of m0 (a box for F_0) to t = 1 and returns a
/// 1/8-Moore box for F_1. Throws Stalled, Diverged, Cancelled.
MooreBox track_segment(const ParametricSystem& f, const MooreBox& m0, const TrackConfig& cfg,
                       const CancelToken& cancel = {}, TrackStats* stats = nullptr);

/// track_segment over each piece of the path, F's parameter running along it.
MooreBox track_path(const ParametricSystem& f, const PLPath& path, const MooreBox& m0, const TrackConfig& cfg,
                    const CancelToken& cancel = {}, TrackStats* stats = nullptr);

} // namespace certmono

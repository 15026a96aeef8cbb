#pragma once

// Belyi entries: exact models over Q(nu), the systems they induce, and the
// verification pipeline from equations to a compared monodromy triple.

#include "certmono/embedding.hpp"
#include "certmono/monodromy.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace certmono {

/// Exact polynomial with its variable names (names only matter for I/O).
struct NamedPoly {
    std::vector<std::string> vars;
    ExactPoly poly;
};

struct P1Model {
    NamedPoly num, den;   // univariate
};

struct SmoothModel {
    std::vector<NamedPoly> equations;   // g_1..g_{n-1}, all over the same n variables
    NamedPoly num, den;
};

struct PlaneModel {
    NamedPoly curve;   // variables (t, x)
    NFElement lambda;
};

using BelyiModel = std::variant<P1Model, SmoothModel, PlaneModel>;

struct BelyiEntry {
    std::string label;
    std::size_t degree = 0;
    FieldPtr field;
    std::string embedding_re, embedding_im;   // decimal hint for the root of m
    BelyiModel model;
    PermutationTriple expected;
    std::optional<std::uint64_t> group_order;
};

enum class FiberMode { Univariate, Multivariate };

struct BuiltSystem {
    ParametricSystem tracked;     // (t, x)
    ParametricSystem bootstrap;   // tracked, or tracked plus (q z - 1)
    FiberMode mode = FiberMode::Univariate;
};

/// Exact construction, then one substitution nu -> alpha.
/// P1: p - t q. Smooth: (g_1..g_{n-1}, p - t q), bootstrap adds q z - 1.
/// Plane: f(t / lambda, x). Throws NotCoprime, DegenerateModel.
BuiltSystem build_system(const BelyiModel& model, const EmbeddingBox& emb);

/// Exact part of build_system, before embedding: the tracked equations and
/// the bootstrap equations over Q(nu), variable 0 being t.
std::pair<std::vector<ExactPoly>, std::vector<ExactPoly>> exact_system(const BelyiModel& model, const FieldPtr& field);

enum class VerifyStatus { Pass, PassUpToS3, PassInverse, FailTriple, Error };

std::string_view to_string(VerifyStatus s);

struct VerifyConfig {
    TrackConfig track;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string base = "0.5";     // exact decimal
    std::string radius = "0.5";
    std::optional<std::vector<ComplexVector>> start_fiber;
};

struct PhaseTiming {
    std::string phase;
    double seconds = 0;
};

struct VerifyReport {
    std::string label;
    VerifyStatus status = VerifyStatus::Error;
    std::optional<ErrorKind> error_kind;
    std::string error_phase;
    std::string error_message;
    std::optional<PermutationTriple> computed;
    std::string group_order;   // decimal, empty if not computed
    bool transitive = false;
    std::optional<std::size_t> s3_index;
    std::optional<Permutation> conjugator;
    std::string alpha;         // certified enclosure of the embedding, for triage
    std::vector<PhaseTiming> timings;
    Precision final_prec = 0;   // precision of the run that produced the status
    std::size_t retries = 0;
    // Configuration echo.
    std::uint64_t seed = 0;
    Precision prec = 0;
    std::string base, radius;
};

/// Never throws: every failure becomes an Error status naming the phase.
VerifyReport verify_entry(const BelyiEntry& entry, const VerifyConfig& cfg);

/// PASS, PASS_UP_TO_S3 or PASS_INVERSE with the witnessing conjugator, or
/// FAIL_TRIPLE. Fills status, s3_index and conjugator.
void compare_triples(const PermutationTriple& computed, const PermutationTriple& expected, VerifyReport& report);

struct BatchItem {
    std::string label;                    // used when loading fails
    std::function<BelyiEntry()> load;     // may throw ParseError and the like
};

struct BatchSummary {
    std::size_t pass = 0, pass_up_to_s3 = 0, pass_inverse = 0, fail_triple = 0, error = 0;
    std::size_t total() const { return pass + pass_up_to_s3 + pass_inverse + fail_triple + error; }
};

/// Entries run concurrently (up to cfg.threads), each single-threaded inside;
/// a lone entry gets all threads. Reports come back in input order.
std::vector<VerifyReport> verify_batch(const std::vector<BatchItem>& items, const VerifyConfig& cfg,
                                       BatchSummary* summary = nullptr);

/// 0 if every status passes, 1 on any FAIL_TRIPLE, 2 on any ERROR.
int exit_code(const std::vector<VerifyReport>& reports);

} // namespace certmono

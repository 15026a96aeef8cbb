#pragma once

// Entry documents (JSON), start-fiber files, the upstream fetch-and-cache
// client and report output.

#include "certmono/belyi.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace certmono {

/// Parses and validates an entry document. Throws ParseError naming the
/// offending field, InvalidTriple on a bad triple.
BelyiEntry parse_entry(std::string_view text);
BelyiEntry load_entry(const std::filesystem::path& path);

/// Canonical document text; parse_entry(print_entry(e)) equals e.
std::string print_entry(const BelyiEntry& entry);

bool same_entry(const BelyiEntry& a, const BelyiEntry& b);

/// One point per non-empty line, "re im" decimal (or hex) pairs per
/// coordinate; '#' starts a comment. Throws ParseError.
std::vector<ComplexVector> parse_start_fiber(std::string_view text, Precision prec);
std::vector<ComplexVector> load_start_fiber(const std::filesystem::path& path, Precision prec);

// Upstream translation layer. The only code that knows the upstream field
// names; everything past it sees the local schema.
namespace upstream {

/// Expression text in the upstream style ("x^3 - 2*nu*x/(x + 1)") as a
/// numerator/denominator pair over the given variables; "nu" is the field
/// generator. Throws SchemaMapError.
std::pair<ExactPoly, ExactPoly> parse_rational_function(std::string_view text, const std::vector<std::string>& vars,
                                                        const FieldPtr& field);

/// Maps one API response body to a local entry document. Throws
/// SchemaMapError on format drift, NetworkError when the body has no record
/// for the label.
std::string translate(std::string_view payload, std::string_view label);

} // namespace upstream

/// Directory of fetched documents keyed by label, raw payloads under raw/,
/// fetch timestamps in index.json.
class CacheStore {
public:
    explicit CacheStore(std::filesystem::path dir);

    /// $CERTMONO_CACHE, else ./certmono-cache.
    static std::filesystem::path default_dir();

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path document_path(std::string_view label) const;
    std::filesystem::path raw_path(std::string_view label) const;

    bool contains(std::string_view label) const;
    std::string read(std::string_view label) const;
    void store(std::string_view label, const std::string& document, const std::string& raw);
    void store_raw(std::string_view label, const std::string& raw);
    /// Fetch time (seconds since the epoch) from the index, 0 if absent.
    long long fetched_at(std::string_view label) const;

private:
    std::filesystem::path dir_;
};

struct FetchConfig {
    // "{label}" is replaced by the label.
    std::string endpoint = "https://www.lmfdb.org/api/belyi_galmaps/?label={label}&_format=json";
    double timeout_seconds = 30;
    bool refresh = false;
};

/// Cache hit short-circuits; otherwise GET, translate, store. Throws
/// NetworkError (404 included, message says so), SchemaMapError (raw
/// payload kept in the cache for debugging).
std::string fetch_entry(std::string_view label, CacheStore& cache, const FetchConfig& cfg);

/// Reports as one JSON object per line.
std::string report_json(const VerifyReport& r, bool with_timings = true);
void write_reports_json(std::ostream& os, const std::vector<VerifyReport>& reports, bool with_timings = true);
/// Human-readable table plus the per-status summary.
void write_reports_text(std::ostream& os, const std::vector<VerifyReport>& reports);

} // namespace certmono

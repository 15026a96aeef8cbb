// certmono: verify monodromy triples of Belyi maps from exact equations.

#include "certmono/error.hpp"
#include "certmono/ingest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

using namespace certmono;
namespace fs = std::filesystem;

namespace {

struct Options {
    Precision prec = 53;
    Precision max_prec = 4096;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string base = "0.5";
    std::string radius = "0.5";
    std::string start_fiber;
    std::string report = "text";
    bool trace = false;
    bool no_timings = false;
    std::string cache;
    FetchConfig fetch;
};

void add_verify_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--prec", o.prec, "working precision in bits")->check(CLI::Range(24, 1 << 20));
    cmd->add_option("--max-prec", o.max_prec, "precision cap for escalation")->check(CLI::Range(24, 1 << 20));
    cmd->add_option("--seed", o.seed, "seed for start systems and root finding");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
    cmd->add_option("--base", o.base, "base point on the real axis, exact decimal");
    cmd->add_option("--radius", o.radius, "loop radius, exact decimal");
    cmd->add_option("--start-fiber", o.start_fiber, "file of approximate fiber points");
    cmd->add_option("--report", o.report, "report format")->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--trace", o.trace, "log every tracker step to stderr");
    cmd->add_flag("--no-timings", o.no_timings, "leave timings out of json records");
    cmd->add_option("--cache", o.cache, "cache directory for fetched labels");
    cmd->add_option("--endpoint", o.fetch.endpoint, "upstream URL template, {label} is substituted");
    cmd->add_option("--timeout", o.fetch.timeout_seconds, "HTTP timeout in seconds");
    cmd->add_flag("--refresh", o.fetch.refresh, "refetch labels even if cached");
}

VerifyConfig verify_config(const Options& o) {
    VerifyConfig cfg;
    cfg.track.prec = o.prec;
    cfg.track.max_prec = std::max(o.prec, o.max_prec);
    cfg.track.trace = o.trace ? &std::cerr : nullptr;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.base = o.base;
    cfg.radius = o.radius;
    if (!o.start_fiber.empty()) cfg.start_fiber = load_start_fiber(o.start_fiber, std::max<Precision>(o.prec, 64));
    return cfg;
}

CacheStore cache_of(const Options& o) {
    return CacheStore(o.cache.empty() ? CacheStore::default_dir() : fs::path(o.cache));
}

// A path that exists is an entry file; anything else is a database label.
BatchItem item_for(const std::string& ref, const fs::path& relative_to, const Options& o, CacheStore& cache) {
    fs::path p = ref;
    if (p.is_relative() && !relative_to.empty()) p = relative_to / p;
    if (fs::exists(p)) return {ref, [p] { return load_entry(p); }};
    // Fetches happen here, one at a time; failures surface when the item loads.
    try {
        const std::string doc = fetch_entry(ref, cache, o.fetch);
        return {ref, [doc] { return parse_entry(doc); }};
    } catch (const Error& e) {
        const Error err = e;
        return {ref, [err]() -> BelyiEntry { throw err; }};
    }
}

int emit(const std::vector<VerifyReport>& reports, const Options& o) {
    if (o.report == "json") write_reports_json(std::cout, reports, !o.no_timings);
    else write_reports_text(std::cout, reports);
    return exit_code(reports);
}

int run_verify(const std::string& ref, const Options& o) {
    CacheStore cache = cache_of(o);
    const BatchItem item = item_for(ref, {}, o, cache);
    return emit(verify_batch({item}, verify_config(o)), o);
}

int run_batch(const std::string& ref, const Options& o) {
    CacheStore cache = cache_of(o);
    std::vector<BatchItem> items;
    const fs::path p = ref;
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(p))
            if (f.is_regular_file() && f.path().extension() == ".json") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) items.push_back(item_for(f.string(), {}, o, cache));
    } else {
        std::ifstream in(p);
        if (!in) fail(ErrorKind::ParseError, "cannot read " + ref);
        for (std::string line; std::getline(in, line);) {
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line.erase(0, line.find_first_not_of(" \t\r"));
            line.erase(line.find_last_not_of(" \t\r") + 1);
            if (!line.empty()) items.push_back(item_for(line, p.parent_path(), o, cache));
        }
    }
    return emit(verify_batch(items, verify_config(o)), o);
}

int run_fetch(const std::string& label, const Options& o) {
    CacheStore cache = cache_of(o);
    const bool hit = !o.fetch.refresh && cache.contains(label);
    fetch_entry(label, cache, o.fetch);
    std::cout << (hit ? "cached " : "fetched ") << cache.document_path(label).string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified monodromy of Belyi maps"};
    app.require_subcommand(1);
    Options o;
    std::string target;

    auto* verify = app.add_subcommand("verify", "verify one entry file or database label");
    verify->add_option("entry", target, "entry file or label")->required();
    add_verify_flags(verify, o);

    auto* batch = app.add_subcommand("batch", "verify every entry in a directory or list file");
    batch->add_option("entries", target, "directory of entry files, or a file listing paths and labels")->required();
    add_verify_flags(batch, o);

    auto* fetch = app.add_subcommand("fetch", "fetch a database entry into the cache");
    fetch->add_option("label", target, "database label")->required();
    fetch->add_flag("--refresh", o.fetch.refresh, "refetch even if cached");
    fetch->add_option("--cache", o.cache, "cache directory");
    fetch->add_option("--endpoint", o.fetch.endpoint, "upstream URL template, {label} is substituted");
    fetch->add_option("--timeout", o.fetch.timeout_seconds, "HTTP timeout in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify) return run_verify(target, o);
        if (*batch) return run_batch(target, o);
        return run_fetch(target, o);
    } catch (const std::exception& e) {
        std::cerr << "certmono: " << e.what() << '\n';
        return 2;
    }
}

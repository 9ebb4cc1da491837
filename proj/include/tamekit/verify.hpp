#pragma once

// Manifest-driven verification sweeps. A manifest lists (extension, base,
// S, q-range) entries; a run produces one certificate per admissible q
// plus the entry-level checks (integrality of w2*theta, rank bounds, the
// Sinnott gcd), a global tame-symbol suite, and a summary. Reports are
// deterministic for a fixed manifest, seed and tool version; the only
// volatile data (wall time, cache statistics) lives in the "run" section.

#include <tamekit/dirichlet.hpp>
#include <tamekit/errors.hpp>
#include <tamekit/fields.hpp>
#include <tamekit/ktheory.hpp>
#include <tamekit/stickelberger.hpp>

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace tamekit {

inline constexpr const char* kToolVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

struct ManifestEntry {
    std::string ext;
    std::string base = "1";
    std::optional<std::vector<long long>> sfin;      // nullopt = minimal
    std::optional<std::vector<long long>> q_primes;  // explicit primes
    long long q_bound = 100;                         // used when q_primes is empty
};

struct Manifest {
    std::vector<ManifestEntry> entries;

    static Manifest from_json(const nlohmann::json& j);
    static Manifest load(const std::string& path);
    ordered_json to_json() const;
};

inline bool is_prime_ll(long long p) {
    if (p < 2) return false;
    for (long long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

inline Manifest Manifest::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "manifest: expected an object with an \"entries\" array");
    Manifest m;
    for (const auto& e : j["entries"]) {
        ManifestEntry entry;
        if (!e.contains("ext") || !e["ext"].is_string())
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "manifest entry: missing \"ext\" literal");
        entry.ext = e["ext"].get<std::string>();
        if (e.contains("base")) entry.base = e["base"].get<std::string>();
        if (e.contains("sfin") && !(e["sfin"].is_string() && e["sfin"] == "minimal")) {
            if (!e["sfin"].is_array())
                throw admissibility_error(admissibility_error::reason::bad_input,
                                          "manifest entry: \"sfin\" must be an array or \"minimal\"");
            entry.sfin = e["sfin"].get<std::vector<long long>>();
        }
        if (e.contains("qPrimes")) {
            const auto& q = e["qPrimes"];
            if (q.is_array()) {
                entry.q_primes = q.get<std::vector<long long>>();
                for (long long p : *entry.q_primes)
                    if (!is_prime_ll(p))
                        throw admissibility_error(admissibility_error::reason::bad_input,
                                                  "manifest entry: qPrimes contains the non-prime " +
                                                      std::to_string(p));
            } else if (q.is_object() && q.contains("bound")) {
                entry.q_bound = q["bound"].get<long long>();
            } else {
                throw admissibility_error(admissibility_error::reason::bad_input,
                                          "manifest entry: \"qPrimes\" must be a list or {\"bound\": n}");
            }
        }
        m.entries.push_back(std::move(entry));
    }
    return m;
}

inline Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "manifest " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

inline ordered_json Manifest::to_json() const {
    ordered_json j;
    j["entries"] = ordered_json::array();
    for (const auto& e : entries) {
        ordered_json je;
        je["ext"] = e.ext;
        je["base"] = e.base;
        if (e.sfin)
            je["sfin"] = *e.sfin;
        else
            je["sfin"] = "minimal";
        if (e.q_primes)
            je["qPrimes"] = *e.q_primes;
        else
            je["qPrimes"] = ordered_json{{"bound", e.q_bound}};
        j["entries"].push_back(std::move(je));
    }
    return j;
}

/// Every totally real multiquadratic field with generators supported on the
/// given primes and rank at most max_rank, canonically ordered.
inline std::vector<MultiquadField> enumerate_fields(const std::vector<long long>& support,
                                                    int max_rank) {
    std::vector<long long> classes;
    std::uint32_t n = std::uint32_t(1) << support.size();
    for (std::uint32_t mask = 1; mask < n; ++mask) {
        long long d = 1;
        for (std::size_t i = 0; i < support.size(); ++i)
            if ((mask >> i) & 1u) d *= support[i];
        classes.push_back(d);
    }
    std::set<std::vector<long long>> seen;
    std::vector<MultiquadField> out;
    // rank 1, then rank 2 built on rank 1, etc., deduplicated by canonical
    // generators
    std::vector<std::vector<long long>> frontier = {{}};
    for (int r = 1; r <= max_rank; ++r) {
        std::vector<std::vector<long long>> next;
        for (const auto& gens : frontier)
            for (long long d : classes) {
                std::vector<long long> cand = gens;
                cand.push_back(d);
                try {
                    MultiquadField f = make_field(cand);
                    if (seen.insert(f.gens()).second) {
                        out.push_back(f);
                        next.push_back(f.gens());
                    }
                } catch (const admissibility_error&) {
                    // dependent pick; skip
                }
            }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end(), [](const MultiquadField& a, const MultiquadField& b) {
        if (a.rank() != b.rank()) return a.rank() < b.rank();
        return a.gens() < b.gens();
    });
    return out;
}

/// The built-in manifest: every field with generator support in
/// {2,3,5,7,11,13} and rank <= 2, minimal S, q up to 100, base Q.
inline Manifest default_manifest(std::vector<long long> support = {2, 3, 5, 7, 11, 13},
                                 int max_rank = 2, long long q_bound = 100) {
    Manifest m;
    for (const auto& f : enumerate_fields(support, max_rank)) {
        ManifestEntry e;
        e.ext = f.literal();
        e.q_bound = q_bound;
        m.entries.push_back(std::move(e));
    }
    return m;
}

struct VerifyOptions {
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string cache_path;  // empty = no persistence
};

struct VerifySummary {
    long long pass = 0;
    long long fail = 0;
    long long skipped = 0;
};

inline ordered_json certificate_to_json(const Certificate& c) {
    ordered_json j;
    j["field"] = c.ext_gens;
    j["base"] = c.base_gens;
    j["sfin"] = c.sfin;
    j["q"] = ordered_json{{"p", c.q_p}, {"f", c.q_f}};
    j["delta"] = c.delta;
    j["deltaAssumed"] = c.delta_assumed;
    j["alpha"] = c.alpha_text;
    ordered_json checks;
    checks["alphaIntegral"] = c.alpha_integral;
    checks["doubledAlphaIntegral"] = c.doubled_alpha_integral;
    checks["btOrdersOk"] = c.bt_orders_ok;
    checks["firstTerm"] =
        ordered_json{{"integral", c.first_term_ok}, {"witness", c.first_term_witness.str()}};
    ordered_json chars = ordered_json::array();
    for (const auto& cc : c.characters) {
        ordered_json jc;
        jc["discriminant"] = cc.discriminant;
        jc["split"] = cc.split;
        jc["w2Divisibility"] = cc.w2_div_ok;
        jc["kerIota"] = cc.ker_iota;
        jc["termWitness"] = cc.term_witness.str();
        jc["termIntegral"] = cc.term_witness_ok;
        jc["residual"] = cc.residual.str();
        jc["residualIntegral"] = cc.residual_ok;
        jc["transferRatio"] = cc.transfer_ratio.str();
        jc["transferRatioIntegral"] = cc.transfer_ratio_ok;
        jc["secondTermIntegral"] = cc.second_term_integral;
        chars.push_back(std::move(jc));
    }
    checks["characters"] = std::move(chars);
    checks["decompositionMatch"] = c.decomposition_match;
    j["checks"] = std::move(checks);
    j["verdict"] = c.pass ? "PASS" : "FAIL";
    return j;
}

namespace detail {

struct EntryResult {
    ordered_json json;
    VerifySummary counts;
};

inline EntryResult process_entry(const ManifestEntry& entry) {
    EntryResult res;
    MultiquadField ext = parse_field_literal(entry.ext);
    MultiquadField base = parse_field_literal(entry.base);
    RelativeExtension rel(ext, base);
    SConfig s = entry.sfin ? SConfig{{entry.sfin->begin(), entry.sfin->end()}} : minimal_s(ext);
    for (long long p : s.sfin)
        if (!is_prime_ll(p))
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "sfin contains the non-prime " + std::to_string(p));
    require_s_covers_ramified(ext, s);

    ordered_json j;
    j["ext"] = ext.literal();
    j["base"] = base.literal();
    j["sfin"] = std::vector<long long>(s.sfin.begin(), s.sfin.end());
    long long w2_ext = w2_cached(ext);
    j["w2Ext"] = w2_ext;

    auto dr = deligne_ribet_check(rel, s);
    j["deligneRibet"] = ordered_json{{"pass", dr.pass},
                                     {"w2", dr.w2_ext},
                                     {"scaled", dr.scaled.to_coeff_strings()}};
    dr.pass ? ++res.counts.pass : ++res.counts.fail;

    if (base.is_rationals()) {
        RankCheck rc = kummer_rank_check(ext, s);
        j["kummerRank"] = ordered_json{{"pass", rc.pass},
                                       {"gamma", rc.gamma},
                                       {"k", rc.k},
                                       {"m", rc.m},
                                       {"delta", rc.delta_value}};
        rc.pass ? ++res.counts.pass : ++res.counts.fail;
    }

    long long sinnott_bound = 200;
    if (entry.q_primes)
        for (long long p : *entry.q_primes) sinnott_bound = std::max(sinnott_bound, p);
    else
        sinnott_bound = std::max(sinnott_bound, entry.q_bound);
    SinnottReport sr = sinnott_gcd(base, sinnott_bound);
    j["sinnott"] = ordered_json{{"pass", sr.never_below},
                                {"stabilized", sr.stabilized},
                                {"final", sr.final_gcd.str()},
                                {"w2", sr.w2_base},
                                {"primesUsed", (long long)sr.primes.size()}};
    sr.never_below ? ++res.counts.pass : ++res.counts.fail;

    std::vector<long long> qs;
    if (entry.q_primes) {
        qs = *entry.q_primes;
        std::sort(qs.begin(), qs.end());
        qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    } else {
        for (long long p = 2; p <= entry.q_bound; ++p)
            if (is_prime_ll(p)) qs.push_back(p);
    }

    CertificateContext ctx(rel, s);
    ordered_json certs = ordered_json::array();
    std::vector<long long> skipped;
    for (long long p : qs) {
        if (s.contains(p) || w2_ext % p == 0) {
            skipped.push_back(p);
            ++res.counts.skipped;
            continue;
        }
        Certificate cert = ctx.certify(prime_of_F(p, rel));
        cert.pass ? ++res.counts.pass : ++res.counts.fail;
        certs.push_back(certificate_to_json(cert));
    }
    j["qSkipped"] = skipped;
    j["certificates"] = std::move(certs);
    res.json = std::move(j);
    return res;
}

inline std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace detail

struct CacheLoad {
    std::string mode = "none";  // none | cold | warm | corrupt-recomputed
    std::size_t loaded = 0;
    bool writable = true;
};

/// Loads a persisted B2 table into the process-wide memo. Corruption or
/// unreadable files degrade to recomputation with a warning.
inline CacheLoad load_b2_cache(const std::string& path, std::ostream& warn = std::cerr) {
    CacheLoad result;
    if (path.empty()) return result;
    result.mode = "cold";
    std::error_code ec;
    bool existed = std::filesystem::exists(path, ec);
    if (existed) {
        std::ifstream in(path);
        try {
            nlohmann::json j;
            in >> j;
            if (!j.is_object() || !j.contains("b2") || !j["b2"].is_object())
                throw std::runtime_error("unexpected cache layout");
            std::map<long long, Rational> values;
            for (const auto& [key, value] : j["b2"].items())
                values[std::stoll(key)] = parse_rational(value.get<std::string>());
            b2_cache().preload(values);
            result.loaded = values.size();
            result.mode = "warm";
        } catch (const std::exception& e) {
            warn << "warning: cache " << path << " is corrupt (" << e.what()
                 << "); recomputing from scratch\n";
            result.mode = "corrupt-recomputed";
        }
    }
    {
        std::ofstream probe(path, std::ios::app);
        result.writable = probe.good();
    }
    if (!existed) std::filesystem::remove(path, ec);  // drop the probe artifact
    if (!result.writable)
        warn << "warning: cache path " << path << " is not writable; running in-memory only\n";
    return result;
}

/// Atomically persists the B2 memo (write to a temp file, then rename).
inline bool save_b2_cache(const std::string& path, std::ostream& warn = std::cerr) {
    if (path.empty()) return false;
    ordered_json j;
    j["version"] = 1;
    ordered_json table;
    for (const auto& [d, v] : b2_cache().snapshot()) table[std::to_string(d)] = to_string(v);
    j["b2"] = std::move(table);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            warn << "warning: cannot write cache " << path << "; results kept in memory only\n";
            return false;
        }
        out << j.dump(1) << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        warn << "warning: cannot move cache into place at " << path << '\n';
        std::remove(tmp.c_str());
        return false;
    }
    return true;
}

struct VerifyResult {
    ordered_json report;
    VerifySummary summary;
};

/// Runs every check in the manifest. Entries are processed by a worker
/// pool; determinism comes from aggregating results in manifest order.
inline VerifyResult run_verify(const Manifest& manifest, const VerifyOptions& options = {}) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t b2_before = b2_cache().computed();
    CacheLoad cache = load_b2_cache(options.cache_path);

    VerifySummary summary;
    ordered_json report;
    report["toolVersion"] = kToolVersion;
    report["seed"] = options.seed;

    TameSymbolReport tame = tame_symbol_checks(97, 200, options.seed);
    tame.pass ? ++summary.pass : ++summary.fail;

    const std::size_t n = manifest.entries.size();
    std::vector<detail::EntryResult> results(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    int jobs = std::max(1, options.jobs);
    jobs = (int)std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1));
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                results[i] = detail::process_entry(manifest.entries[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!errors[i].empty())
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "manifest entry " + std::to_string(i) + " (ext=" +
                                          manifest.entries[i].ext + "): " + errors[i]);

    ordered_json entries = ordered_json::array();
    for (auto& r : results) {
        summary.pass += r.counts.pass;
        summary.fail += r.counts.fail;
        summary.skipped += r.counts.skipped;
        entries.push_back(std::move(r.json));
    }

    report["summary"] = ordered_json{
        {"pass", summary.pass}, {"fail", summary.fail}, {"skipped", summary.skipped}};
    report["tameSymbols"] = ordered_json{{"pass", tame.pass},
                                         {"pMax", tame.p_max},
                                         {"samples", tame.samples},
                                         {"seed", tame.seed},
                                         {"checks", tame.checks},
                                         {"failures", tame.failures}};
    report["entries"] = std::move(entries);

    bool saved = cache.writable && !options.cache_path.empty() && save_b2_cache(options.cache_path);
    auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    report["run"] = ordered_json{{"timestamp", detail::timestamp_utc()},
                                 {"elapsedMs", (long long)elapsed.count()},
                                 {"jobs", jobs},
                                 {"cacheMode", cache.mode},
                                 {"cacheLoaded", (long long)cache.loaded},
                                 {"cacheSaved", saved},
                                 {"b2Computed", (long long)(b2_cache().computed() - b2_before)}};
    return VerifyResult{std::move(report), summary};
}

inline void write_report(const ordered_json& report, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "cannot write report " + path);
        out << report.dump(1) << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw admissibility_error(admissibility_error::reason::bad_input,
                                  "cannot move report into place at " + path);
}

}  // namespace tamekit

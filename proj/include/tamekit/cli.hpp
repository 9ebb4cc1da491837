#pragma once

#include <tamekit/verify.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace tamekit::cli {

// Exit codes: 0 success, 1 internal failure (an identity that should hold
// did not, or an unexpected error), 2 admissibility/usage error.

namespace detail {

inline SConfig parse_sfin(const std::string& text, const MultiquadField& ext) {
    if (text == "minimal") return minimal_s(ext);
    SConfig s;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            if (used != item.size() || !is_prime_ll(v)) throw std::invalid_argument(item);
            s.sfin.insert(v);
        } catch (const std::exception&) {
            throw admissibility_error(admissibility_error::reason::bad_input,
                                      "bad --sfin literal: '" + text + "' (primes or \"minimal\")");
        }
    }
    return s;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"exact Stickelberger elements and tame-kernel order predictions "
                 "for multiquadratic fields"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string ext_lit = "1", base_lit = "1", sfin_lit = "minimal";
    long long q = 0, bound = 200, c_const = 1;
    long long tame_bound = 97;
    int samples = 200, jobs = 1;
    std::uint64_t seed = 0;
    std::string manifest_path, report_path, cache_path;

    auto add_field_opts = [&](CLI::App* sub, bool with_base) {
        sub->add_option("--ext", ext_lit, "extension field literal, e.g. 2,5")->required();
        if (with_base) sub->add_option("--base", base_lit, "base field literal (default Q)");
    };

    CLI::App* theta_cmd = app.add_subcommand("theta", "print theta^S(-1) in Q[Gal(E/F)]");
    add_field_opts(theta_cmd, true);
    theta_cmd->add_option("--sfin", sfin_lit, "finite part of S: primes or \"minimal\"");

    CLI::App* alpha_cmd =
        app.add_subcommand("alpha", "print the integral element (Nq^2 - sigma_q) theta^S(-1)");
    add_field_opts(alpha_cmd, true);
    alpha_cmd->add_option("--sfin", sfin_lit, "finite part of S: primes or \"minimal\"");
    alpha_cmd->add_option("--q", q, "rational prime under q")->required();

    CLI::App* w2_cmd = app.add_subcommand("w2", "print w2 of a field");
    add_field_opts(w2_cmd, false);

    CLI::App* bt_cmd = app.add_subcommand("btorder", "print the predicted |K2| of the S-integers");
    add_field_opts(bt_cmd, false);
    bt_cmd->add_option("--sfin", sfin_lit, "finite part of S: primes or \"minimal\"");

    CLI::App* sinnott_cmd =
        app.add_subcommand("sinnott", "running gcd of Nq^2 - 1 over primes of the field");
    add_field_opts(sinnott_cmd, false);
    sinnott_cmd->add_option("--bound", bound, "largest rational prime to use");
    sinnott_cmd->add_option("--c", c_const, "extra excluded-divisor constant");

    CLI::App* tame_cmd = app.add_subcommand("tame", "sampled tame-symbol identity checks");
    tame_cmd->add_option("--bound", tame_bound, "largest residue prime");
    tame_cmd->add_option("--samples", samples, "samples per prime");
    tame_cmd->add_option("--seed", seed, "sampling seed");

    CLI::App* verify_cmd = app.add_subcommand("verify", "run a manifest of checks, write a report");
    verify_cmd->add_option("--manifest", manifest_path, "manifest JSON (omit for the built-in sweep)");
    verify_cmd->add_option("--report", report_path, "report path (omit to print to stdout)");
    verify_cmd->add_option("--jobs", jobs, "worker threads");
    verify_cmd->add_option("--seed", seed, "sampling seed");
    verify_cmd->add_option("--cache", cache_path, "persisted B2 table");

    std::vector<const char*> argv;
    std::string prog = "tamekit";
    argv.push_back(prog.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    try {
        if (theta_cmd->parsed()) {
            MultiquadField ext = parse_field_literal(ext_lit);
            RelativeExtension rel(ext, parse_field_literal(base_lit));
            out << theta(rel, detail::parse_sfin(sfin_lit, ext)).elem.to_text() << '\n';
        } else if (alpha_cmd->parsed()) {
            MultiquadField ext = parse_field_literal(ext_lit);
            RelativeExtension rel(ext, parse_field_literal(base_lit));
            SConfig s = detail::parse_sfin(sfin_lit, ext);
            require_admissible_q(rel, s, q);
            out << alpha(rel, s, prime_of_F(q, rel)).to_text() << '\n';
        } else if (w2_cmd->parsed()) {
            out << w2(parse_field_literal(ext_lit)) << '\n';
        } else if (bt_cmd->parsed()) {
            MultiquadField f = parse_field_literal(ext_lit);
            BTOrder b = bt_order(f, detail::parse_sfin(sfin_lit, f));
            if (!b.ok()) {
                err << "prediction checks failed (integral=" << b.integral_ok
                    << " sign=" << b.sign_ok << " factorization=" << b.factorization_ok << ")\n";
                return 1;
            }
            out << b.order << '\n';
        } else if (sinnott_cmd->parsed()) {
            SinnottReport rep = sinnott_gcd(parse_field_literal(ext_lit), bound, c_const);
            for (std::size_t i = 0; i < rep.primes.size(); ++i)
                out << rep.primes[i] << ' ' << rep.running[i] << '\n';
            out << "final " << rep.final_gcd << " w2 " << rep.w2_base << ' '
                << (rep.stabilized ? "stabilized" : "not-stabilized") << '\n';
            if (!rep.never_below) {
                err << "gcd dropped below w2\n";
                return 1;
            }
        } else if (tame_cmd->parsed()) {
            TameSymbolReport rep = tame_symbol_checks(tame_bound, samples, seed);
            out << (rep.pass ? "PASS" : "FAIL") << " checks=" << rep.checks
                << " failures=" << rep.failures << " pMax=" << rep.p_max
                << " samples=" << rep.samples << " seed=" << rep.seed << '\n';
            if (!rep.pass) return 1;
        } else if (verify_cmd->parsed()) {
            Manifest manifest =
                manifest_path.empty() ? default_manifest() : Manifest::load(manifest_path);
            VerifyOptions options;
            options.jobs = jobs;
            options.seed = seed;
            options.cache_path = cache_path;
            VerifyResult result = run_verify(manifest, options);
            if (report_path.empty())
                out << result.report.dump(1) << '\n';
            else
                write_report(result.report, report_path);
            // keep stdout pure JSON when the report goes there
            (report_path.empty() ? err : out)
                << "pass=" << result.summary.pass << " fail=" << result.summary.fail
                << " skipped=" << result.summary.skipped << '\n';
            if (result.summary.fail != 0) return 1;
        }
        return 0;
    } catch (const admissibility_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

}  // namespace tamekit::cli

#pragma once

// Command-line front end. Every range is validated before dispatch; exit
// codes are 0 (success), 1 (a verification entry failed) and 2 (invalid
// arguments or resources).

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehdelta/analytic.hpp"
#include "ehdelta/characters.hpp"
#include "ehdelta/delta.hpp"
#include "ehdelta/moments.hpp"
#include "ehdelta/sieve.hpp"
#include "ehdelta/suites.hpp"

namespace ehd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInvalid = 2;

class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::vector<std::string> split_colon(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    return parts;
}

inline std::uint64_t parse_count(const std::string& s, const char* what) {
    // Accepts "1000000" as well as "1e6".
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw usage_error(std::string(what) + ": not a number: " + s);
    }
    if (used != s.size() || !(v >= 0.0) || v != std::floor(v) || v > 1e18)
        throw usage_error(std::string(what) + ": expected a nonnegative integer, got " + s);
    return static_cast<std::uint64_t>(v);
}

inline double parse_real(const std::string& s, const char* what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw usage_error(std::string(what) + ": not a number: " + s);
    }
    if (used != s.size() || !std::isfinite(v)) throw usage_error(std::string(what) + ": not a finite number: " + s);
    return v;
}

inline DirichletCharacter parse_character(const std::string& q, const std::string& index) {
    const auto modulus = parse_count(q, "character modulus");
    const auto idx = parse_count(index, "character index");
    try {
        return make_character(modulus, idx);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
}

/// unit | mu | char:q:index
inline WeightFunction parse_weight(const std::string& s) {
    if (s == "unit") return WeightFunction::unit();
    if (s == "mu") return WeightFunction::moebius();
    const auto parts = split_colon(s);
    if (parts.size() == 3 && parts[0] == "char") return WeightFunction::character(parse_character(parts[1], parts[2]));
    throw usage_error("weight must be unit, mu or char:q:index, got " + s);
}

/// unit | yomega:y | mu2yomega:y | hchi:q:index
inline MultiplicativeWeight parse_multiplicative(const std::string& s) {
    if (s == "unit") return MultiplicativeWeight::unit();
    const auto parts = split_colon(s);
    if (parts.size() == 2 && (parts[0] == "yomega" || parts[0] == "mu2yomega")) {
        const double y = parse_real(parts[1], "y");
        if (!(y >= 0.0)) throw usage_error("y must be nonnegative");
        return parts[0] == "yomega" ? MultiplicativeWeight::y_omega(y) : MultiplicativeWeight::mu2_y_omega(y);
    }
    if (parts.size() == 3 && parts[0] == "hchi") return MultiplicativeWeight::h_chi(parse_character(parts[1], parts[2]));
    throw usage_error("g must be unit, yomega:y, mu2yomega:y or hchi:q:index, got " + s);
}

/// EHDELTA_THREADS, else the hardware concurrency.
inline unsigned default_threads() {
    if (const char* env = std::getenv("EHDELTA_THREADS")) {
        try {
            const auto v = parse_count(env, "EHDELTA_THREADS");
            if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
        } catch (const usage_error&) {
        }
        std::cerr << "ignoring invalid EHDELTA_THREADS=" << env << "\n";
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_atomic(path, text);
}

// ------------------------------------------------------------- subcommands

inline int cmd_chars(std::uint64_t q, bool json) {
    if (q == 0 || q > kDefaultModulusCap) throw usage_error("--modulus must lie in [1, 10^6]");
    const auto chars = enumerate_characters(q);
    auto exponent_json = [&](const DirichletCharacter& c) {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& e : c.exponent_table())
            t.push_back(e.is_none() ? nlohmann::json(nullptr) : nlohmann::json(e.value()));
        return t;
    };
    if (json) {
        nlohmann::json out = {{"modulus", q}, {"count", chars.size()}, {"characters", nlohmann::json::array()}};
        for (const auto& c : chars) {
            nlohmann::json j = {{"label", c.label()},
                                {"index", c.index()},
                                {"order", c.order()},
                                {"principal", c.is_principal()},
                                {"generator_images", c.generator_images()}};
            if (q <= 100) j["exponents"] = exponent_json(c);
            out["characters"].push_back(std::move(j));
        }
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "modulus " << q << ": " << chars.size() << " characters\n";
    for (const auto& c : chars) {
        std::cout << c.label() << " order=" << c.order() << (c.is_principal() ? " principal" : "");
        if (q <= 100) {
            std::cout << " exponents=";
            for (const auto& e : c.exponent_table()) std::cout << (e.is_none() ? std::string("-") : std::to_string(e.value())) << ' ';
        }
        std::cout << "\n";
    }
    return kExitOk;
}

inline int cmd_sieve(std::uint64_t limit, const std::string& csv) {
    if (limit < 2) throw usage_error("--limit must be at least 2");
    const auto table = build_spf(limit);
    std::string out = "n,spf,omega,mu2,tau\n";
    Factorization f;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        factorize_into(n, table, f);
        out += std::to_string(n) + "," + std::to_string(n == 1 ? 1 : table.spf(n)) + "," + std::to_string(f.omega()) +
               "," + std::to_string(f.mu2()) + "," + std::to_string(f.tau()) + "\n";
    }
    if (csv.empty())
        std::cout << "sieve up to " << limit << ": " << table.primes().size() << " primes\n";
    else
        write_atomic(csv, out);
    return kExitOk;
}

inline nlohmann::json witness_json(const DivisorProfile& p, const RunWitness& w) {
    nlohmann::json run = nlohmann::json::array();
    if (w.run)
        for (std::size_t k = w.run->first; k <= w.run->second; ++k) run.push_back(p.divisors()[k]);
    return {{"value", w.value}, {"run", run}, {"u", w.u}, {"v", w.v}};
}

inline int cmd_delta(std::uint64_t n, const std::string& weight, double V, std::optional<double> star, bool json) {
    if (n < 1) throw usage_error("--n must be >= 1");
    if (!(V > 0.0)) throw usage_error("--V must be positive");
    if (star && !(*star > 0.0)) throw usage_error("--star must be positive");
    const auto f = parse_weight(weight);
    const auto table = build_spf(std::max<std::uint64_t>(n, 2));
    const auto p = build_profile(n, f, table);
    const auto sup = delta_sup(p, V);
    const auto gap = gap_info(p);
    nlohmann::json out = {{"n", n},
                          {"weight", f.label()},
                          {"tau", p.size()},
                          {"V", V},
                          {"delta_sup", witness_json(p, sup)},
                          {"E", json_number(gap.E)},
                          {"Estar", gap.Estar}};
    std::optional<RunWitness> st;
    if (star) {
        st = delta_star(p, *star);
        out["v"] = *star;
        out["delta_star"] = witness_json(p, *st);
    }
    if (json) {
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    auto print = [&](const char* name, const RunWitness& w) {
        std::cout << name << " = " << format_g17(w.value) << "  run {";
        if (w.run)
            for (std::size_t k = w.run->first; k <= w.run->second; ++k)
                std::cout << (k == w.run->first ? "" : ",") << p.divisors()[k];
        std::cout << "}  u=" << format_g17(w.u) << " v=" << format_g17(w.v) << "\n";
    };
    std::cout << "n=" << n << " weight=" << f.label() << " tau=" << p.size() << "\n";
    print("Delta_V", sup);
    if (st) print("Delta*_v", *st);
    std::cout << "E=" << format_g17(gap.E) << " E*=" << format_g17(gap.Estar) << "\n";
    return kExitOk;
}

inline int cmd_constants(double t, std::optional<std::uint64_t> r, std::optional<double> y, bool json) {
    if (!(t >= 1.0)) throw usage_error("--t must be >= 1");
    if (r.has_value() != y.has_value()) throw usage_error("--r and --y go together");
    if (r && (*r < 1 || *r > 1'000'000)) throw usage_error("--r must lie in [1, 10^6]");
    if (y && !(*y >= 0.0)) throw usage_error("--y must be nonnegative");
    const double lambda = lambda_gamma(t);
    const auto th = thresholds(t);
    nlohmann::json out = {{"t", t}, {"lambda", lambda}, {"y0", th.y0}, {"y1", th.y1}};
    if (r) {
        const auto w = ClassWeights::uniform(static_cast<std::uint32_t>(*r), *y);
        out["r"] = *r;
        out["y"] = *y;
        out["beta"] = beta_g(w, t);
    }
    if (json) {
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "lambda=" << format_g17(lambda) << "\ny0=" << format_g17(th.y0) << "\ny1=" << format_g17(th.y1) << "\n";
    if (r) std::cout << "beta=" << format_g17(out["beta"].get<double>()) << "\n";
    return kExitOk;
}

struct MomentsArgs {
    std::string x = "1000";
    double t = 1.0;
    double V = 1.0;
    std::string f = "unit";
    std::string g = "unit";
    std::optional<double> star;
    unsigned threads = 0;
    std::string out;
    std::string json;
    std::optional<double> time_cap;
};

inline int cmd_moments(const MomentsArgs& a) {
    const auto x = parse_count(a.x, "--x");
    if (x < 1 || x > kDefaultSieveCap) throw usage_error("--x must lie in [1, 10^8]");
    if (!(a.t >= 1.0)) throw usage_error("--t must be >= 1");
    if (!(a.V > 0.0)) throw usage_error("--V must be positive");
    if (a.star && !(*a.star > 0.0)) throw usage_error("--star must be positive");
    if (a.time_cap && !(*a.time_cap > 0.0)) throw usage_error("--time-cap must be positive");
    const auto f = parse_weight(a.f);
    const auto g = parse_multiplicative(a.g);
    MomentOptions opt;
    opt.threads = a.threads ? a.threads : default_threads();
    opt.time_cap_seconds = a.time_cap;
    const auto table = build_spf(std::max<std::uint64_t>(x, 2));
    const auto series = a.star ? moment_sum_star(x, a.t, *a.star, f, g, table, {}, opt)
                               : moment_sum(x, a.t, a.V, f, g, table, {}, opt);
    emit(series_csv(series), a.out);
    if (!a.json.empty()) {
        auto j = to_json(series);
        j["config"] = {{"x", x}, {"t", a.t}, {"V", a.V}, {"f", a.f}, {"g", a.g}, {"threads", opt.threads}};
        if (a.star) j["config"]["star"] = *a.star;
        write_atomic(a.json, j.dump(2) + "\n");
    }
    if (series.truncated) std::cerr << "time cap reached: series truncated after " << series.values.size()
                                    << " checkpoints\n";
    return kExitOk;
}

inline int cmd_verify(const std::string& suite, std::optional<std::uint64_t> max_n, unsigned threads,
                      const std::string& out) {
    const auto& names = suites::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) throw usage_error("unknown suite " + suite);
    suites::SuiteOptions opt;
    if (max_n) {
        if (*max_n < 1 || *max_n > 10'000'000) throw usage_error("--max-n must lie in [1, 10^7]");
        opt.max_n = *max_n;
    }
    opt.threads = threads ? threads : default_threads();
    const auto table = build_spf(suites::sieve_extent(opt));
    const auto report = suites::run(suite, table, opt);
    emit(to_json(report).dump(2) + "\n", out);
    std::cerr << suite << ": " << report.count(CheckStatus::Pass) << " pass, " << report.failures() << " fail, "
              << report.count(CheckStatus::ReportOnly) << " report-only\n";
    return report.passed() ? kExitOk : kExitFail;
}

// ------------------------------------------------------------------- main

inline int run(int argc, char** argv) {
    CLI::App app{"Exact window sums over divisors, their moments and verification suites"};
    app.require_subcommand(1);

    std::uint64_t modulus = 0;
    bool chars_json = false;
    auto* chars = app.add_subcommand("chars", "list the Dirichlet characters mod q");
    chars->add_option("--modulus", modulus, "modulus q")->required();
    chars->add_flag("--json", chars_json);

    std::string limit_s;
    std::string dump_csv;
    auto* sieve = app.add_subcommand("sieve", "build the smallest-prime-factor table");
    sieve->add_option("--limit", limit_s, "sieve limit x")->required();
    sieve->add_option("--dump-csv", dump_csv, "write n,spf,omega,mu2,tau rows");

    std::string n_s, weight = "unit";
    double V = 1.0;
    std::optional<double> star;
    bool delta_json = false;
    auto* delta = app.add_subcommand("delta", "Delta_V(n, f) and Delta*_v(n, f) with witnesses");
    delta->add_option("--n", n_s, "n")->required();
    delta->add_option("--weight", weight, "unit | mu | char:q:index");
    delta->add_option("--V", V, "window bound V")->required();
    delta->add_option("--star", star, "fixed window length v");
    delta->add_flag("--json", delta_json);

    double t = 1.0;
    std::optional<std::uint64_t> r;
    std::optional<double> y;
    bool const_json = false;
    auto* constants = app.add_subcommand("constants", "lambda(t), y0, y1 and beta");
    constants->add_option("--t", t, "t >= 1")->required();
    constants->add_option("--r", r, "character order r");
    constants->add_option("--y", y, "total prime weight y");
    constants->add_flag("--json", const_json);

    MomentsArgs margs;
    auto* moments = app.add_subcommand("moments", "S_{t,V}(x) or S*_{t,v}(x) at checkpoints");
    moments->add_option("--x", margs.x, "x (e.g. 1e6)")->required();
    moments->add_option("--t", margs.t, "t >= 1");
    moments->add_option("--V", margs.V, "window bound V");
    moments->add_option("--f", margs.f, "unit | mu | char:q:index");
    moments->add_option("--g", margs.g, "unit | yomega:y | mu2yomega:y | hchi:q:index");
    moments->add_option("--star", margs.star, "fixed window length v (STAR mode)");
    moments->add_option("--threads", margs.threads, "worker threads (default EHDELTA_THREADS or all cores)");
    moments->add_option("--out", margs.out, "CSV output path (stdout if omitted)");
    moments->add_option("--json", margs.json, "JSON output path");
    moments->add_option("--time-cap", margs.time_cap, "stop after this many seconds and mark the series truncated");

    std::string suite;
    std::optional<std::uint64_t> max_n;
    unsigned vthreads = 0;
    std::string vout;
    auto* verify = app.add_subcommand("verify", "run a verification suite and print its JSON report");
    verify->add_option("--suite", suite, "plancherel | lemma31 | split | ulimits | lowerbounds | trivialbound | "
                                         "oracle | constants | growth | all")
        ->required();
    verify->add_option("--max-n", max_n, "largest n for per-n sweeps");
    verify->add_option("--threads", vthreads, "worker threads for moment sums");
    verify->add_option("--out", vout, "report path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*chars) return cmd_chars(modulus, chars_json);
        if (*sieve) return cmd_sieve(parse_count(limit_s, "--limit"), dump_csv);
        if (*delta) return cmd_delta(parse_count(n_s, "--n"), weight, V, star, delta_json);
        if (*constants) return cmd_constants(t, r, y, const_json);
        if (*moments) return cmd_moments(margs);
        if (*verify) return cmd_verify(suite, max_n, vthreads, vout);
    } catch (const std::exception& e) {
        // Validation, resource caps and numerical failures all end here.
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

}  // namespace ehd::cli

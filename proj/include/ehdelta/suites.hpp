#pragma once

// Verification suites run by `ehdelta verify` and the acceptance binary.
// Each returns a VerifyReport; sweeps over many n keep one summary entry per
// parameter combination (the worst case, as lhs/rhs) plus every failure.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ehdelta/analytic.hpp"
#include "ehdelta/delta.hpp"
#include "ehdelta/moments.hpp"
#include "ehdelta/oracle.hpp"
#include "ehdelta/report.hpp"
#include "ehdelta/sieve.hpp"

namespace ehd::suites {

struct SuiteOptions {
    std::uint64_t max_n = 10'000;
    std::uint64_t oracle_max_n = 2'000;
    std::uint64_t moment_x = 100'000;
    std::uint64_t growth_x = 100'000;
    unsigned threads = 1;
    double plancherel_rel_tol = 5e-7;
};

/// chi_4, the order-4 character mod 5, and mu: the twisted weights used by
/// the Fourier-side and moment-inequality checks.
inline std::vector<WeightFunction> twisted_weights() {
    return {WeightFunction::character(make_character(4, 1)), WeightFunction::character(make_character(5, 1)),
            WeightFunction::moebius()};
}

inline std::vector<WeightFunction> all_weights() {
    auto w = twisted_weights();
    w.insert(w.begin(), WeightFunction::unit());
    return w;
}

/// 30 fixed n <= 10^4 mixing primes, prime powers, squarefree products and
/// highly composite numbers; entries above max_n are dropped.
inline std::vector<std::uint64_t> sample_corpus(std::uint64_t max_n) {
    static const std::uint64_t base[] = {1,    2,    5,    6,    12,   13,   30,   60,   65,   105,
                                         210,  360,  420,  720,  840,  1105, 1260, 1680, 2310, 2520,
                                         3003, 4620, 5005, 5040, 6188, 7560, 8190, 9240, 9699, 10000};
    std::vector<std::uint64_t> out;
    for (auto n : base)
        if (n <= max_n) out.push_back(n);
    return out;
}

namespace detail {

/// Tracks the entry with the largest lhs - rhs over a sweep and keeps every
/// failing entry.
class SweepSummary {
public:
    explicit SweepSummary(std::string id) : id_(std::move(id)) {}

    void add(const VerifyEntry& e) {
        ++count_;
        const double gap = e.lhs - e.rhs;
        if (count_ == 1 || gap > worst_gap_) {
            worst_gap_ = gap;
            worst_ = e;
        }
        if (e.status == CheckStatus::Fail) fails_.push_back(e);
    }

    void flush(VerifyReport& r, const std::string& params) {
        VerifyEntry s = worst_;
        s.check_id = id_;
        s.status = fails_.empty() ? CheckStatus::Pass : CheckStatus::Fail;
        s.witness = params + " checked=" + std::to_string(count_) + " failed=" + std::to_string(fails_.size()) +
                    " worst: " + worst_.witness;
        r.add(s);
        const std::size_t keep = std::min<std::size_t>(fails_.size(), 20);
        for (std::size_t i = 0; i < keep; ++i) r.add(fails_[i]);
    }

private:
    std::string id_;
    std::size_t count_ = 0;
    double worst_gap_ = 0.0;
    VerifyEntry worst_;
    std::vector<VerifyEntry> fails_;
};

}  // namespace detail

/// M_{2,V} from the exact breakpoint sum against its Fourier-side quadrature.
inline VerifyReport plancherel(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"plancherel", {}};
    for (double V : {1.0, 2.0, 5.0}) {
        const auto p1 = build_profile(1, WeightFunction::unit(), table);
        const auto q = plancherel_rhs(p1, V, opt.plancherel_rel_tol);
        r.add(check_close("plancherel_closed_form", q.value, V * V / 2.0, q.error_bound,
                          "n=1 V=" + ehd::detail::fmt_num(V)));
    }
    for (const auto& f : twisted_weights()) {
        for (double V : {1.0, 2.0, 5.0}) {
            for (auto n : sample_corpus(opt.max_n)) {
                const auto p = build_profile(n, f, table);
                const double exact = m_2V(p, V).value;
                const auto q = plancherel_rhs(p, V, opt.plancherel_rel_tol);
                const std::string w = "n=" + std::to_string(n) + " f=" + f.label() + " V=" + ehd::detail::fmt_num(V);
                r.add(check_close("plancherel", q.value, exact, q.error_bound, w + " bound=" +
                                                                                   ehd::detail::fmt_num(q.error_bound)));
                r.add(check_le("plancherel_error_budget", q.error_bound, 1e-6 * std::abs(exact), 0.0, w));
            }
        }
    }
    return r;
}

/// Delta*_v^2 <= 2^5 + 2^{3+2/q} E*^{-2/q} M*_{2q,v}^{1/q} for every n <= max_n.
inline VerifyReport lemma31(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"lemma31", {}};
    DivisorProfile p;
    Factorization fac;
    for (const auto& f : twisted_weights()) {
        for (int q : {1, 2}) {
            for (double v : {1.0, 2.0}) {
                detail::SweepSummary s("lemma31");
                for (std::uint64_t n = 1; n <= opt.max_n; ++n) {
                    build_profile_into(p, n, f, table, fac);
                    s.add(lemma31_check(p, q, v));
                }
                s.flush(r, "f=" + f.label() + " q=" + std::to_string(q) + " v=" + ehd::detail::fmt_num(v));
            }
        }
    }
    return r;
}

/// Delta_V <= V^{1-l} Delta*_{V^l} + Delta_{V^l} for every n <= max_n.
inline VerifyReport split(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"split", {}};
    DivisorProfile p;
    Factorization fac;
    for (const auto& f : all_weights()) {
        for (double V : {2.0, 4.0, 8.0}) {
            for (double ell : {1.0 / 3.0, 2.0 / 3.0, 6.0 / 7.0}) {
                detail::SweepSummary s("split");
                for (std::uint64_t n = 1; n <= opt.max_n; ++n) {
                    build_profile_into(p, n, f, table, fac);
                    s.add(split_bound_check(p, V, ell));
                }
                s.flush(r, "f=" + f.label() + " V=" + ehd::detail::fmt_num(V) + " l=" + ehd::detail::fmt_num(ell));
            }
        }
    }
    return r;
}

/// u_k = 2^{k+1} / (2^{k+1} - 1) and u_k <= 1 + 2^{-k}, exactly, k <= 30.
inline VerifyReport ulimits(const SuiteOptions& = {}) {
    VerifyReport r{"ulimits", {}};
    const auto u = u_sequence(30);
    for (unsigned k = 0; k < u.size(); ++k) {
        const BigInt p = BigInt(1) << (k + 1);
        const std::string w = "k=" + std::to_string(k) + " u=" + u[k].str();
        r.add(check_exact("u_closed_form", u[k] == Rational(p, p - 1), static_cast<double>(u[k]),
                          static_cast<double>(Rational(p, p - 1)), w));
        const Rational bound = 1 + Rational(1, BigInt(1) << k);
        r.add(check_exact("u_bound", u[k] <= bound, static_cast<double>(u[k]), static_cast<double>(bound), w));
    }
    r.add(check_exact("u_1", u[1] == Rational(4, 3), static_cast<double>(u[1]), 4.0 / 3.0, "u_1=" + u[1].str()));
    r.add(check_exact("u_2", u[2] == Rational(8, 7), static_cast<double>(u[2]), 8.0 / 7.0, "u_2=" + u[2].str()));
    return r;
}

/// Delta_V(n) >= V tau(n) / log n for 2 <= n <= max_n, V = min(1, log n),
/// as stated; the pigeonhole form V tau(n) / (V + log n) is reported next to it.
inline VerifyReport divisor_count_floor(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"divisor_count_floor", {}};
    DivisorProfile p;
    Factorization fac;
    detail::SweepSummary stated("divisor_count_floor");
    double worst_pigeonhole = -std::numeric_limits<double>::infinity();
    std::uint64_t worst_n = 0, pigeonhole_fail = 0;
    for (std::uint64_t n = 2; n <= opt.max_n; ++n) {
        build_profile_into(p, n, WeightFunction::unit(), table, fac);
        const double L = std::log(static_cast<double>(n));
        const double V = std::min(1.0, L);
        const double delta = delta_sup(p, V).value;
        const double tau = static_cast<double>(p.size());
        stated.add(check_le("divisor_count_floor", V * tau / L, delta, 1e-9, "n=" + std::to_string(n)));
        const double gap = V * tau / (V + L) - delta;
        if (gap > worst_pigeonhole) {
            worst_pigeonhole = gap;
            worst_n = n;
        }
        if (gap > 1e-9) ++pigeonhole_fail;
    }
    stated.flush(r, "V=min(1,log n) bound=V tau/log n (lhs) vs Delta_V (rhs)");
    r.add(report_only("divisor_count_floor_pigeonhole", worst_pigeonhole, 0.0,
                      "max of V tau/(V+log n) - Delta_V; worst_n=" + std::to_string(worst_n) +
                          " violations=" + std::to_string(pigeonhole_fail)));
    return r;
}

inline VerifyReport m2v_lower(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"m2v_lower", {}};
    for (const auto& f : twisted_weights())
        for (double V : {1.0, 2.0, 5.0})
            for (auto n : sample_corpus(opt.max_n)) {
                const auto p = build_profile(n, f, table);
                const std::string w = " f=" + f.label();
                auto literal = m2v_lower_check(p, V);
                auto scaled = m2v_lower_scaled_check(p, V);
                literal.witness += w;
                scaled.witness += w;
                r.add(std::move(literal));
                r.add(std::move(scaled));
            }
    return r;
}

inline std::vector<DirichletCharacter> standard_characters() { return {make_character(4, 1), make_character(5, 1)}; }

/// Pointwise h_chi floor over squarefree n <= moment_x on the standard
/// corpus, plus the implied sum and the pigeonhole form
/// (V tau / (V + log n)) as report-only entries.
inline VerifyReport hchi_floor(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"hchi_floor", {}};
    for (const auto& chi : standard_characters()) {
        for (double V : {1.0, 2.0, 3.5}) {
            for (double t : {1.0, 2.0}) {
                for (double y : {0.5, 1.0, 2.0}) {
                    const auto h = hchi_floor_check(opt.moment_x, t, V, chi, y, table);
                    const std::string w = " t=" + ehd::detail::fmt_num(t) + " y=" + ehd::detail::fmt_num(y);
                    auto e = h.entry;
                    e.witness += w;
                    r.add(e);
                    r.add(report_only("hchi_floor_implied_sum", h.implied, h.series_value,
                                      "implied lower bound for S_{t,V} (lhs) vs S_{t,V} (rhs); " + e.witness));
                    if (t == 1.0 && y == 1.0)
                        r.add(report_only("hchi_floor_pigeonhole", h.pigeonhole_worst, 0.0,
                                          "max of h tau V/(V+log n) - Delta_V; pigeonhole_violations=" +
                                              std::to_string(h.pigeonhole_violations) + " " + e.witness));
                }
            }
        }
    }
    return r;
}

/// trivial bound and lower floor on the standard moment corpus.
inline VerifyReport trivialbound(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"trivialbound", {}};
    MomentOptions mo;
    mo.threads = opt.threads;
    for (const auto& chi : standard_characters()) {
        const auto f = WeightFunction::character(chi);
        for (double y : {0.5, 1.0, 2.0}) {
            const auto g = MultiplicativeWeight::mu2_y_omega(y);
            for (double t : {1.0, 2.0}) {
                const double s1 = final_value(moment_sum(opt.moment_x, t, 1.0, f, g, table, {opt.moment_x}, mo));
                for (double V : {2.0, 3.5}) {
                    const auto series = moment_sum(opt.moment_x, t, V, f, g, table, {opt.moment_x}, mo);
                    const double rhs = std::pow(std::floor(V) + 1.0, 2.0 * t) * s1;
                    const std::string w = "x=" + std::to_string(opt.moment_x) + " t=" + ehd::detail::fmt_num(t) +
                                          " V=" + ehd::detail::fmt_num(V) + " f=" + f.label() + " g=" + g.label();
                    r.add(check_le("trivial_bound", final_value(series), rhs, 1e-9, w));
                    r.add(lower_floor_check(series, table));
                }
            }
        }
    }
    return r;
}

/// Every pointwise and summed lower bound.
inline VerifyReport lowerbounds(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"lowerbounds", {}};
    r.append(divisor_count_floor(table, opt));
    r.append(m2v_lower(table, opt));
    r.append(hchi_floor(table, opt));
    return r;
}

/// delta_sup and delta_star against the brute-force window oracle.
inline VerifyReport oracle_equivalence(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"oracle", {}};
    DivisorProfile p;
    Factorization fac;
    for (const auto& f : all_weights()) {
        for (double V : {0.5, 1.0, 3.0}) {
            detail::SweepSummary sup("oracle_sup"), star("oracle_star");
            for (std::uint64_t n = 1; n <= opt.oracle_max_n; ++n) {
                build_profile_into(p, n, f, table, fac);
                const std::string w = "n=" + std::to_string(n);
                const double a = delta_sup(p, V).value, b = oracle::delta_sup(p, V);
                sup.add(check_close("oracle_sup", a, b, 1e-12, w));
                const double c = delta_star(p, V).value, d = oracle::delta_star(p, V);
                star.add(check_close("oracle_star", c, d, 1e-12, w));
            }
            const std::string params = "f=" + f.label() + " V=" + ehd::detail::fmt_num(V);
            sup.flush(r, params);
            star.flush(r, params);
        }
    }
    return r;
}

/// lambda and beta identities.
inline VerifyReport constants(const SuiteOptions& = {}) {
    VerifyReport r{"constants", {}};
    r.add(check_close("lambda_1", lambda_gamma(1.0), 2.0, 1e-12, "t=1"));
    for (unsigned t = 1; t <= 8; ++t) {
        const double exact = static_cast<double>(binomial(2 * t, t));
        const std::string w = "t=" + std::to_string(t);
        r.add(check_close("lambda_gamma_binomial", lambda_gamma(t), exact, 1e-10 * exact, w));
        r.add(check_exact("lambda_binom_central", lambda_binom(t) == binomial(2 * t, t),
                          static_cast<double>(lambda_binom(t)), exact, w));
        QuadratureSpec spec;
        spec.rel_tol = 1e-10;
        r.add(check_close("lambda_integral", lambda_integral(t, spec).value, exact, 1e-7 * exact, w));
    }
    for (double t : {1.5, 2.5}) {
        QuadratureSpec spec;
        spec.rel_tol = 1e-10;
        const double lg = lambda_gamma(t);
        r.add(check_close("lambda_integral", lambda_integral(t, spec).value, lg, 1e-7 * lg,
                          "t=" + ehd::detail::fmt_num(t)));
    }
    // beta for y^omega with t < r equals y lambda(t) / 2^{2t-1}, as rationals.
    for (unsigned rr = 2; rr <= 8; ++rr) {
        for (unsigned t = 1; t < rr; ++t) {
            for (const Rational& y : {Rational(1, 2), Rational(1), Rational(3)}) {
                const Rational lhs = beta_yomega_exact(rr, t, y);
                const Rational rhs = y * Rational(lambda_binom(t)) / Rational(BigInt(1) << (2 * t - 1));
                r.add(check_exact("beta_yomega_identity", lhs == rhs, static_cast<double>(lhs),
                                  static_cast<double>(rhs),
                                  "r=" + std::to_string(rr) + " t=" + std::to_string(t) + " y=" + y.str()));
            }
        }
    }
    return r;
}

/// Growth slopes of S_{t,V}(x) in log log x next to the envelope exponents.
/// Report-only: the exponents carry unspecified constants and x is far
/// too small to separate them.
inline VerifyReport growth(const SpfTable& table, const SuiteOptions& opt = {}) {
    VerifyReport r{"growth", {}};
    MomentOptions mo;
    mo.threads = opt.threads;
    const auto g = MultiplicativeWeight::mu2_y_omega(1.0);
    for (const auto& f : twisted_weights()) {
        for (double V : {1.0, 2.0}) {
            const auto s = moment_sum(opt.growth_x, 1.0, V, f, g, table, {}, mo);
            const auto e = series_envelope(s);
            const std::string w = "x=" + std::to_string(opt.growth_x) + " t=1 V=" + ehd::detail::fmt_num(V) +
                                  " f=" + f.label() + " g=" + g.label() +
                                  " residual=" + ehd::detail::fmt_num(e.fit_residual) +
                                  " lower=" + ehd::detail::fmt_num(e.lower_exponents[0]) + "/" +
                                  ehd::detail::fmt_num(e.lower_exponents[1]) + "/" +
                                  ehd::detail::fmt_num(e.lower_exponents[2]) + " U=" + ehd::detail::fmt_num(e.U);
            r.add(report_only("growth_slope_vs_upper_exponent", e.fitted_slope, e.upper_exponent, w));
        }
    }
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"plancherel", "lemma31",      "split",  "ulimits",   "lowerbounds",
                                                "trivialbound", "oracle", "constants", "growth",  "all"};
    return names;
}

/// Largest n any suite needs from the sieve.
inline std::uint64_t sieve_extent(const SuiteOptions& opt) {
    return std::max({opt.max_n, opt.oracle_max_n, opt.moment_x, opt.growth_x, std::uint64_t{2}});
}

inline VerifyReport run(const std::string& name, const SpfTable& table, const SuiteOptions& opt = {}) {
    if (name == "plancherel") return plancherel(table, opt);
    if (name == "lemma31") return lemma31(table, opt);
    if (name == "split") return split(table, opt);
    if (name == "ulimits") return ulimits(opt);
    if (name == "lowerbounds") return lowerbounds(table, opt);
    if (name == "trivialbound") return trivialbound(table, opt);
    if (name == "oracle") return oracle_equivalence(table, opt);
    if (name == "constants") return constants(opt);
    if (name == "growth") return growth(table, opt);
    if (name == "all") {
        VerifyReport r{"all", {}};
        for (const auto& s : suite_names())
            if (s != "all") r.append(run(s, table, opt));
        return r;
    }
    throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace ehd::suites

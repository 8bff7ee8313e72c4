#pragma once

// Moment sums S_{t,V}(x) = sum_{n<=x} g(n) Delta_V(n, f)^{2t} and their
// fixed-window variant S*_{t,v}, with checkpoints, a deterministic parallel
// reduction, envelope exponents and a log log x growth fit.
//
// [1, x] is cut into segments at every 2^16 boundary and at every
// checkpoint. Workers claim segments from a shared counter and sum each one
// with compensated summation; segment totals are then folded in index
// order. The result therefore does not depend on the number of workers.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ehdelta/analytic.hpp"
#include "ehdelta/delta.hpp"
#include "ehdelta/report.hpp"
#include "ehdelta/sieve.hpp"

namespace ehd {

enum class MomentMode { Sup, Star };

inline const char* to_string(MomentMode m) { return m == MomentMode::Sup ? "SUP" : "STAR"; }

struct MomentSeries {
    double t = 1.0;
    double V = 1.0;  // V for SUP, the fixed window length v for STAR
    MomentMode mode = MomentMode::Sup;
    WeightFunction f;
    MultiplicativeWeight g;
    std::vector<std::uint64_t> checkpoints;
    std::vector<double> values;
    /// Set when the time cap stopped the run; values then covers only a
    /// prefix of checkpoints.
    bool truncated = false;
};

struct MomentOptions {
    unsigned threads = 1;
    std::optional<double> time_cap_seconds;
    std::uint64_t block_size = 1u << 16;
};

/// floor(10^{i/2}) for i = 0, 1, ... up to x, then x itself.
inline std::vector<std::uint64_t> default_checkpoints(std::uint64_t x) {
    std::vector<std::uint64_t> out;
    for (int i = 0;; ++i) {
        const auto c = static_cast<std::uint64_t>(std::floor(std::pow(10.0, 0.5 * i) + 1e-9));
        if (c >= x) break;
        if (out.empty() || out.back() != c) out.push_back(c);
    }
    out.push_back(x);
    return out;
}

namespace detail {

struct Segment {
    std::uint64_t lo, hi;  // n in [lo, hi]
    double sum = 0.0;
    bool done = false;
};

inline std::vector<Segment> make_segments(std::uint64_t x, const std::vector<std::uint64_t>& checkpoints,
                                          std::uint64_t block) {
    std::vector<std::uint64_t> ends;
    for (std::uint64_t b = block; b < x; b += block) ends.push_back(b);
    for (auto c : checkpoints)
        if (c >= 1 && c <= x) ends.push_back(c);
    ends.push_back(x);
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    std::vector<Segment> segs;
    std::uint64_t lo = 1;
    for (auto e : ends) {
        segs.push_back({lo, e});
        lo = e + 1;
    }
    return segs;
}

/// Compensated sum of g(n) * term(profile of n) over n in [lo, hi].
template <class Term>
double segment_sum(const Segment& s, const WeightFunction& f, const MultiplicativeWeight& g, const SpfTable& table,
                   DivisorProfile& profile, Factorization& fac, Term& term) {
    NeumaierSum acc;
    for (std::uint64_t n = s.lo; n <= s.hi; ++n) {
        if (n > 1) factorize_into(n, table, fac);
        else fac.factors.clear();
        const double gn = weight_value(g, fac);
        if (gn == 0.0) continue;
        build_profile_from(profile, n, f, fac);
        acc.add(gn * term(profile));
    }
    return acc.value();
}

template <class Term>
MomentSeries run_moments(std::uint64_t x, double t, double V, MomentMode mode, const WeightFunction& f,
                         const MultiplicativeWeight& g, const SpfTable& table,
                         std::vector<std::uint64_t> checkpoints, const MomentOptions& opt, Term term) {
    if (x < 1) throw std::invalid_argument("moments: x must be >= 1");
    if (x > table.limit() && x > 1) throw std::out_of_range("moments: x exceeds sieve limit");
    if (!(t >= 1.0)) throw std::invalid_argument("moments: t must be >= 1");
    if (!(V > 0.0)) throw std::invalid_argument("moments: V must be positive");
    if (checkpoints.empty()) checkpoints = default_checkpoints(x);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    if (checkpoints.front() < 1 || checkpoints.back() > x)
        throw std::invalid_argument("moments: checkpoints must lie in [1, x]");

    auto segs = make_segments(x, checkpoints, std::max<std::uint64_t>(1, opt.block_size));
    const auto start = std::chrono::steady_clock::now();
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        DivisorProfile profile;
        Factorization fac;
        Term local = term;
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            if (opt.time_cap_seconds) {
                const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
                if (el.count() > *opt.time_cap_seconds) {
                    stop = true;
                    return;
                }
            }
            const std::size_t k = next.fetch_add(1);
            if (k >= segs.size()) return;
            segs[k].sum = segment_sum(segs[k], f, g, table, profile, fac, local);
            segs[k].done = true;
        }
    };
    const unsigned nt = std::max(1u, opt.threads);
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    MomentSeries out;
    out.t = t;
    out.V = V;
    out.mode = mode;
    out.f = f;
    out.g = g;
    NeumaierSum acc;
    std::size_t ci = 0;
    for (const auto& s : segs) {
        if (!s.done) {
            out.truncated = true;
            break;
        }
        acc.add(s.sum);
        while (ci < checkpoints.size() && checkpoints[ci] == s.hi) {
            out.checkpoints.push_back(checkpoints[ci]);
            out.values.push_back(acc.value());
            ++ci;
        }
    }
    return out;
}

inline double power_t(double squared, double t) { return t == 1.0 ? squared : std::pow(squared, t); }

}  // namespace detail

/// S_{t,V}(x, f, g) at every checkpoint.
inline MomentSeries moment_sum(std::uint64_t x, double t, double V, const WeightFunction& f,
                               const MultiplicativeWeight& g, const SpfTable& table,
                               std::vector<std::uint64_t> checkpoints = {}, const MomentOptions& opt = {}) {
    auto term = [t, V](const DivisorProfile& p) { return detail::power_t(delta_sup(p, V).squared, t); };
    return detail::run_moments(x, t, V, MomentMode::Sup, f, g, table, std::move(checkpoints), opt, term);
}

/// S*_{t,v}(x, f, g) at every checkpoint.
inline MomentSeries moment_sum_star(std::uint64_t x, double t, double v, const WeightFunction& f,
                                    const MultiplicativeWeight& g, const SpfTable& table,
                                    std::vector<std::uint64_t> checkpoints = {}, const MomentOptions& opt = {}) {
    auto term = [t, v](const DivisorProfile& p) { return detail::power_t(delta_star(p, v).squared, t); };
    return detail::run_moments(x, t, v, MomentMode::Star, f, g, table, std::move(checkpoints), opt, term);
}

inline double final_value(const MomentSeries& s) {
    if (s.values.empty() || s.truncated) throw std::runtime_error("moment series is truncated");
    return s.values.back();
}

/// S_{t,V}(x) <= (floor(V) + 1)^{2t} S_{t,1}(x).
inline VerifyEntry trivial_bound_check(std::uint64_t x, double t, double V, const WeightFunction& f,
                                       const MultiplicativeWeight& g, const SpfTable& table,
                                       const MomentOptions& opt = {}) {
    if (!(V >= 1.0)) throw std::invalid_argument("trivial_bound_check: V must be >= 1");
    const double lhs = final_value(moment_sum(x, t, V, f, g, table, {x}, opt));
    const double s1 = final_value(moment_sum(x, t, 1.0, f, g, table, {x}, opt));
    const double rhs = std::pow(std::floor(V) + 1.0, 2.0 * t) * s1;
    return check_le("trivial_bound", lhs, rhs, 1e-9,
                    "x=" + std::to_string(x) + " t=" + detail::fmt_num(t) + " V=" + detail::fmt_num(V) + " f=" +
                        f.label() + " g=" + g.label());
}

/// S_{t,V}(x) >= sum_{n<=x} mu^2(n) y^omega(n), from Delta_V >= |f(1)| = 1.
/// The floor is summed with the same segmentation and fold as the series.
inline VerifyEntry lower_floor_check(const MomentSeries& series, const SpfTable& table) {
    if (series.g.family != WeightFamily::Mu2YOmega)
        throw std::invalid_argument("lower_floor_check: g must be mu^2 y^omega");
    const std::uint64_t x = series.checkpoints.back();
    auto one = [](const DivisorProfile&) { return 1.0; };
    const auto floor = detail::run_moments(x, series.t, series.V, series.mode, WeightFunction::unit(), series.g,
                                           table, {x}, {}, one);
    return check_le("lower_floor", final_value(floor), final_value(series), 0.0,
                    "x=" + std::to_string(x) + " t=" + detail::fmt_num(series.t) + " V=" +
                        detail::fmt_num(series.V) + " f=" + series.f.label() + " g=" + series.g.label());
}

/// Pointwise Delta_V(n, chi) >= h_chi(n) tau(n) V / (1 + log n) over
/// squarefree n <= x. The entry carries the worst shortfall bound - Delta
/// (<= 0 when every n satisfies the bound) and `implied` the lower bound
/// it gives for S_{t,V}(x, chi, mu^2 y^omega).
struct HchiFloorResult {
    VerifyEntry entry;
    std::uint64_t violations = 0;
    double implied = 0.0;
    double series_value = 0.0;
    /// Worst h tau V / (V + log n) - Delta and its violation count: the
    /// pigeonhole form, which holds for every V.
    double pigeonhole_worst = 0.0;
    std::uint64_t pigeonhole_violations = 0;
};

inline HchiFloorResult hchi_floor_check(std::uint64_t x, double t, double V, const DirichletCharacter& chi,
                                        double y, const SpfTable& table) {
    if (x < 1 || x > table.limit()) throw std::out_of_range("hchi_floor_check: x outside sieve");
    if (x >= 3 && !(V <= std::log(static_cast<double>(x))))
        throw std::invalid_argument("hchi_floor_check: need V <= log x");
    const auto f = WeightFunction::character(chi);
    const auto g = MultiplicativeWeight::mu2_y_omega(y);
    HchiFloorResult out;
    DivisorProfile profile;
    Factorization fac;
    detail::NeumaierSum implied, series;
    double worst = -std::numeric_limits<double>::infinity();
    std::uint64_t worst_n = 1;
    for (std::uint64_t n = 1; n <= x; ++n) {
        if (n > 1) factorize_into(n, table, fac);
        else fac.factors.clear();
        if (!fac.squarefree()) continue;
        bool h = true;
        for (const auto& pp : fac.factors) h = h && h_chi_at_prime(chi, pp.prime);
        build_profile_from(profile, n, f, fac);
        const double delta = delta_sup(profile, V).value;
        const double bound = h ? static_cast<double>(fac.tau()) * V / (1.0 + std::log(static_cast<double>(n))) : 0.0;
        const double gap = bound - delta;
        if (gap > worst) {
            worst = gap;
            worst_n = n;
        }
        if (gap > 1e-9) ++out.violations;
        const double ph = h ? static_cast<double>(fac.tau()) * V / (V + std::log(static_cast<double>(n))) : 0.0;
        if (n == 1 || ph - delta > out.pigeonhole_worst) out.pigeonhole_worst = ph - delta;
        if (ph - delta > 1e-9) ++out.pigeonhole_violations;
        const double gn = std::pow(y, static_cast<double>(fac.omega()));
        implied.add(gn * std::pow(std::max(1.0, bound), 2.0 * t));
        series.add(gn * std::pow(delta, 2.0 * t));
    }
    out.entry = check_le("hchi_floor", worst, 0.0, 1e-9,
                         "x=" + std::to_string(x) + " V=" + detail::fmt_num(V) + " chi=" + chi.label() +
                             " worst_n=" + std::to_string(worst_n) + " violations=" + std::to_string(out.violations));
    out.implied = implied.value();
    out.series_value = series.value();
    return out;
}

enum class EnvelopeFamily { Char, Mu };

struct EnvelopeReport {
    double upper_exponent = 0.0;
    /// y - 1; 2^t y - t - 1 (with U^t); 2^{2t} y / r - 2t - 1 (with U^{2t}, NaN for MU).
    std::array<double, 3> lower_exponents{};
    double U = 0.0;
    double fitted_slope = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();
};

inline EnvelopeReport envelope(double x, double t, double V, double y, std::uint32_t r, EnvelopeFamily family) {
    if (!(x > 1.0)) throw std::invalid_argument("envelope: x must exceed 1");
    EnvelopeReport e;
    const double growth = family == EnvelopeFamily::Char ? std::exp2(2.0 * t - 1.0) : lambda_gamma(t);
    e.upper_exponent = y - 1.0 + std::max(0.0, growth * y - y - t);
    e.lower_exponents[0] = y - 1.0;
    e.lower_exponents[1] = std::exp2(t) * y - t - 1.0;
    e.lower_exponents[2] = family == EnvelopeFamily::Char ? std::exp2(2.0 * t) * y / r - 2.0 * t - 1.0
                                                          : std::numeric_limits<double>::quiet_NaN();
    e.U = std::min(V, std::log(x));
    return e;
}

struct GrowthFit {
    double slope;
    double residual;
};

/// Least squares a log log x + b against log(S / x) over checkpoints with
/// x >= 3 and S > 0.
inline GrowthFit growth_fit(const std::vector<std::uint64_t>& xs, const std::vector<double>& values) {
    std::vector<double> X, Y;
    for (std::size_t i = 0; i < xs.size() && i < values.size(); ++i) {
        if (xs[i] < 3 || !(values[i] > 0.0)) continue;
        const double x = static_cast<double>(xs[i]);
        X.push_back(std::log(std::log(x)));
        Y.push_back(std::log(values[i] / x));
    }
    if (X.size() < 4) throw std::invalid_argument("growth_fit: need at least 4 usable checkpoints");
    const double m = static_cast<double>(X.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        mx += X[i];
        my += Y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("growth_fit: degenerate checkpoint grid");
    const double a = sxy / sxx;
    const double b = my - a * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) ss += (Y[i] - a * X[i] - b) * (Y[i] - a * X[i] - b);
    return {a, std::sqrt(ss / m)};
}

inline GrowthFit growth_fit(const MomentSeries& s) { return growth_fit(s.checkpoints, s.values); }

/// The y and r the envelope should use for a series: y is the g-weight of a
/// prime (1/r for h_chi), r the order of f.
inline EnvelopeReport series_envelope(const MomentSeries& s) {
    const std::uint32_t r = s.f.order();
    double y = 1.0;
    switch (s.g.family) {
        case WeightFamily::Unit: y = 1.0; break;
        case WeightFamily::YOmega:
        case WeightFamily::Mu2YOmega: y = s.g.y; break;
        case WeightFamily::HChi: y = 1.0 / s.g.chi->order(); break;
    }
    const auto family = s.f.kind == WeightKind::Moebius ? EnvelopeFamily::Mu : EnvelopeFamily::Char;
    const double x = s.checkpoints.empty() ? 2.0 : std::max(2.0, static_cast<double>(s.checkpoints.back()));
    auto e = envelope(x, s.t, s.V, y, r, family);
    try {
        const auto fit = growth_fit(s);
        e.fitted_slope = fit.slope;
        e.fit_residual = fit.residual;
    } catch (const std::invalid_argument&) {
    }
    return e;
}

// ------------------------------------------------------------------ output

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string series_csv(const MomentSeries& s) {
    std::string hint;
    try {
        hint = format_g17(growth_fit(s).slope);
    } catch (const std::invalid_argument&) {
    }
    std::string out = "x,S,t,V,mode,f,g,slope_hint\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out += std::to_string(s.checkpoints[i]) + "," + format_g17(s.values[i]) + "," + format_g17(s.t) + "," +
               format_g17(s.V) + "," + to_string(s.mode) + "," + s.f.label() + "," + s.g.label() + "," + hint + "\n";
    }
    return out;
}

inline nlohmann::json to_json(const EnvelopeReport& e) {
    return {{"upper_exponent", json_number(e.upper_exponent)},
            {"lower_exponents",
             {json_number(e.lower_exponents[0]), json_number(e.lower_exponents[1]),
              json_number(e.lower_exponents[2])}},
            {"U", json_number(e.U)},
            {"fitted_slope", json_number(e.fitted_slope)},
            {"fit_residual", json_number(e.fit_residual)}};
}

inline nlohmann::json to_json(const MomentSeries& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < s.values.size(); ++i) rows.push_back({{"x", s.checkpoints[i]}, {"S", s.values[i]}});
    return {{"t", s.t},
            {"V", s.V},
            {"mode", to_string(s.mode)},
            {"f", s.f.label()},
            {"g", s.g.label()},
            {"truncated", s.truncated},
            {"series", std::move(rows)},
            {"envelope", to_json(series_envelope(s))}};
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string());
        os << content;
        if (!os.flush()) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ehd

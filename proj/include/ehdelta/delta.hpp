#pragma once

// Exact window sums over the divisors of n.
//
// A window (e^u, e^{u+v}] captures a contiguous run of the sorted divisors,
// so every quantity here reduces to finitely many runs:
//  * Delta_V(n,f) is the largest |sum| over runs whose log-spread is
//    strictly below V (a run of spread exactly V fits no half-open window
//    of length <= V);
//  * Delta*_v(n,f) and the u-integrals are piecewise constant in u with
//    breakpoints at log d and log d - v.
// Run sums are assembled from integer per-class counts, so |sum|^2 is
// computed without cancellation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ehdelta/characters.hpp"
#include "ehdelta/report.hpp"
#include "ehdelta/sieve.hpp"

namespace ehd {

enum class WeightKind { Unit, Moebius, Character };

/// The divisor coefficient f(d) of the window sums.
struct WeightFunction {
    WeightKind kind = WeightKind::Unit;
    std::optional<DirichletCharacter> chi;

    static WeightFunction unit() { return {}; }
    static WeightFunction moebius() { return {WeightKind::Moebius, std::nullopt}; }
    static WeightFunction character(DirichletCharacter c) { return {WeightKind::Character, std::move(c)}; }

    std::uint32_t order() const {
        switch (kind) {
            case WeightKind::Unit: return 1;
            case WeightKind::Moebius: return 2;
            case WeightKind::Character: return chi->order();
        }
        return 1;
    }

    std::string label() const {
        switch (kind) {
            case WeightKind::Unit: return "unit";
            case WeightKind::Moebius: return "mu";
            case WeightKind::Character: return chi->label();
        }
        return "?";
    }

    /// f(p^e) as an exponent class.
    UnityExponent prime_power(std::uint64_t p, unsigned e) const {
        switch (kind) {
            case WeightKind::Unit: return UnityExponent(0);
            case WeightKind::Moebius:
                if (e == 0) return UnityExponent(0);
                return e == 1 ? UnityExponent(1) : UnityExponent::none();
            case WeightKind::Character: {
                if (e == 0) return UnityExponent(0);
                const auto base = chi->evaluate(p);
                if (base.is_none()) return base;
                return UnityExponent(static_cast<std::uint32_t>(
                    (static_cast<std::uint64_t>(base.value()) * e) % chi->order()));
            }
        }
        return UnityExponent::none();
    }
};

/// Sorted divisors of n with their logs, coefficient classes and per-class
/// prefix counts.
class DivisorProfile {
public:
    std::uint64_t n() const { return n_; }
    std::uint32_t order() const { return r_; }
    std::size_t size() const { return divisors_.size(); }
    const std::vector<std::uint64_t>& divisors() const { return divisors_; }
    const std::vector<double>& logs() const { return logs_; }
    const std::vector<UnityExponent>& coeffs() const { return coeffs_; }

    /// Number of divisors with index < i in class k.
    std::int32_t prefix(std::size_t i, std::uint32_t k) const { return prefix_[i * r_ + k]; }

    /// Per-class counts of the run [i, j], written to `out` (size r).
    void run_counts(std::size_t i, std::size_t j, std::int64_t* out) const {
        const std::int32_t* hi = &prefix_[(j + 1) * r_];
        const std::int32_t* lo = &prefix_[i * r_];
        for (std::uint32_t k = 0; k < r_; ++k) out[k] = hi[k] - lo[k];
    }

    /// |sum of f(d) over the run [i, j]|^2.
    double run_norm2(std::size_t i, std::size_t j) const {
        const std::int32_t* hi = &prefix_[(j + 1) * r_];
        const std::int32_t* lo = &prefix_[i * r_];
        switch (r_) {
            case 1: {
                const double c = hi[0] - lo[0];
                return c * c;
            }
            case 2: {
                const double c = (hi[0] - lo[0]) - (hi[1] - lo[1]);
                return c * c;
            }
            case 4: {
                const double a = (hi[0] - lo[0]) - (hi[2] - lo[2]);
                const double b = (hi[1] - lo[1]) - (hi[3] - lo[3]);
                return a * a + b * b;
            }
            default: break;
        }
        std::int64_t stack[16];
        std::vector<std::int64_t> heap;
        std::int64_t* c = stack;
        if (r_ > 16) {
            heap.resize(r_);
            c = heap.data();
        }
        for (std::uint32_t k = 0; k < r_; ++k) c[k] = hi[k] - lo[k];
        return norm2_from_counts(c);
    }

    /// |sum_k c_k zeta_r^k|^2 = sum_{a,b} c_a c_b cos(2 pi (a-b)/r).
    double norm2_from_counts(const std::int64_t* c) const {
        switch (r_) {
            case 1: return static_cast<double>(c[0] * c[0]);
            case 2: {
                const std::int64_t s = c[0] - c[1];
                return static_cast<double>(s * s);
            }
            case 3: {
                const std::int64_t s = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] - c[0] * c[1] - c[1] * c[2] -
                                       c[0] * c[2];
                return static_cast<double>(s);
            }
            case 4: {
                const std::int64_t a = c[0] - c[2], b = c[1] - c[3];
                return static_cast<double>(a * a + b * b);
            }
            case 6: {
                // zeta_6^2 = zeta_6 - 1, |x + y zeta_6|^2 = x^2 + xy + y^2.
                const std::int64_t a = c[0] - c[3], b = c[1] - c[4], d = c[2] - c[5];
                const std::int64_t x = a - d, y = b + d;
                return static_cast<double>(x * x + x * y + y * y);
            }
            default: break;
        }
        double total = 0.0;
        for (std::uint32_t d = 0; d < r_; ++d) {
            std::int64_t acc = 0;
            for (std::uint32_t a = 0; a < r_; ++a) acc += c[a] * c[(a + d) % r_];
            total += cos_[d] * static_cast<double>(acc);
        }
        return std::max(0.0, total);
    }

    friend void build_profile_from(DivisorProfile&, std::uint64_t, const WeightFunction&, const Factorization&);

private:
    std::uint64_t n_ = 1;
    std::uint32_t r_ = 1;
    std::vector<std::uint64_t> divisors_;
    std::vector<double> logs_;
    std::vector<UnityExponent> coeffs_;
    std::vector<std::int32_t> prefix_;
    std::vector<double> cos_;
    std::vector<std::pair<std::uint64_t, UnityExponent>> scratch_;
};

/// Rebuilds `profile` for n from its factorization, reusing storage.
inline void build_profile_from(DivisorProfile& profile, std::uint64_t n, const WeightFunction& f,
                               const Factorization& fac) {
    if (n < 1) throw std::out_of_range("build_profile: n must be >= 1");
    const std::uint32_t r = f.order();
    auto& items = profile.scratch_;
    items.clear();
    items.emplace_back(1, UnityExponent(0));
    for (const auto& [p, a] : fac.factors) {
        const std::size_t base = items.size();
        std::uint64_t pe = 1;
        for (unsigned e = 1; e <= a; ++e) {
            pe *= p;
            const UnityExponent c = f.prime_power(p, e);
            for (std::size_t i = 0; i < base; ++i)
                items.emplace_back(items[i].first * pe, UnityExponent::multiply(items[i].second, c, r));
        }
    }
    std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    const std::size_t tau = items.size();
    profile.n_ = n;
    profile.r_ = r;
    profile.divisors_.resize(tau);
    profile.logs_.resize(tau);
    profile.coeffs_.resize(tau);
    profile.prefix_.assign((tau + 1) * r, 0);
    for (std::size_t i = 0; i < tau; ++i) {
        profile.divisors_[i] = items[i].first;
        profile.logs_[i] = std::log(static_cast<double>(items[i].first));
        profile.coeffs_[i] = items[i].second;
        std::int32_t* row = &profile.prefix_[(i + 1) * r];
        const std::int32_t* prev = &profile.prefix_[i * r];
        for (std::uint32_t k = 0; k < r; ++k) row[k] = prev[k];
        if (!items[i].second.is_none()) ++row[items[i].second.value()];
    }
    if (profile.cos_.size() != r) {
        profile.cos_.resize(r);
        for (std::uint32_t d = 0; d < r; ++d)
            profile.cos_[d] = std::cos(2.0 * std::numbers::pi * static_cast<double>(d) / static_cast<double>(r));
    }
}

/// Factorizes n into `fac` and rebuilds `profile`.
inline void build_profile_into(DivisorProfile& profile, std::uint64_t n, const WeightFunction& f,
                               const SpfTable& table, Factorization& fac) {
    if (n < 1) throw std::out_of_range("build_profile: n must be >= 1");
    if (n > 1) factorize_into(n, table, fac);
    else fac.factors.clear();
    build_profile_from(profile, n, f, fac);
}

inline DivisorProfile build_profile(std::uint64_t n, const WeightFunction& f, const SpfTable& table) {
    DivisorProfile p;
    Factorization fac;
    build_profile_into(p, n, f, table, fac);
    return p;
}

/// Delta(n, f, u, v): sum of f(d) over divisors with u < log d <= u + v.
inline std::complex<double> window_sum(const DivisorProfile& profile, double u, double v) {
    std::complex<double> s{0.0, 0.0};
    const auto& logs = profile.logs();
    for (std::size_t k = 0; k < logs.size(); ++k)
        if (u < logs[k] && logs[k] <= u + v) s += as_complex(profile.coeffs()[k], profile.order());
    return s;
}

/// Attained |window sum| together with the run [i, j] and a window (u, v)
/// that captures exactly that run.
struct RunWitness {
    double value = 0.0;
    double squared = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> run;
    double u = 0.0;
    double v = 0.0;
};

/// Delta_V(n, f).
inline RunWitness delta_sup(const DivisorProfile& profile, double V) {
    if (!(V > 0.0)) throw std::invalid_argument("delta_sup: V must be positive");
    const auto& logs = profile.logs();
    const std::size_t tau = logs.size();
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < tau; ++i) {
        for (std::size_t j = i; j < tau && logs[j] - logs[i] < V; ++j) {
            const double s = profile.run_norm2(i, j);
            if (s > best) {
                best = s;
                bi = i;
                bj = j;
            }
        }
    }
    RunWitness w;
    w.squared = best;
    w.value = std::sqrt(best);
    w.run = std::make_pair(bi, bj);
    // u strictly inside [max(prev, log d_j - V), log d_i); upper end strictly
    // between log d_j and the next divisor.
    const double prev = bi > 0 ? logs[bi - 1] : logs[bi] - V;
    const double u_low = std::max(prev, logs[bj] - V);
    w.u = 0.5 * (u_low + logs[bi]);
    const double next = bj + 1 < tau ? logs[bj + 1] : logs[bj] + V;
    w.v = std::min(V, 0.5 * (logs[bj] + next) - w.u);
    return w;
}

namespace detail {

/// Calls visit(u_begin, u_end, lo, hi) for each maximal u-interval on which
/// the window (u, u+v] captures the constant run [lo, hi) (possibly empty).
/// Intervals are [e_m, e_{m+1}) over the sorted breakpoints; the unbounded
/// ends capture nothing and are skipped.
template <class Visit>
void sweep_windows(const std::vector<double>& logs, double v, Visit&& visit) {
    const std::size_t tau = logs.size();
    std::vector<double> enter(tau);  // d_k captured once u >= log d_k - v
    for (std::size_t k = 0; k < tau; ++k) enter[k] = logs[k] - v;
    std::size_t pa = 0, pb = 0;  // #{k: logs[k] <= u}, #{k: enter[k] <= u}
    while (pa < tau || pb < tau) {
        double e = std::numeric_limits<double>::infinity();
        if (pa < tau) e = std::min(e, logs[pa]);
        if (pb < tau) e = std::min(e, enter[pb]);
        while (pa < tau && logs[pa] <= e) ++pa;
        while (pb < tau && enter[pb] <= e) ++pb;
        double next = std::numeric_limits<double>::infinity();
        if (pa < tau) next = std::min(next, logs[pa]);
        if (pb < tau) next = std::min(next, enter[pb]);
        if (!std::isfinite(next)) break;  // [e, inf) captures nothing
        visit(e, next, pa, pb);
    }
}

}  // namespace detail

/// Delta*_v(n, f): sup over u at fixed window length v.
inline RunWitness delta_star(const DivisorProfile& profile, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("delta_star: v must be positive");
    RunWitness w;
    w.squared = 0.0;
    w.v = v;
    bool found = false;
    detail::sweep_windows(profile.logs(), v, [&](double a, double b, std::size_t lo, std::size_t hi) {
        if (hi <= lo) return;
        const double s = profile.run_norm2(lo, hi - 1);
        if (!found || s > w.squared) {
            found = true;
            w.squared = s;
            w.run = std::make_pair(lo, hi - 1);
            w.u = 0.5 * (a + b);
        }
    });
    w.value = std::sqrt(w.squared);
    return w;
}

struct GapInfo {
    double E = std::numeric_limits<double>::infinity();
    double Estar = 1.0;
};

/// E(n) = min log(d'/d) over divisors d < d'; attained on consecutive ones.
inline GapInfo gap_info(const DivisorProfile& profile) {
    GapInfo g;
    const auto& logs = profile.logs();
    for (std::size_t k = 1; k < logs.size(); ++k) g.E = std::min(g.E, logs[k] - logs[k - 1]);
    g.Estar = std::min(1.0, g.E);
    return g;
}

enum class IntegralKind { MStarQV, M2V, NJQV, TauStar, PlancherelRhs, ILower };

struct IntegralResult {
    IntegralKind kind;
    double value = 0.0;
    bool exact = false;
    double error_bound = 0.0;
};

namespace detail {

struct NeumaierSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace detail

/// M*_{q,v}(n, f), the integral over u of |Delta(n, f, u, v)|^q.
inline IntegralResult m_star(const DivisorProfile& profile, double q, double v) {
    if (!(q >= 1.0)) throw std::invalid_argument("m_star: q must be >= 1");
    if (!(v > 0.0)) throw std::invalid_argument("m_star: v must be positive");
    detail::NeumaierSum acc;
    detail::sweep_windows(profile.logs(), v, [&](double a, double b, std::size_t lo, std::size_t hi) {
        if (hi <= lo) return;
        const double s = profile.run_norm2(lo, hi - 1);
        if (s == 0.0) return;
        acc.add((b - a) * (q == 2.0 ? s : std::pow(s, 0.5 * q)));
    });
    return {IntegralKind::MStarQV, acc.value(), true, 0.0};
}

/// M_{2,V}(n, f) = integral over v in [0, V] of M*_{2,v}. M*_{2,v} is
/// piecewise linear in v with kinks at the pairwise log-differences, so the
/// trapezoid rule on those breakpoints is exact.
inline IntegralResult m_2V(const DivisorProfile& profile, double V) {
    if (!(V > 0.0)) throw std::invalid_argument("m_2V: V must be positive");
    const auto& logs = profile.logs();
    std::vector<double> knots{0.0, V};
    for (std::size_t a = 0; a < logs.size(); ++a) {
        if (profile.coeffs()[a].is_none()) continue;
        for (std::size_t b = a + 1; b < logs.size() && logs[b] - logs[a] < V; ++b)
            if (!profile.coeffs()[b].is_none()) knots.push_back(logs[b] - logs[a]);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    detail::NeumaierSum acc;
    double prev_v = 0.0, prev_m = 0.0;
    for (double k : knots) {
        if (k <= 0.0) continue;
        const double m = m_star(profile, 2.0, k).value;
        acc.add(0.5 * (k - prev_v) * (m + prev_m));
        prev_v = k;
        prev_m = m;
    }
    return {IntegralKind::M2V, acc.value(), true, 0.0};
}

/// N_{j,q,v}(n, w) = integral over u of |Delta(u, v)|^j |Delta(u - w, v)|^(q - j).
/// A factor with exponent 0 is taken as 1; the integrand vanishes where
/// neither window captures a divisor.
inline IntegralResult n_cross(const DivisorProfile& profile, int j, int q, double v, double w) {
    if (j < 0 || j > q) throw std::invalid_argument("n_cross: need 0 <= j <= q");
    if (!(v > 0.0)) throw std::invalid_argument("n_cross: v must be positive");
    const auto& logs = profile.logs();
    const std::size_t tau = logs.size();
    std::vector<double> enter(tau);
    for (std::size_t k = 0; k < tau; ++k) enter[k] = logs[k] - v;
    std::vector<double> pts;
    pts.reserve(4 * tau);
    for (std::size_t k = 0; k < tau; ++k) {
        pts.push_back(logs[k]);
        pts.push_back(enter[k]);
        pts.push_back(logs[k] + w);
        pts.push_back(enter[k] + w);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto run_at = [&](double u) {
        const auto lo = static_cast<std::size_t>(std::upper_bound(logs.begin(), logs.end(), u) - logs.begin());
        const auto hi = static_cast<std::size_t>(std::upper_bound(enter.begin(), enter.end(), u) - enter.begin());
        return std::make_pair(lo, hi);
    };
    auto factor = [&](std::pair<std::size_t, std::size_t> run, int e) {
        if (e == 0) return 1.0;
        if (run.second <= run.first) return 0.0;
        const double s = profile.run_norm2(run.first, run.second - 1);
        return e == 2 ? s : std::pow(s, 0.5 * e);
    };
    detail::NeumaierSum acc;
    for (std::size_t m = 0; m + 1 < pts.size(); ++m) {
        const double mid = 0.5 * (pts[m] + pts[m + 1]);
        const auto r1 = run_at(mid);
        const auto r2 = run_at(mid - w);
        if (r1.second <= r1.first && r2.second <= r2.first) continue;
        const double val = factor(r1, j) * factor(r2, q - j);
        if (val != 0.0) acc.add((pts[m + 1] - pts[m]) * val);
    }
    return {IntegralKind::NJQV, acc.value(), true, 0.0};
}

namespace detail {
inline std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace detail

/// Delta_V <= V^(1-l) Delta*_{V^l} + Delta_{V^l}.
inline VerifyEntry split_bound_check(const DivisorProfile& profile, double V, double ell) {
    if (!(V >= 1.0)) throw std::invalid_argument("split_bound_check: V must be >= 1");
    if (!(ell >= 0.0 && ell <= 1.0)) throw std::invalid_argument("split_bound_check: l must lie in [0, 1]");
    const double lhs = delta_sup(profile, V).value;
    const double Vl = std::pow(V, ell);
    const double rhs = std::pow(V, 1.0 - ell) * delta_star(profile, Vl).value + delta_sup(profile, Vl).value;
    return check_le("split", lhs, rhs, 1e-9,
                    "n=" + std::to_string(profile.n()) + " V=" + detail::fmt_num(V) + " l=" + detail::fmt_num(ell));
}

/// Delta*_v^2 <= 2^5 + 2^(3+2/q) E*^(-2/q) M*_{2q,v}^(1/q).
inline VerifyEntry lemma31_check(const DivisorProfile& profile, int q, double v) {
    if (q < 1) throw std::invalid_argument("lemma31_check: q must be >= 1");
    if (!(v >= 1.0)) throw std::invalid_argument("lemma31_check: v must be >= 1");
    const double qd = q;
    const double lhs = delta_star(profile, v).squared;
    const double es = gap_info(profile).Estar;
    const double m = m_star(profile, 2.0 * qd, v).value;
    const double rhs = 32.0 + std::pow(2.0, 3.0 + 2.0 / qd) * std::pow(es, -2.0 / qd) * std::pow(m, 1.0 / qd);
    return check_le("lemma31", lhs, rhs, 1e-9,
                    "n=" + std::to_string(profile.n()) + " q=" + std::to_string(q) + " v=" + detail::fmt_num(v));
}

}  // namespace ehd

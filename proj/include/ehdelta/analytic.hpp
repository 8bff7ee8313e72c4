#pragma once

// Closed-form constants, the twisted divisor sum tau(n, chi, theta) and the
// theta-integrals built from it, and diagnostic prime sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "ehdelta/delta.hpp"
#include "ehdelta/quadrature.hpp"
#include "ehdelta/report.hpp"
#include "ehdelta/sieve.hpp"

namespace ehd {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------- constants

/// lambda(t) = 2^{2t} Gamma(t + 1/2) / (sqrt(pi) Gamma(t + 1)).
inline double lambda_gamma(double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("lambda: t must be >= 1");
    return std::exp2(2.0 * t) * boost::math::tgamma_delta_ratio(t + 0.5, 0.5) / std::sqrt(std::numbers::pi);
}

/// lambda(t) from its defining integral (1/2pi) int |1 + e^{i theta}|^{2t}.
inline QuadratureResult lambda_integral(double t, const QuadratureSpec& spec = {}) {
    if (!(t >= 1.0)) throw std::invalid_argument("lambda: t must be >= 1");
    // |1 + e^{i theta}|^2 = 4 cos^2(theta/2); symmetric, so integrate over [0, pi].
    auto r = integrate_smooth(
        [t](double th) {
            const double c = std::cos(0.5 * th);
            return std::pow(4.0 * c * c, t);
        },
        0.0, std::numbers::pi, 16, spec);
    r.value /= std::numbers::pi;
    r.error /= std::numbers::pi;
    return r;
}

inline BigInt binomial(unsigned n, unsigned k) {
    BigInt c = 1;
    for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

/// sum_k C(t,k)^2, exact.
inline BigInt lambda_binom(unsigned t) {
    if (t < 1) throw std::invalid_argument("lambda_binom: t must be >= 1");
    BigInt s = 0;
    BigInt c = 1;
    for (unsigned k = 0; k <= t; ++k) {
        s += c * c;
        c = c * (t - k) / (k + 1);
    }
    return s;
}

/// |1 + zeta_r^k|^2 = 2 + 2 cos(2 pi k / r), exact on quarter turns.
inline double one_plus_root_norm2(std::uint32_t k, std::uint32_t r) {
    const auto z = as_complex(UnityExponent(k % r), r);
    return 2.0 + 2.0 * z.real();
}

/// beta_g(r, t) = 2^{1-2t} sum_k z_k |1 + zeta^k|^{2t}.
inline double beta_g(const ClassWeights& w, double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("beta_g: t must be >= 1");
    double s = 0.0;
    for (std::uint32_t k = 0; k < w.r; ++k) s += w.z[k] * std::pow(one_plus_root_norm2(k, w.r), t);
    return s / std::exp2(2.0 * t - 1.0);
}

/// beta for g = y^omega with uniform class weights, as the exact double sum
/// (y / 2^{2t-1}) sum over j, k <= t with r | k - j of C(t,k) C(t,j).
inline Rational beta_yomega_exact(unsigned r, unsigned t, const Rational& y) {
    if (t < 1 || r < 2) throw std::invalid_argument("beta_yomega: need t >= 1, r >= 2");
    BigInt s = 0;
    for (unsigned k = 0; k <= t; ++k)
        for (unsigned j = 0; j <= t; ++j)
            if ((k > j ? k - j : j - k) % r == 0) s += binomial(t, k) * binomial(t, j);
    return y * Rational(s) / Rational(BigInt(1) << (2 * t - 1));
}

inline double beta_yomega(unsigned r, unsigned t, double y) {
    return static_cast<double>(beta_yomega_exact(r, t, Rational(1))) * y;
}

struct Thresholds {
    double y0;
    double y1;
};

inline Thresholds thresholds(double t) {
    if (!(t >= 1.0)) throw std::invalid_argument("thresholds: t must be >= 1");
    return {t / (std::exp2(2.0 * t - 1.0) - 1.0), t / (lambda_gamma(t) - 1.0)};
}

/// exp(sqrt(log log x * log log log x)).
/// The same factor given log log x, for x beyond double range.
inline double script_L_from_loglog(double l2) {
    const double l3 = std::log(l2);
    if (!(l3 > 0.0)) throw std::invalid_argument("script_L: log log log x must be positive");
    return std::exp(std::sqrt(l2 * l3));
}

inline double script_L(double x) {
    if (!(x >= 16.0)) throw std::invalid_argument("script_L: x must be >= 16");
    return script_L_from_loglog(std::log(std::log(x)));
}

struct ConstantBundle {
    double t;
    double lambda;
    double y0;
    double y1;
    double betag;
    double scriptL;
};

inline ConstantBundle constant_bundle(double t, const ClassWeights& w, double x) {
    const auto th = thresholds(t);
    return {t, lambda_gamma(t), th.y0, th.y1, beta_g(w, t), x >= 16.0 ? script_L(x) : 0.0};
}

/// u_0 = 2, u_{k+1} = 2 u_k / (1 + u_k).
inline std::vector<Rational> u_sequence(unsigned steps) {
    std::vector<Rational> u{Rational(2)};
    for (unsigned k = 0; k < steps; ++k) u.push_back(2 * u.back() / (1 + u.back()));
    return u;
}

// ------------------------------------------------------------ tau integrals

namespace detail {

/// The nonzero terms of tau(n, chi, theta) = sum_d f(d) d^{i theta}.
struct TauTerms {
    std::vector<double> logs;
    std::vector<std::complex<double>> coeffs;
    double diag = 0.0;          // sum |f(d)|^2
    double inverse_gaps = 0.0;  // sum over pairs of 1 / |log d - log d'|
    double max_log = 0.0;

    explicit TauTerms(const DivisorProfile& p) {
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p.coeffs()[k].is_none()) continue;
            logs.push_back(p.logs()[k]);
            coeffs.push_back(as_complex(p.coeffs()[k], p.order()));
        }
        diag = static_cast<double>(logs.size());
        for (std::size_t a = 0; a < logs.size(); ++a)
            for (std::size_t b = a + 1; b < logs.size(); ++b) inverse_gaps += 1.0 / (logs[b] - logs[a]);
        max_log = logs.empty() ? 0.0 : logs.back();
    }

    std::size_t size() const { return logs.size(); }

    /// |tau(theta)|^2 and |tau(-theta)|^2 from one set of sincos calls.
    std::pair<double, double> norms(double theta) const {
        std::complex<double> plus{0.0, 0.0}, minus{0.0, 0.0};
        for (std::size_t k = 0; k < logs.size(); ++k) {
            const double c = std::cos(theta * logs[k]);
            const double s = std::sin(theta * logs[k]);
            plus += coeffs[k] * std::complex<double>(c, s);
            minus += coeffs[k] * std::complex<double>(c, -s);
        }
        return {std::norm(plus), std::norm(minus)};
    }
};

inline constexpr double kRoundingFactor = 64.0 * std::numeric_limits<double>::epsilon();

}  // namespace detail

/// tau(n, chi, theta).
inline std::complex<double> tau_char(const DivisorProfile& profile, double theta) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (profile.coeffs()[k].is_none()) continue;
        s += as_complex(profile.coeffs()[k], profile.order()) * std::polar(1.0, theta * profile.logs()[k]);
    }
    return s;
}

/// tau(n, chi, -theta) e^{i v theta / 2} sin(v theta / 2) / (theta / 2).
inline std::complex<double> window_transform(const DivisorProfile& profile, double v, double theta) {
    if (!(v > 0.0)) throw std::invalid_argument("window_transform: v must be positive");
    if (theta == 0.0) return v * tau_char(profile, 0.0);
    return tau_char(profile, -theta) * std::polar(1.0, 0.5 * v * theta) * (std::sin(0.5 * v * theta) / (0.5 * theta));
}

namespace detail {

/// Integrates k(theta) * F(theta) over [0, inf) where F collects the
/// |tau|^2 terms. The range [0, Theta] goes to panel quadrature; beyond
/// Theta `tail(Theta)` returns the analytic diagonal contribution and a
/// bound on everything else. Theta grows until the bound is at most half
/// the relative target.
template <class Integrand, class Tail>
IntegralResult integrate_to_infinity(IntegralKind kind, Integrand&& f, Tail&& tail, double theta0, double width,
                                     double rel_tol) {
    QuadratureSpec spec;
    spec.rel_tol = 0.25 * rel_tol;
    double value = 0.0, error = 0.0, mass = 0.0;
    double lo = 0.0, hi = theta0;
    for (int round = 0; round < 64; ++round) {
        const auto part = integrate_panels_rel(f, lo, hi, width, spec.rel_tol, spec);
        value += part.value;
        error += part.error;
        mass += part.abs_mass;
        const auto [tail_value, tail_bound] = tail(hi);
        const double total = value + tail_value;
        const double target = 0.5 * rel_tol * std::abs(total);
        if (tail_bound <= target || !std::isfinite(tail_bound)) {
            return {kind, total, false, error + tail_bound + kRoundingFactor * mass};
        }
        // Tail bounds decay like Theta^-2.
        lo = hi;
        hi *= std::max(1.25, 1.05 * std::sqrt(tail_bound / target));
    }
    throw quadrature_error("theta integral did not converge", value, std::numeric_limits<double>::infinity());
}

}  // namespace detail

/// tau*_v = int_0^inf v^2 / (1 + theta^2 v^2) |tau(n, chi, theta)|^2 dtheta.
inline IntegralResult tau_star(const DivisorProfile& profile, double v, double rel_tol = 1e-8) {
    if (!(v >= 1.0)) throw std::invalid_argument("tau_star: v must be >= 1");
    const detail::TauTerms terms(profile);
    const double v2 = v * v;
    auto f = [&](double th) { return v2 / (1.0 + th * th * v2) * terms.norms(th).first; };
    // Off-diagonal terms are cosines at frequency |log d - log d'| against a
    // decreasing kernel k, so each tail is at most 2 k(Theta) / gap in modulus.
    auto tail = [&](double th) {
        const double diag = terms.diag * v * (0.5 * std::numbers::pi - std::atan(th * v));
        const double k = v2 / (1.0 + th * th * v2);
        return std::pair{diag, 4.0 * k * terms.inverse_gaps};
    };
    const double width = std::min(std::numbers::pi / std::max({terms.max_log, 1.0}), 1.0 / v);
    return detail::integrate_to_infinity(IntegralKind::TauStar, f, tail, std::max(20.0, 20.0 / v), width, rel_tol);
}

/// (V/pi) int_R (1 - sin(theta V)/(theta V)) |tau(n, chi, theta)|^2 / theta^2 dtheta,
/// the Fourier-side form of M_{2,V}.
inline IntegralResult plancherel_rhs(const DivisorProfile& profile, double V, double rel_tol = 1e-8) {
    if (!(V > 0.0)) throw std::invalid_argument("plancherel_rhs: V must be positive");
    const detail::TauTerms terms(profile);
    const double series_cut = 1e-3 / V;
    const double V2 = V * V, V4 = V2 * V2;
    auto kernel = [&](double th) {
        if (th < series_cut) return V2 / 6.0 - th * th * V4 / 120.0;
        const double x = th * V;
        return (1.0 - std::sin(x) / x) / (th * th);
    };
    // The integrand over theta > 0 folded with its mirror image.
    auto f = [&](double th) {
        const auto [p, m] = terms.norms(th);
        return kernel(th) * (p + m);
    };
    const double n2 = terms.diag * terms.diag;
    // kernel = 1/theta^2 - sin(V theta)/(V theta^3). The diagonal part 2D of
    // F integrates to 2D/Theta against 1/theta^2; the sine part is below
    // 1/(2 V Theta^2) per unit amplitude, and each off-diagonal cosine (total
    // amplitude 4 per pair) contributes at most 2/(gap Theta^2) against the
    // monotone 1/theta^2.
    auto tail = [&](double th) {
        const double th2 = th * th;
        const double value = 2.0 * terms.diag / th;
        const double bound = (8.0 * terms.inverse_gaps + (n2 + terms.diag) / V) / th2;
        return std::pair{value, bound};
    };
    const double width = std::min(std::numbers::pi / std::max({terms.max_log, V, 1.0}), 1.0 / V);
    auto r = detail::integrate_to_infinity(IntegralKind::PlancherelRhs, f, tail, std::max(20.0, 20.0 / V), width,
                                           rel_tol);
    // Series remainder theta^4 V^6 / 5040 below the cut, against F <= 2 n^2.
    const double series_err = 2.0 * n2 * std::pow(series_cut, 5) * V4 * V2 / (5.0 * 5040.0);
    const double scale = V / std::numbers::pi;
    r.value *= scale;
    r.error_bound = (r.error_bound + series_err) * scale;
    return r;
}

/// V^2 int_{-1/V}^{1/V} |tau(n, chi, theta)|^2 w(theta) dtheta for an even
/// weight w.
template <class W>
IntegralResult tau_window_integral(const DivisorProfile& profile, double V, W&& weight, double rel_tol) {
    const detail::TauTerms terms(profile);
    auto f = [&](double th) {
        const auto [p, m] = terms.norms(th);
        return weight(th) * (p + m);
    };
    const double width = std::min(std::numbers::pi / std::max(terms.max_log, 1.0), 1.0 / V);
    QuadratureSpec spec;
    spec.rel_tol = rel_tol;
    const auto r = integrate_panels_rel(f, 0.0, 1.0 / V, width, rel_tol, spec);
    return {IntegralKind::ILower, V * V * r.value, false,
            V * V * (r.error + detail::kRoundingFactor * r.abs_mass)};
}

/// I(n) = V^2 int_{-1/V}^{1/V} |tau(n, chi, theta)|^2 dtheta.
inline IntegralResult i_lower(const DivisorProfile& profile, double V, double rel_tol = 1e-10) {
    if (!(V > 0.0)) throw std::invalid_argument("i_lower: V must be positive");
    return tau_window_integral(profile, V, [](double) { return 1.0; }, rel_tol);
}

namespace detail {

inline IntegralResult m2v_lower_integral(const DivisorProfile& profile, double V) {
    const double V2 = V * V;
    return tau_window_integral(profile, V, [V2](double th) { return 1.0 - th * th * V2 / 20.0; }, 1e-10);
}

}  // namespace detail

/// M_{2,V} >= (V^2/6) int_{-1/V}^{1/V} (1 - theta^2 V^2 / 20) |tau|^2 dtheta,
/// as stated. Entry orientation: bound minus quadrature error (lhs) <= M_{2,V} (rhs).
inline VerifyEntry m2v_lower_check(const DivisorProfile& profile, double V) {
    if (!(V > 0.0)) throw std::invalid_argument("m2v_lower_check: V must be positive");
    const double m2v = m_2V(profile, V).value;
    // tau_window_integral carries a V^2 factor; the bound wants V^2/6 only.
    const auto r = detail::m2v_lower_integral(profile, V);
    return check_le("m2v_lower", (r.value - r.error_bound) / 6.0, m2v, 1e-9,
                    "n=" + std::to_string(profile.n()) + " V=" + detail::fmt_num(V));
}

/// The same bound with the V/pi factor of the Fourier-side formula for
/// M_{2,V} kept: (V^3 / (6 pi)) int (1 - theta^2 V^2 / 20) |tau|^2.
inline VerifyEntry m2v_lower_scaled_check(const DivisorProfile& profile, double V) {
    if (!(V > 0.0)) throw std::invalid_argument("m2v_lower_scaled_check: V must be positive");
    const double m2v = m_2V(profile, V).value;
    const auto r = detail::m2v_lower_integral(profile, V);
    const double scale = V / (6.0 * std::numbers::pi);
    return check_le("m2v_lower_scaled", (r.value - r.error_bound) * scale, m2v, 1e-9,
                    "n=" + std::to_string(profile.n()) + " V=" + detail::fmt_num(V));
}

struct PrimeSumDiag {
    double lhs = 0.0;
    double main_terms = 0.0;
    /// Part of lhs from p | q, where chi(p) = 0 and the summand is g(p)/p.
    double excluded = 0.0;
};

/// sum_{p<=x} g(p)/p |1 + chi(p) p^{i theta}|^{2t} next to its main terms
/// y lambda(t) log(1 + |theta| log x) + beta 2^{2t-1} log(log x / (1 + |theta| log x)).
inline PrimeSumDiag prime_sum_diag(const DirichletCharacter& chi, const MultiplicativeWeight& g, double t,
                                   double theta, double x, const SpfTable& table) {
    if (x > static_cast<double>(table.limit())) throw std::out_of_range("prime_sum_diag: x exceeds table");
    if (!(std::abs(theta) <= 1.0)) throw std::invalid_argument("prime_sum_diag: need |theta| <= 1");
    if (!(x > 1.0)) throw std::invalid_argument("prime_sum_diag: need x > 1");
    PrimeSumDiag out;
    Factorization single;
    for (std::uint32_t p : table.primes()) {
        if (static_cast<double>(p) > x) break;
        single.factors.assign(1, {p, 1});
        const double gp = weight_value(g, single);
        if (gp == 0.0) continue;
        const auto z = 1.0 + chi.value(p) * std::polar(1.0, theta * std::log(static_cast<double>(p)));
        const double term = gp / p * std::pow(std::norm(z), t);
        out.lhs += term;
        if (chi.evaluate(p).is_none()) out.excluded += term;
    }
    const auto w = class_prime_sums(chi, g, x, table).estimate();
    const double lx = std::log(x);
    const double a = 1.0 + std::abs(theta) * lx;
    out.main_terms = w.y * lambda_gamma(t) * std::log(a) + beta_g(w, t) * std::exp2(2.0 * t - 1.0) * std::log(lx / a);
    return out;
}

}  // namespace ehd

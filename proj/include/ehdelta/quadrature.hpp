#pragma once

// Adaptive Gauss-Kronrod (7/15) panel quadrature.
//
// The integrands handled here are smooth and oscillatory with a known
// maximal frequency, so the range is cut into fixed panels no wider than a
// half period and each panel is refined by bisection until its local
// |K15 - G7| estimate meets the panel's share of the tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehd {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    /// Absolute floor for the per-panel tolerance, guards integrals that are 0.
    double abs_tol = 1e-300;
    unsigned max_depth = 12;
    std::size_t max_panels = 8'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t panels = 0;
};

/// Thrown when a quadrature cannot reach its tolerance within the panel
/// budget; carries the partial estimate and its error bound.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& what, double partial, double bound)
        : std::runtime_error(what), partial_(partial), bound_(bound) {}
    double partial() const noexcept { return partial_; }
    double bound() const noexcept { return bound_; }

private:
    double partial_;
    double bound_;
};

namespace detail {

// QUADPACK qk15 tables.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double error;
    double abs_mass;
};

template <class F>
PanelEstimate gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kKronrodWeights[7];
    double resg = fc * kGaussWeights[3];
    double mass = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        resk += kKronrodWeights[j] * (f1 + f2);
        mass += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kGaussWeights[j / 2] * (f1 + f2);
    }
    return {resk * half, std::abs((resk - resg) * half), mass * std::abs(half)};
}

template <class F>
PanelEstimate adaptive(F& f, double a, double b, double tol, unsigned depth) {
    PanelEstimate est = gk15(f, a, b);
    if (est.error <= tol || depth == 0) return est;
    const double mid = 0.5 * (a + b);
    PanelEstimate lo = adaptive(f, a, mid, 0.5 * tol, depth - 1);
    PanelEstimate hi = adaptive(f, mid, b, 0.5 * tol, depth - 1);
    return {lo.kronrod + hi.kronrod, lo.error + hi.error, lo.abs_mass + hi.abs_mass};
}

}  // namespace detail

/// Integrates f over [a, b] using panels of width at most `panel_width`.
/// `abs_target` is the absolute error the caller is willing to accept over
/// the whole range; each panel gets a share proportional to its width.
/// The returned error is the summed |K15 - G7| estimate.
template <class F>
QuadratureResult integrate_panels(F&& f, double a, double b, double panel_width,
                                  double abs_target, const QuadratureSpec& spec = {}) {
    QuadratureResult out;
    if (!(b > a)) return out;
    if (!(panel_width > 0.0)) throw std::invalid_argument("panel width must be positive");
    const double span = b - a;
    const double count_d = std::ceil(span / panel_width);
    if (count_d > static_cast<double>(spec.max_panels))
        throw quadrature_error("quadrature panel budget exceeded", 0.0,
                               std::numeric_limits<double>::infinity());
    const auto count = static_cast<std::size_t>(std::max(1.0, count_d));
    const double h = span / static_cast<double>(count);
    const double share = std::max(abs_target, spec.abs_tol) / static_cast<double>(count);
    double sum = 0.0, comp = 0.0, err = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double lo = a + h * static_cast<double>(k);
        const double hi = (k + 1 == count) ? b : a + h * static_cast<double>(k + 1);
        auto est = detail::adaptive(f, lo, hi, share, spec.max_depth);
        // Neumaier summation across panels.
        const double t = sum + est.kronrod;
        comp += (std::abs(sum) >= std::abs(est.kronrod)) ? (sum - t) + est.kronrod
                                                         : (est.kronrod - t) + sum;
        sum = t;
        err += est.error;
    }
    out.value = sum + comp;
    out.error = err;
    out.panels = count;
    return out;
}

/// Like integrate_panels, but the target is relative to the integral
/// itself: every panel gets one 15-point pass, the total fixes the target,
/// and only panels above their share are refined. `abs_mass` of the result
/// is the integral of |f|, used for rounding allowances.
struct RelativeQuadratureResult : QuadratureResult {
    double abs_mass = 0.0;
};

template <class F>
RelativeQuadratureResult integrate_panels_rel(F&& f, double a, double b, double panel_width, double rel_tol,
                                              const QuadratureSpec& spec = {}) {
    RelativeQuadratureResult out;
    if (!(b > a)) return out;
    if (!(panel_width > 0.0)) throw std::invalid_argument("panel width must be positive");
    const double count_d = std::ceil((b - a) / panel_width);
    if (count_d > static_cast<double>(spec.max_panels))
        throw quadrature_error("quadrature panel budget exceeded", 0.0, std::numeric_limits<double>::infinity());
    const auto count = static_cast<std::size_t>(std::max(1.0, count_d));
    const double h = (b - a) / static_cast<double>(count);
    auto lo_of = [&](std::size_t k) { return a + h * static_cast<double>(k); };
    auto hi_of = [&](std::size_t k) { return (k + 1 == count) ? b : a + h * static_cast<double>(k + 1); };
    std::vector<detail::PanelEstimate> est(count);
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        est[k] = detail::gk15(f, lo_of(k), hi_of(k));
        total += est[k].kronrod;
    }
    const double share = std::max(rel_tol * std::abs(total), spec.abs_tol) / static_cast<double>(count);
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        if (est[k].error > share) est[k] = detail::adaptive(f, lo_of(k), hi_of(k), share, spec.max_depth);
        const double x = est[k].kronrod;
        const double t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        out.error += est[k].error;
        out.abs_mass += est[k].abs_mass;
    }
    out.value = sum + comp;
    out.panels = count;
    return out;
}

/// Relative-tolerance wrapper for smooth, non-oscillatory integrands.
template <class F>
QuadratureResult integrate_smooth(F&& f, double a, double b, std::size_t panels,
                                  const QuadratureSpec& spec = {}) {
    if (!(b > a)) return {};
    const double width = (b - a) / static_cast<double>(std::max<std::size_t>(1, panels));
    auto r = integrate_panels_rel(f, a, b, width, spec.rel_tol, spec);
    if (r.error > std::max(spec.rel_tol * std::abs(r.value), spec.abs_tol) * 10.0)
        throw quadrature_error("quadrature did not converge", r.value, r.error);
    return r;
}

}  // namespace ehd

#include <gtest/gtest.h>

#include <cmath>

#include "ehdelta/delta.hpp"
#include "ehdelta/oracle.hpp"

using namespace ehd;

namespace {

const SpfTable& table() {
    static const SpfTable t = build_spf(20000);
    return t;
}

WeightFunction chi4() { return WeightFunction::character(make_character(4, 1)); }
WeightFunction chi5() { return WeightFunction::character(make_character(5, 1)); }

std::vector<WeightFunction> weights() {
    return {WeightFunction::unit(), WeightFunction::moebius(), chi4(), chi5()};
}

/// Integral over u of |window_sum(u, v)|^q, sampled at the midpoints of the
/// sorted event points where the sum is constant.
double m_star_by_sampling(const DivisorProfile& p, double q, double v) {
    std::vector<double> ev;
    for (double l : p.logs()) {
        ev.push_back(l);
        ev.push_back(l - v);
    }
    std::sort(ev.begin(), ev.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < ev.size(); ++k)
        s += (ev[k + 1] - ev[k]) * std::pow(std::abs(window_sum(p, 0.5 * (ev[k] + ev[k + 1]), v)), q);
    return s;
}

}  // namespace

TEST(Profile, CoefficientsOfTwelveUnderChiFour) {
    const auto p = build_profile(12, chi4(), table());
    ASSERT_EQ(p.divisors(), (std::vector<std::uint64_t>{1, 2, 3, 4, 6, 12}));
    const std::vector<UnityExponent> want{UnityExponent(0),      UnityExponent::none(), UnityExponent(1),
                                          UnityExponent::none(), UnityExponent::none(), UnityExponent::none()};
    EXPECT_EQ(p.coeffs(), want);
}

TEST(Profile, MoebiusSignsOnThirty) {
    const auto p = build_profile(30, WeightFunction::moebius(), table());
    const std::vector<int> signs{+1, -1, -1, -1, +1, +1, +1, -1};
    ASSERT_EQ(p.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k)
        EXPECT_EQ(std::complex<double>(signs[k], 0), as_complex(p.coeffs()[k], 2)) << p.divisors()[k];
}

TEST(Profile, MoebiusZeroOnSquarefulDivisors) {
    const auto p = build_profile(12, WeightFunction::moebius(), table());
    EXPECT_TRUE(p.coeffs()[3].is_none());  // 4
    EXPECT_TRUE(p.coeffs()[5].is_none());  // 12
    EXPECT_FALSE(p.coeffs()[4].is_none());  // 6
}

TEST(Profile, Invariants) {
    for (std::uint64_t n = 1; n <= 3000; ++n) {
        const auto p = build_profile(n, chi5(), table());
        ASSERT_EQ(p.divisors().front(), 1u);
        ASSERT_EQ(p.divisors().back(), n);
        ASSERT_EQ(p.size(), factorize(n, table()).tau());
        for (std::size_t k = 1; k < p.size(); ++k) {
            ASSERT_LT(p.divisors()[k - 1], p.divisors()[k]);
            ASSERT_LT(p.logs()[k - 1], p.logs()[k]);
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            int row = 0;
            for (std::uint32_t c = 0; c < p.order(); ++c) row += p.prefix(k + 1, c) - p.prefix(k, c);
            ASSERT_EQ(row, p.coeffs()[k].is_none() ? 0 : 1);
            ASSERT_EQ(p.coeffs()[k], make_character(5, 1).evaluate(p.divisors()[k]));
        }
    }
}

TEST(Profile, RunNormMatchesComplexSum) {
    for (std::uint64_t q : {7u, 9u, 13u, 16u, 21u, 37u}) {
        for (const auto& chi : enumerate_characters(q)) {
            const auto f = WeightFunction::character(chi);
            for (std::uint64_t n : {360u, 1001u, 4620u}) {
                const auto p = build_profile(n, f, table());
                for (std::size_t i = 0; i < p.size(); i += 3)
                    for (std::size_t j = i; j < p.size(); j += 2) {
                        std::complex<double> s{0.0, 0.0};
                        for (std::size_t k = i; k <= j; ++k) s += chi.value(p.divisors()[k]);
                        ASSERT_NEAR(p.run_norm2(i, j), std::norm(s), 1e-9) << chi.label() << " n=" << n;
                    }
            }
        }
    }
}

TEST(WindowSum, Examples) {
    EXPECT_EQ(window_sum(build_profile(12, chi4(), table()), 0.5, 1.0), std::complex<double>(-1.0, 0.0));
    EXPECT_EQ(window_sum(build_profile(12, chi4(), table()), 0.5, 0.0), std::complex<double>(0.0, 0.0));
    EXPECT_EQ(window_sum(build_profile(6, WeightFunction::unit(), table()), -0.1, 2.0), std::complex<double>(4.0, 0.0));
}

TEST(DeltaSup, Examples) {
    const auto p12 = build_profile(12, WeightFunction::unit(), table());
    const auto w = delta_sup(p12, 2.0);
    EXPECT_DOUBLE_EQ(w.value, 5.0);
    ASSERT_TRUE(w.run);
    // {1,2,3,4,6} and {2,3,4,6,12} both reach 5; either is a valid witness.
    EXPECT_EQ(w.run->second - w.run->first, 4u);
    EXPECT_LT(p12.logs()[w.run->second] - p12.logs()[w.run->first], 2.0);
    EXPECT_DOUBLE_EQ(delta_sup(build_profile(1, chi4(), table()), 0.3).value, 1.0);
    const auto m = delta_sup(build_profile(30, WeightFunction::moebius(), table()), 1.0);
    EXPECT_DOUBLE_EQ(m.value, 3.0);
    EXPECT_EQ(m.run->first, 1u);
    EXPECT_EQ(m.run->second, 3u);
    EXPECT_THROW(delta_sup(build_profile(1, chi4(), table()), 0.0), std::invalid_argument);
}

TEST(DeltaSup, WitnessWindowReproducesValue) {
    for (const auto& f : weights()) {
        for (std::uint64_t n = 1; n <= 1500; n += 7) {
            const auto p = build_profile(n, f, table());
            for (double V : {0.4, 1.0, 2.5}) {
                const auto w = delta_sup(p, V);
                ASSERT_LE(w.v, V);
                ASSERT_GT(w.v, 0.0);
                ASSERT_LT(p.logs()[w.run->second] - p.logs()[w.run->first], V);
                ASSERT_NEAR(std::abs(window_sum(p, w.u, w.v)), w.value, 1e-12) << n << " " << f.label();
            }
        }
    }
}

TEST(DeltaSup, SpreadEqualToVIsNotAdmissible) {
    // Divisors 1 and 2 of n = 2 are log 2 apart: a window of length exactly
    // log 2 cannot hold both, since (e^u, e^{u+v}] is open at the left end.
    const auto p = build_profile(2, WeightFunction::unit(), table());
    const double l2 = p.logs()[1];
    EXPECT_DOUBLE_EQ(delta_sup(p, l2).value, 1.0);
    EXPECT_DOUBLE_EQ(delta_sup(p, std::nextafter(l2, 10.0)).value, 2.0);
    EXPECT_DOUBLE_EQ(delta_star(p, l2).value, 1.0);
}

TEST(DeltaStar, Examples) {
    EXPECT_DOUBLE_EQ(delta_star(build_profile(12, WeightFunction::unit(), table()), 1.0).value, 3.0);
    EXPECT_DOUBLE_EQ(delta_star(build_profile(1, chi4(), table()), 1.0).value, 1.0);
    EXPECT_DOUBLE_EQ(delta_star(build_profile(10, chi4(), table()), 2.0).value, 2.0);
    EXPECT_THROW(delta_star(build_profile(1, chi4(), table()), -1.0), std::invalid_argument);
}

TEST(DeltaStar, WitnessWindowReproducesValue) {
    for (const auto& f : weights())
        for (std::uint64_t n = 1; n <= 1500; n += 11) {
            const auto p = build_profile(n, f, table());
            const auto w = delta_star(p, 1.3);
            ASSERT_NEAR(std::abs(window_sum(p, w.u, 1.3)), w.value, 1e-12);
        }
}

TEST(Oracle, EquivalenceOnSmallRange) {
    for (const auto& f : weights())
        for (std::uint64_t n = 1; n <= 400; ++n) {
            const auto p = build_profile(n, f, table());
            for (double V : {0.5, 1.0, 3.0}) {
                ASSERT_NEAR(delta_sup(p, V).value, oracle::delta_sup(p, V), 1e-12) << n << f.label() << V;
                ASSERT_NEAR(delta_star(p, V).value, oracle::delta_star(p, V), 1e-12) << n << f.label() << V;
            }
        }
}

TEST(DeltaProperties, MonotoneAndDominated) {
    for (std::uint64_t n = 1; n <= 2000; ++n) {
        const auto unit = build_profile(n, WeightFunction::unit(), table());
        for (const auto& f : weights()) {
            const auto p = build_profile(n, f, table());
            double prev = 0.0;
            for (double V : {0.25, 0.5, 1.0, 2.0, 4.0}) {
                const double d = delta_sup(p, V).value;
                ASSERT_GE(d, prev);
                prev = d;
                ASSERT_LE(d, delta_sup(unit, V).value + 1e-12);
                for (double v : {0.1, 0.5 * V, V}) ASSERT_LE(delta_star(p, v).value, d + 1e-12);
            }
        }
    }
}

TEST(DeltaProperties, PigeonholeLowerBound) {
    // [0, log n] is covered by floor(log n / V) + 1 windows of length V.
    for (std::uint64_t n = 2; n <= 10000; ++n) {
        const auto p = build_profile(n, WeightFunction::unit(), table());
        const double L = std::log(static_cast<double>(n));
        for (double V : {0.3, std::min(1.0, L), 2.0}) {
            const double bound = static_cast<double>(p.size()) * V / (V + L);
            ASSERT_GE(delta_sup(p, V).value, bound - 1e-9) << n << " V=" << V;
        }
    }
}

TEST(Gap, Examples) {
    EXPECT_NEAR(gap_info(build_profile(12, WeightFunction::unit(), table())).E, std::log(4.0 / 3.0), 1e-15);
    EXPECT_NEAR(gap_info(build_profile(6, WeightFunction::unit(), table())).E, std::log(1.5), 1e-15);
    const auto g1 = gap_info(build_profile(1, WeightFunction::unit(), table()));
    EXPECT_TRUE(std::isinf(g1.E));
    EXPECT_EQ(g1.Estar, 1.0);
    EXPECT_DOUBLE_EQ(gap_info(build_profile(2, WeightFunction::unit(), table())).Estar, std::log(2.0));
    EXPECT_DOUBLE_EQ(gap_info(build_profile(3, WeightFunction::unit(), table())).Estar, 1.0);
}

TEST(Gap, MinimumOverAllPairs) {
    for (std::uint64_t n = 2; n <= 600; ++n) {
        const auto p = build_profile(n, WeightFunction::unit(), table());
        double best = std::numeric_limits<double>::infinity();
        for (auto a : p.divisors())
            for (auto b : p.divisors())
                if (a < b) best = std::min(best, std::log(static_cast<double>(b) / static_cast<double>(a)));
        ASSERT_NEAR(gap_info(p).E, best, 1e-12);
    }
}

TEST(MStar, Examples) {
    const auto u2 = build_profile(2, WeightFunction::unit(), table());
    EXPECT_NEAR(m_star(u2, 2.0, 1.0).value, 4.0 - 2.0 * std::log(2.0), 1e-14);
    EXPECT_TRUE(m_star(u2, 2.0, 1.0).exact);
    EXPECT_NEAR(m_star(build_profile(1, chi5(), table()), 2.0, 0.7).value, 0.7, 1e-15);
    EXPECT_NEAR(m_star(build_profile(2, WeightFunction::moebius(), table()), 2.0, 1.0).value, 2.0 * std::log(2.0),
                1e-14);
    EXPECT_THROW(m_star(u2, 0.5, 1.0), std::invalid_argument);
}

TEST(MStar, MatchesEventSampling) {
    for (const auto& f : weights())
        for (std::uint64_t n = 1; n <= 2000; n += 13)
            for (double q : {1.0, 2.0, 3.5, 4.0}) {
                const auto p = build_profile(n, f, table());
                const double ref = m_star_by_sampling(p, q, 1.2);
                ASSERT_NEAR(m_star(p, q, 1.2).value, ref, 1e-9 * std::max(1.0, ref));
            }
}

TEST(MStar, InvariantUnderTranslationOfLogs) {
    // Divisors {3, 6} are {1, 2} shifted by log 3; the u-integral of the
    // captured count must not see the shift.
    const double base = m_star(build_profile(2, WeightFunction::unit(), table()), 2.0, 0.9).value;
    std::vector<double> ev;
    const double l3 = std::log(3.0), l6 = std::log(6.0);
    for (double l : {l3, l6}) {
        ev.push_back(l);
        ev.push_back(l - 0.9);
    }
    std::sort(ev.begin(), ev.end());
    double shifted = 0.0;
    for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
        const double u = 0.5 * (ev[k] + ev[k + 1]);
        const int c = (u < l3 && l3 <= u + 0.9) + (u < l6 && l6 <= u + 0.9);
        shifted += (ev[k + 1] - ev[k]) * c * c;
    }
    EXPECT_NEAR(base, shifted, 1e-12);
}

TEST(MStar, AffineBetweenSpreadBreakpoints) {
    for (std::uint64_t n : {12u, 30u, 360u, 1105u, 2310u}) {
        for (const auto& f : weights()) {
            const auto p = build_profile(n, f, table());
            std::vector<double> knots{0.0};
            for (std::size_t a = 0; a < p.size(); ++a)
                for (std::size_t b = a + 1; b < p.size(); ++b)
                    if (p.logs()[b] - p.logs()[a] < 3.0) knots.push_back(p.logs()[b] - p.logs()[a]);
            knots.push_back(3.0);
            std::sort(knots.begin(), knots.end());
            for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
                const double lo = knots[k], hi = knots[k + 1];
                if (hi - lo < 1e-6) continue;
                const double x1 = lo + 0.25 * (hi - lo), x2 = lo + 0.5 * (hi - lo), x3 = lo + 0.75 * (hi - lo);
                const double y1 = m_star(p, 2.0, x1).value, y2 = m_star(p, 2.0, x2).value,
                             y3 = m_star(p, 2.0, x3).value;
                ASSERT_NEAR(y2, 0.5 * (y1 + y3), 1e-9 * std::max(1.0, y2)) << n << " " << f.label();
            }
        }
    }
}

TEST(M2V, Examples) {
    EXPECT_NEAR(m_2V(build_profile(1, chi4(), table()), 1.7).value, 1.7 * 1.7 / 2.0, 1e-14);
    const double l2 = std::log(2.0);
    EXPECT_NEAR(m_2V(build_profile(2, WeightFunction::unit(), table()), 1.0).value, l2 * l2 + 2.0 - 2.0 * l2, 1e-14);
    for (std::uint64_t n : {12u, 360u, 5040u}) {
        const auto p = build_profile(n, WeightFunction::unit(), table());
        const double tiny = 1e-9;
        EXPECT_LE(m_2V(p, tiny).value, static_cast<double>(p.size() * p.size()) * tiny * tiny / 2.0 * (1 + 1e-9));
    }
}

TEST(M2V, MatchesFineRiemannSumInV) {
    // Simpson in v over each smooth stretch of an independent sampling of M*_2.
    for (std::uint64_t n : {6u, 30u, 210u}) {
        for (const auto& f : weights()) {
            const auto p = build_profile(n, f, table());
            const double V = 2.0;
            const int steps = 4000;
            double s = 0.0;
            for (int k = 0; k < steps; ++k) {
                const double a = V * k / steps, b = V * (k + 1) / steps;
                s += (b - a) / 6.0 *
                     (m_star_by_sampling(p, 2.0, std::max(a, 1e-12)) + 4.0 * m_star_by_sampling(p, 2.0, 0.5 * (a + b)) +
                      m_star_by_sampling(p, 2.0, b));
            }
            EXPECT_NEAR(m_2V(p, V).value, s, 1e-6 * s) << n << " " << f.label();
        }
    }
}

TEST(NCross, Examples) {
    const auto p = build_profile(2, WeightFunction::unit(), table());
    EXPECT_EQ(n_cross(p, 1, 2, 1.0, 10.0).value, 0.0);
    const auto q = build_profile(360, chi5(), table());
    for (int j = 0; j <= 4; ++j)
        EXPECT_NEAR(n_cross(q, j, 4, 1.1, 0.0).value, m_star(q, 4.0, 1.1).value, 1e-9) << j;
    for (double w : {-3.0, 0.4, 7.0}) EXPECT_NEAR(n_cross(q, 3, 3, 1.1, w).value, m_star(q, 3.0, 1.1).value, 1e-9);
    EXPECT_THROW(n_cross(q, 3, 2, 1.0, 0.0), std::invalid_argument);
}

TEST(NCross, MatchesSampling) {
    const auto p = build_profile(840, chi4(), table());
    const double v = 1.3, w = 0.77;
    std::vector<double> ev;
    for (double l : p.logs())
        for (double s : {0.0, w}) {
            ev.push_back(l + s);
            ev.push_back(l - v + s);
        }
    std::sort(ev.begin(), ev.end());
    double ref = 0.0;
    for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
        const double u = 0.5 * (ev[k] + ev[k + 1]);
        ref += (ev[k + 1] - ev[k]) * std::pow(std::abs(window_sum(p, u, v)), 2) *
               std::pow(std::abs(window_sum(p, u - w, v)), 4);
    }
    EXPECT_NEAR(n_cross(p, 2, 6, v, w).value, ref, 1e-9 * ref);
}

TEST(Checks, SplitAndLemma) {
    EXPECT_EQ(split_bound_check(build_profile(1, chi4(), table()), 3.0, 0.5).status, CheckStatus::Pass);
    EXPECT_EQ(split_bound_check(build_profile(12, WeightFunction::unit(), table()), 4.0, 2.0 / 3.0).status,
              CheckStatus::Pass);
    EXPECT_EQ(split_bound_check(build_profile(30, WeightFunction::moebius(), table()), 2.0, 0.5).status,
              CheckStatus::Pass);
    const auto l1 = lemma31_check(build_profile(1, chi4(), table()), 1, 1.0);
    EXPECT_EQ(l1.status, CheckStatus::Pass);
    EXPECT_DOUBLE_EQ(l1.lhs, 1.0);
    // 2^5 + 2^{3+2/q} E*^{-2/q} M*^{1/q} with q = 1, E*(1) = 1, M*_{2,1}(1) = 1.
    EXPECT_DOUBLE_EQ(l1.rhs, 32.0 + 32.0);
    EXPECT_EQ(lemma31_check(build_profile(12, chi4(), table()), 1, 1.0).status, CheckStatus::Pass);
    EXPECT_EQ(lemma31_check(build_profile(30, WeightFunction::moebius(), table()), 2, 1.0).status, CheckStatus::Pass);
    EXPECT_THROW(lemma31_check(build_profile(30, chi4(), table()), 1, 0.5), std::invalid_argument);
    EXPECT_THROW(split_bound_check(build_profile(30, chi4(), table()), 0.5, 0.5), std::invalid_argument);
}

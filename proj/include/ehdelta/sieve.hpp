#pragma once

// Smallest-prime-factor tables, factorizations, the multiplicative weight
// families g, and prime sums split by character class.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehdelta/characters.hpp"
#include "ehdelta/quadrature.hpp"

namespace ehd {

inline constexpr std::uint64_t kDefaultSieveCap = 100'000'000;

class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// spf[n] for 2 <= n <= limit, built by a linear sieve.
class SpfTable {
public:
    SpfTable() = default;

    std::uint64_t limit() const { return limit_; }
    std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }
    bool is_prime(std::uint64_t n) const { return n >= 2 && n <= limit_ && spf_[n] == n; }

    friend SpfTable build_spf(std::uint64_t x, std::uint64_t cap);

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline SpfTable build_spf(std::uint64_t x, std::uint64_t cap = kDefaultSieveCap) {
    if (x < 2) throw std::invalid_argument("sieve limit must be at least 2");
    if (x > cap) throw resource_error("sieve limit " + std::to_string(x) + " exceeds cap " + std::to_string(cap));
    SpfTable t;
    t.limit_ = x;
    t.spf_.assign(x + 1, 0);
    for (std::uint64_t i = 2; i <= x; ++i) {
        if (t.spf_[i] == 0) {
            t.spf_[i] = static_cast<std::uint32_t>(i);
            t.primes_.push_back(static_cast<std::uint32_t>(i));
        }
        const std::uint32_t si = t.spf_[i];
        for (std::uint32_t p : t.primes_) {
            if (p > si || static_cast<std::uint64_t>(p) * i > x) break;
            t.spf_[static_cast<std::uint64_t>(p) * i] = p;
        }
    }
    return t;
}

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct Factorization {
    std::vector<PrimePower> factors;  // primes ascending

    unsigned omega() const { return static_cast<unsigned>(factors.size()); }
    bool squarefree() const {
        for (const auto& f : factors)
            if (f.exponent > 1) return false;
        return true;
    }
    int mu2() const { return squarefree() ? 1 : 0; }
    int mobius() const { return squarefree() ? ((omega() % 2) ? -1 : 1) : 0; }
    std::uint64_t tau() const {
        std::uint64_t t = 1;
        for (const auto& f : factors) t *= f.exponent + 1;
        return t;
    }
};

/// Writes the factorization of n into `out` (reusing its storage).
inline void factorize_into(std::uint64_t n, const SpfTable& table, Factorization& out) {
    if (n < 1 || n > table.limit())
        throw std::out_of_range("factorize: n=" + std::to_string(n) + " outside [1, " +
                                std::to_string(table.limit()) + "]");
    out.factors.clear();
    while (n > 1) {
        const std::uint32_t p = table.spf(n);
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.factors.push_back({p, e});
    }
}

inline Factorization factorize(std::uint64_t n, const SpfTable& table) {
    Factorization f;
    factorize_into(n, table, f);
    return f;
}

enum class WeightFamily { Unit, YOmega, Mu2YOmega, HChi };

/// The multiplicative weights g used in the moment sums.
struct MultiplicativeWeight {
    WeightFamily family = WeightFamily::Unit;
    double y = 1.0;
    std::optional<DirichletCharacter> chi;

    static MultiplicativeWeight unit() { return {}; }
    static MultiplicativeWeight y_omega(double y) { return {WeightFamily::YOmega, y, std::nullopt}; }
    static MultiplicativeWeight mu2_y_omega(double y) { return {WeightFamily::Mu2YOmega, y, std::nullopt}; }
    static MultiplicativeWeight h_chi(DirichletCharacter c) { return {WeightFamily::HChi, 1.0, std::move(c)}; }

    std::string label() const {
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        switch (family) {
            case WeightFamily::Unit: return "unit";
            case WeightFamily::YOmega: return "yomega:" + num(y);
            case WeightFamily::Mu2YOmega: return "mu2yomega:" + num(y);
            case WeightFamily::HChi: return "hchi:" + std::to_string(chi->modulus()) + ":" + std::to_string(chi->index());
        }
        return "?";
    }
};

/// h_chi(p): 1 when chi(p) = 1 exactly, else 0.
inline bool h_chi_at_prime(const DirichletCharacter& chi, std::uint64_t p) {
    const auto e = chi.evaluate(p);
    return !e.is_none() && e.value() == 0;
}

inline double weight_value(const MultiplicativeWeight& g, const Factorization& f) {
    switch (g.family) {
        case WeightFamily::Unit: return 1.0;
        case WeightFamily::YOmega: return std::pow(g.y, static_cast<double>(f.omega()));
        case WeightFamily::Mu2YOmega:
            return f.squarefree() ? std::pow(g.y, static_cast<double>(f.omega())) : 0.0;
        case WeightFamily::HChi:
            for (const auto& pp : f.factors)
                if (!h_chi_at_prime(*g.chi, pp.prime)) return 0.0;
            return 1.0;
    }
    return 0.0;
}

inline double weight_value(const MultiplicativeWeight& g, std::uint64_t n, const SpfTable& table) {
    return weight_value(g, factorize(n, table));
}

/// Offset logarithmic integral, the integral of dt/log t over [2, x],
/// by panel quadrature in s = log t (integrand e^s / s).
inline QuadratureResult log_integral(double x, const QuadratureSpec& spec = {}) {
    if (x < 2.0) throw std::invalid_argument("log_integral: x must be >= 2");
    const double a = std::log(2.0), b = std::log(x);
    return integrate_smooth([](double s) { return std::exp(s) / s; }, a, b,
                            static_cast<std::size_t>(std::ceil((b - a) * 4.0)) + 1, spec);
}

/// z_k(g) and y = sum z_k for one character order.
struct ClassWeights {
    std::uint32_t r = 1;
    std::vector<double> z;
    double y = 0.0;

    ClassWeights() = default;
    explicit ClassWeights(std::vector<double> zk) : r(static_cast<std::uint32_t>(zk.size())), z(std::move(zk)) {
        for (double v : z) y += v;
    }
    static ClassWeights uniform(std::uint32_t r, double y) { return ClassWeights(std::vector<double>(r, y / r)); }
};

struct ClassPrimeSums {
    std::uint32_t r = 1;
    std::vector<double> class_sums;  // sum of g(p) over p <= x with chi(p) = zeta^k
    double excluded = 0.0;           // sum of g(p) over p <= x, p | q
    double li = 0.0;                 // offset li(x); 0 when x < 2

    /// z_k estimated as class sum / li(x).
    ClassWeights estimate() const {
        std::vector<double> z(r, 0.0);
        if (li > 0.0)
            for (std::uint32_t k = 0; k < r; ++k) z[k] = class_sums[k] / li;
        return ClassWeights(std::move(z));
    }
};

inline ClassPrimeSums class_prime_sums(const DirichletCharacter& chi, const MultiplicativeWeight& g, double x,
                                       const SpfTable& table) {
    if (x > static_cast<double>(table.limit())) throw std::out_of_range("class_prime_sums: x exceeds table");
    ClassPrimeSums out;
    out.r = chi.order();
    out.class_sums.assign(out.r, 0.0);
    Factorization single;
    for (std::uint32_t p : table.primes()) {
        if (static_cast<double>(p) > x) break;
        single.factors.assign(1, {p, 1});
        const double gp = weight_value(g, single);
        const auto e = chi.evaluate(p);
        if (e.is_none())
            out.excluded += gp;
        else
            out.class_sums[e.value()] += gp;
    }
    out.li = x >= 2.0 ? log_integral(x).value : 0.0;
    return out;
}

}  // namespace ehd

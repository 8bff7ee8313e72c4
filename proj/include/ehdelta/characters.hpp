#pragma once

// Dirichlet characters mod q with exact values.
//
// A character value is stored as an exponent class k of the primitive r-th
// root of unity exp(2*pi*i/r), or NONE for residues sharing a factor with q.
// The group (Z/qZ)^x is split into cyclic components (a primitive root for
// every odd prime power, {+-1} x <5> for 2^a with a >= 3) and a character is
// the vector of generator images. All exponent arithmetic is integral.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehd {

inline constexpr std::uint64_t kDefaultModulusCap = 1'000'000;

/// Exponent k of zeta_r^k, or NONE (the character value 0).
class UnityExponent {
public:
    constexpr UnityExponent() = default;
    constexpr explicit UnityExponent(std::uint32_t k) : k_(static_cast<std::int64_t>(k)) {}

    static constexpr UnityExponent none() {
        UnityExponent e;
        e.k_ = -1;
        return e;
    }

    constexpr bool is_none() const { return k_ < 0; }
    constexpr std::uint32_t value() const {
        if (k_ < 0) throw std::logic_error("UnityExponent::value on NONE");
        return static_cast<std::uint32_t>(k_);
    }

    /// Product of the two unit values; NONE absorbs.
    static constexpr UnityExponent multiply(UnityExponent a, UnityExponent b, std::uint32_t r) {
        if (a.is_none() || b.is_none()) return none();
        return UnityExponent(static_cast<std::uint32_t>((a.value() + b.value()) % r));
    }

    friend constexpr bool operator==(UnityExponent, UnityExponent) = default;

private:
    std::int64_t k_ = 0;
};

/// zeta_r^k as a complex number; quarter turns are returned exactly.
inline std::complex<double> as_complex(UnityExponent e, std::uint32_t r) {
    if (e.is_none()) return {0.0, 0.0};
    const std::uint64_t k = e.value() % r;
    if ((4 * k) % r == 0) {
        switch ((4 * k) / r) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(r);
    return {std::cos(angle), std::sin(angle)};
}

namespace detail {

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> trial_factor(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        unsigned a = 0;
        while (n % p == 0) {
            n /= p;
            ++a;
        }
        out.emplace_back(p, a);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline std::uint64_t primitive_root_mod_prime(std::uint64_t p) {
    if (p == 2) return 1;
    const auto fac = trial_factor(p - 1);
    for (std::uint64_t g = 2;; ++g) {
        bool ok = true;
        for (auto [f, e] : fac) {
            (void)e;
            if (pow_mod(g, (p - 1) / f, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

}  // namespace detail

/// One cyclic factor of (Z/qZ)^x: residues mod `prime_power` have a discrete
/// log in [0, order) with respect to a fixed generator, or -1 for non-units.
struct CyclicComponent {
    std::uint64_t prime;
    std::uint64_t prime_power;
    std::uint32_t order;
    std::vector<std::int32_t> log;
};

/// Discrete-log structure of (Z/qZ)^x shared by all characters mod q.
class CharacterGroup {
public:
    explicit CharacterGroup(std::uint64_t q, std::uint64_t cap = kDefaultModulusCap) : q_(q) {
        if (q == 0 || q > cap)
            throw std::invalid_argument("modulus must satisfy 1 <= q <= " + std::to_string(cap));
        for (auto [p, a] : detail::trial_factor(q)) add_prime_power(p, a);
    }

    std::uint64_t modulus() const { return q_; }
    const std::vector<CyclicComponent>& components() const { return comps_; }
    /// True when 2 || q: (Z/2)^x is trivial and carries no component.
    bool exactly_two() const { return exactly_two_; }

    /// Number of characters, phi(q).
    std::uint64_t size() const {
        std::uint64_t s = 1;
        for (const auto& c : comps_) s *= c.order;
        return s;
    }

private:
    void add_prime_power(std::uint64_t p, unsigned a) {
        std::uint64_t pa = 1;
        for (unsigned i = 0; i < a; ++i) pa *= p;
        if (p == 2) {
            if (a == 1) {  // trivial group, but even residues are still non-units
                exactly_two_ = true;
                return;
            }
            // Sign component: a = (-1)^s * 5^k mod 2^a.
            CyclicComponent sign{2, pa, 2, std::vector<std::int32_t>(pa, -1)};
            for (std::uint64_t x = 1; x < pa; x += 2) sign.log[x] = (x % 4 == 1) ? 0 : 1;
            comps_.push_back(std::move(sign));
            if (a == 2) return;
            const auto ord5 = static_cast<std::uint32_t>(pa / 4);
            CyclicComponent five{2, pa, ord5, std::vector<std::int32_t>(pa, -1)};
            std::uint64_t g = 1;
            for (std::uint32_t k = 0; k < ord5; ++k) {
                five.log[g] = static_cast<std::int32_t>(k);
                five.log[pa - g] = static_cast<std::int32_t>(k);
                g = g * 5 % pa;
            }
            comps_.push_back(std::move(five));
            return;
        }
        std::uint64_t g = detail::primitive_root_mod_prime(p);
        if (a >= 2 && detail::pow_mod(g, p - 1, p * p) == 1) g += p;
        const std::uint64_t phi = pa / p * (p - 1);
        CyclicComponent c{p, pa, static_cast<std::uint32_t>(phi), std::vector<std::int32_t>(pa, -1)};
        std::uint64_t x = 1;
        for (std::uint64_t k = 0; k < phi; ++k) {
            c.log[x] = static_cast<std::int32_t>(k);
            x = x * g % pa;
        }
        comps_.push_back(std::move(c));
    }

    std::uint64_t q_;
    std::vector<CyclicComponent> comps_;
    bool exactly_two_ = false;
};

/// A Dirichlet character mod q, addressed by (q, index) where index is the
/// lexicographic position of its generator-image vector.
class DirichletCharacter {
public:
    DirichletCharacter(std::shared_ptr<const CharacterGroup> group, std::uint64_t index)
        : group_(std::move(group)), index_(index) {
        if (index >= group_->size()) throw std::invalid_argument("character index out of range");
        const auto& comps = group_->components();
        images_.assign(comps.size(), 0);
        std::uint64_t rest = index;
        for (std::size_t i = comps.size(); i-- > 0;) {
            images_[i] = static_cast<std::uint32_t>(rest % comps[i].order);
            rest /= comps[i].order;
        }
        order_ = 1;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::uint32_t m = comps[i].order;
            const std::uint32_t g = std::gcd(images_[i], m);
            order_ = std::lcm(order_, m / g);
        }
        weights_.resize(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::uint32_t m = comps[i].order;
            const std::uint32_t g = std::gcd(images_[i], m);
            // images_[i]/m == (images_[i]/g) / (m/g) and (m/g) divides order_.
            weights_[i] = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(images_[i] / g) * (order_ / (m / g))) % order_);
        }
    }

    std::uint64_t modulus() const { return group_->modulus(); }
    std::uint32_t order() const { return order_; }
    std::uint64_t index() const { return index_; }
    bool is_principal() const { return order_ == 1; }
    const std::vector<std::uint32_t>& generator_images() const { return images_; }
    const CharacterGroup& group() const { return *group_; }

    UnityExponent evaluate(std::uint64_t n) const {
        const std::uint64_t a = n % group_->modulus();
        if (group_->exactly_two() && a % 2 == 0) return UnityExponent::none();
        std::uint64_t k = 0;
        const auto& comps = group_->components();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::int32_t l = comps[i].log[a % comps[i].prime_power];
            if (l < 0) return UnityExponent::none();
            k += static_cast<std::uint64_t>(weights_[i]) * static_cast<std::uint64_t>(l) % order_;
        }
        return UnityExponent(static_cast<std::uint32_t>(k % order_));
    }

    std::complex<double> value(std::uint64_t n) const { return as_complex(evaluate(n), order_); }

    /// exponentTable: one entry per residue class 0..q-1.
    std::vector<UnityExponent> exponent_table() const {
        std::vector<UnityExponent> t;
        t.reserve(group_->modulus());
        for (std::uint64_t a = 0; a < group_->modulus(); ++a) t.push_back(evaluate(a));
        return t;
    }

    std::string label() const { return "char:" + std::to_string(modulus()) + ":" + std::to_string(index_); }

private:
    std::shared_ptr<const CharacterGroup> group_;
    std::uint64_t index_;
    std::vector<std::uint32_t> images_;
    std::vector<std::uint32_t> weights_;
    std::uint32_t order_ = 1;
};

inline std::vector<DirichletCharacter> enumerate_characters(std::uint64_t q,
                                                            std::uint64_t cap = kDefaultModulusCap) {
    auto group = std::make_shared<const CharacterGroup>(q, cap);
    std::vector<DirichletCharacter> out;
    const std::uint64_t count = group->size();
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.emplace_back(group, i);
    return out;
}

inline DirichletCharacter make_character(std::uint64_t q, std::uint64_t index,
                                         std::uint64_t cap = kDefaultModulusCap) {
    return DirichletCharacter(std::make_shared<const CharacterGroup>(q, cap), index);
}

inline UnityExponent evaluate(const DirichletCharacter& chi, std::uint64_t n) { return chi.evaluate(n); }

}  // namespace ehd

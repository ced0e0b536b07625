#pragma once

// Exact arithmetic in F_p for p < 2^62, primitive roots, discrete logarithms,
// multiplicative subgroups and e-th root extraction.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace powerprobe {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr u64 kMaxModulus = u64{1} << 62;

namespace zp {

inline u64 add(u64 a, u64 b, u64 p) {
    u64 s = a + b;
    return s >= p ? s - p : s;
}

inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 neg(u64 a, u64 p) { return a == 0 ? 0 : p - a; }

inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }

inline u64 pow(u64 base, u64 exp, u64 p) {
    u64 result = 1 % p;
    base %= p;
    while (exp != 0) {
        if (exp & 1) result = mul(result, base, p);
        base = mul(base, base, p);
        exp >>= 1;
    }
    return result;
}

inline u64 inv(u64 a, u64 p) {
    if (a % p == 0) throw std::domain_error("inverse of zero");
    // extended Euclid on signed 128-bit to stay exact near 2^62
    __int128 t = 0, new_t = 1;
    __int128 r = p, new_r = a % p;
    while (new_r != 0) {
        __int128 q = r / new_r;
        std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
        std::tie(r, new_r) = std::pair{new_r, r - q * new_r};
    }
    if (t < 0) t += p;
    return static_cast<u64>(t);
}

inline u64 div(u64 a, u64 b, u64 p) { return mul(a, inv(b, p), p); }

inline u64 reduce(std::int64_t v, u64 p) {
    std::int64_t r = v % static_cast<std::int64_t>(p);
    return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

}  // namespace zp

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % small == 0) return n == small;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        u64 x = zp::pow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = zp::mul(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Prime factors of n with multiplicity, ascending. Trial division.
inline std::vector<u64> factor_trial(u64 n) {
    std::vector<u64> out;
    for (u64 q = 2; q * q <= n; q += (q == 2 ? 1 : 2)) {
        while (n % q == 0) {
            out.push_back(q);
            n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// All positive divisors of n, ascending.
inline std::vector<u64> divisors(u64 n) {
    std::vector<u64> out{1};
    auto factors = factor_trial(n);
    std::size_t i = 0;
    while (i < factors.size()) {
        u64 q = factors[i];
        std::size_t mult = 0;
        while (i < factors.size() && factors[i] == q) {
            ++mult;
            ++i;
        }
        std::size_t base = out.size();
        u64 pw = 1;
        for (std::size_t k = 0; k < mult; ++k) {
            pw *= q;
            for (std::size_t j = 0; j < base; ++j) out.push_back(out[j] * pw);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest primitive root modulo a prime p. For p = 2 the group is trivial and 1 is returned.
inline u64 find_primitive_root(u64 p) {
    if (!is_prime(p)) throw std::domain_error("modulus " + std::to_string(p) + " is not prime");
    if (p == 2) return 1;
    auto factors = factor_trial(p - 1);
    factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
    for (u64 g = 2; g < p; ++g) {
        bool ok = std::all_of(factors.begin(), factors.end(),
                              [&](u64 r) { return zp::pow(g, (p - 1) / r, p) != 1; });
        if (ok) return g;
    }
    throw std::logic_error("no primitive root found");
}

/// Discrete logarithm normalized to [1, p-1], so that ind 1 = p-1.
struct IndexValue {
    u64 z = 0;
    friend bool operator==(const IndexValue&, const IndexValue&) = default;
};

/// The unique multiplicative subgroup of order e in F_p^*.
struct SubgroupSpec {
    u64 e = 1;
    u64 generator = 1;
};

/// Immutable arithmetic context for a prime field.
class PrimeField {
public:
    static constexpr u64 kTableLimit = u64{1} << 20;

    explicit PrimeField(u64 p) : p_(p) {
        if (p >= kMaxModulus) throw std::domain_error("modulus must be below 2^62");
        g_ = find_primitive_root(p);
        factors_ = p > 1 ? factor_trial(p - 1) : std::vector<u64>{};
        if (p < kTableLimit) build_full_table();
        else build_baby_steps();
    }

    u64 p() const { return p_; }
    u64 primitive_root() const { return g_; }
    u64 order() const { return p_ - 1; }
    const std::vector<u64>& factors() const { return factors_; }

    u64 add(u64 a, u64 b) const { return zp::add(a, b, p_); }
    u64 sub(u64 a, u64 b) const { return zp::sub(a, b, p_); }
    u64 neg(u64 a) const { return zp::neg(a, p_); }
    u64 mul(u64 a, u64 b) const { return zp::mul(a, b, p_); }
    u64 inv(u64 a) const { return zp::inv(a, p_); }
    u64 div(u64 a, u64 b) const { return zp::div(a, b, p_); }
    u64 pow(u64 a, u64 exp) const { return zp::pow(a, exp, p_); }
    u64 reduce(std::int64_t v) const { return zp::reduce(v, p_); }

    bool divides_order(u64 e) const { return e != 0 && (p_ - 1) % e == 0; }

    /// Index of x with respect to the primitive root, via table lookup or baby-step/giant-step.
    IndexValue discrete_log(u64 x) const {
        x %= p_;
        if (x == 0) throw std::domain_error("discrete log of zero");
        const u64 n = p_ - 1;
        if (!table_.empty()) {
            u64 z = table_[x];
            return {z == 0 ? n : z};
        }
        // giant step factor g^{-m}
        const u64 giant = pow(inv(g_), m_);
        u64 gamma = x;
        for (u64 i = 0; i <= n / m_ + 1; ++i) {
            auto it = baby_.find(gamma);
            if (it != baby_.end()) {
                u64 z = (i * m_ + it->second) % n;
                return {z == 0 ? n : z};
            }
            gamma = mul(gamma, giant);
        }
        throw std::logic_error("discrete log not found; primitive root invalid");
    }

    SubgroupSpec subgroup(u64 e) const {
        if (!divides_order(e)) {
            throw std::domain_error("e must divide p-1 (e=" + std::to_string(e) + ", p=" + std::to_string(p_) + ")");
        }
        return {e, pow(g_, (p_ - 1) / e)};
    }

    /// The e solutions of x^e = 1, sorted by value.
    std::vector<u64> subgroup_elements(u64 e) const {
        auto spec = subgroup(e);
        std::vector<u64> out;
        out.reserve(e);
        u64 x = 1;
        for (u64 i = 0; i < e; ++i) {
            out.push_back(x);
            x = mul(x, spec.generator);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool in_subgroup(u64 x, u64 e) const { return x % p_ != 0 && pow(x, e) == 1; }

    /// Solutions of x^e = A with n | ind x, sorted. e and n must divide p-1.
    ///
    /// Solves e * ind x = ind A (mod p-1): with t = gcd(e, p-1) = e there are
    /// either no solutions or e of them, spaced (p-1)/e apart in index.
    std::vector<u64> extract_roots(u64 a, u64 e, u64 n = 1, bool allow_zero = false) const {
        a %= p_;
        if (!divides_order(e)) throw std::domain_error("e must divide p-1");
        if (!divides_order(n)) throw std::domain_error("n must divide p-1");
        if (a == 0) {
            if (allow_zero && n == 1) return {0};
            throw std::domain_error("index of zero is undefined");
        }
        const u64 order = p_ - 1;
        const u64 ind_a = discrete_log(a).z % order;
        if (ind_a % e != 0) return {};
        const u64 step = order / e;
        const u64 base = ind_a / e;
        std::vector<u64> out;
        for (u64 k = 0; k < e; ++k) {
            u64 z = base + k * step;  // < order
            u64 ind = z == 0 ? order : z;
            if (ind % n != 0) continue;
            out.push_back(pow(g_, z));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Smallest k-th root of a in F_p, if any (k arbitrary positive).
    std::optional<u64> kth_root(u64 a, u64 k) const {
        a %= p_;
        if (a == 0) return 0;
        if (p_ == 2) return a;
        const u64 order = p_ - 1;
        const u64 ind_a = discrete_log(a).z % order;
        // k z = ind_a (mod order)
        u64 t = std::gcd(k, order);
        if (ind_a % t != 0) return std::nullopt;
        u64 mod = order / t;
        u64 kk = (k / t) % mod;
        u64 z0 = mod == 1 ? 0 : zp::mul(ind_a / t % mod, zp::inv(kk, mod), mod);
        u64 best = p_;
        for (u64 j = 0; j < t; ++j) best = std::min(best, pow(g_, z0 + j * mod));
        return best;
    }

private:
    void build_full_table() {
        if (p_ < 2) return;
        table_.assign(p_, 0);
        u64 x = 1;
        for (u64 z = 0; z + 1 < p_; ++z) {
            table_[x] = z;
            x = mul(x, g_);
        }
    }

    void build_baby_steps() {
        m_ = 1;
        while (m_ * m_ < p_ - 1) ++m_;
        baby_.reserve(m_ * 2);
        u64 x = 1;
        for (u64 j = 0; j < m_; ++j) {
            baby_.emplace(x, j);
            x = mul(x, g_);
        }
    }

    u64 p_;
    u64 g_ = 1;
    std::vector<u64> factors_;
    std::vector<u64> table_;
    std::unordered_map<u64, u64> baby_;
    u64 m_ = 0;
};

}  // namespace powerprobe

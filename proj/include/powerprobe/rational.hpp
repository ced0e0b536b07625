#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "powerprobe/field.hpp"
#include "powerprobe/poly.hpp"

namespace powerprobe {

/// num/den with gcd(num, den) = 1 and den monic.
class RationalFn {
public:
    RationalFn(Polynomial num, Polynomial den) {
        if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
        Polynomial g = gcd(num, den);
        if (g.degree() > 0) {
            num = num / g;
            den = den / g;
        }
        const u64 p = den.modulus();
        const u64 lead_inv = zp::inv(den.leading(), p);
        num_ = num.scale(lead_inv);
        den_ = den.scale(lead_inv);
    }
    explicit RationalFn(Polynomial num) : RationalFn(num, Polynomial::constant(num.modulus(), 1)) {}

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    u64 modulus() const { return den_.modulus(); }

    /// max(deg num, deg den); 0 for constants.
    int degree() const { return std::max(std::max(num_.degree(), 0), den_.degree()); }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }

    /// Value at x, or nullopt at a pole.
    std::optional<u64> eval(u64 x) const {
        u64 d = den_.eval(x);
        if (d == 0) return std::nullopt;
        return zp::div(num_.eval(x), d, modulus());
    }

    friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
        return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend bool operator==(const RationalFn& a, const RationalFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

    std::string to_string() const {
        if (den_.degree() == 0) return num_.to_string();
        return "(" + num_.to_string() + ") / (" + den_.to_string() + ")";
    }

private:
    Polynomial num_;
    Polynomial den_;
};

inline RationalFn pow(const RationalFn& f, u64 k) { return RationalFn(pow(f.num(), k), pow(f.den(), k)); }

struct PerfectPowerDecomposition {
    RationalFn root;
    u64 exponent = 1;
};

/// Writes psi = root^k with k maximal over F_p(X).
///
/// Every root multiplicity of num and den must be divisible by k, and the
/// leading-coefficient ratio must be a k-th power in F_p; the largest divisor
/// of the multiplicity gcd satisfying the latter is taken. Requires deg < p.
inline PerfectPowerDecomposition perfect_power_decompose(const RationalFn& psi, const PrimeField& field) {
    if (psi.is_constant()) throw std::domain_error("perfect-power test of a constant rational function");
    const u64 p = field.p();
    if (psi.modulus() != p) throw std::invalid_argument("field mismatch");
    const auto num_parts = square_free_decomposition(psi.num());
    const auto den_parts = square_free_decomposition(psi.den());
    u64 g = 0;
    for (const auto& [_, mult] : num_parts) g = std::gcd(g, mult);
    for (const auto& [_, mult] : den_parts) g = std::gcd(g, mult);
    const u64 lead = psi.num().leading();  // den is monic

    u64 k = 1;
    u64 lead_root = lead;
    for (u64 cand : divisors(g)) {
        if (auto r = field.kth_root(lead, cand)) {
            k = cand;
            lead_root = *r;
        }
    }
    Polynomial num = Polynomial::constant(p, lead_root);
    Polynomial den = Polynomial::constant(p, 1);
    for (const auto& [fac, mult] : num_parts) num *= pow(fac, mult / k);
    for (const auto& [fac, mult] : den_parts) den *= pow(fac, mult / k);
    return {RationalFn(num, den), k};
}

}  // namespace powerprobe

#pragma once

// Dense univariate polynomials over F_p, lowest degree first.

#include <algorithm>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "powerprobe/field.hpp"

namespace powerprobe {

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(u64 p) : p_(p) {}
    Polynomial(u64 p, std::vector<u64> coeffs) : p_(p), c_(std::move(coeffs)) {
        for (auto& x : c_) x %= p_;
        trim();
    }
    Polynomial(u64 p, std::initializer_list<u64> coeffs) : Polynomial(p, std::vector<u64>(coeffs)) {}

    static Polynomial constant(u64 p, u64 c) { return Polynomial(p, std::vector<u64>{c}); }
    static Polynomial x(u64 p) { return Polynomial(p, std::vector<u64>{0, 1}); }
    /// X - a
    static Polynomial linear_root(u64 p, u64 a) { return Polynomial(p, std::vector<u64>{zp::neg(a % p, p), 1}); }
    static Polynomial monomial(u64 p, u64 c, std::size_t deg) {
        std::vector<u64> v(deg + 1, 0);
        v[deg] = c;
        return Polynomial(p, std::move(v));
    }

    u64 modulus() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<u64>& coeffs() const { return c_; }
    u64 coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    u64 leading() const { return c_.empty() ? 0 : c_.back(); }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }
    bool is_constant() const { return c_.size() <= 1; }

    u64 operator()(u64 x) const { return eval(x); }

    /// Horner evaluation.
    u64 eval(u64 x) const {
        x %= p_;
        u64 acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = zp::add(zp::mul(acc, x, p_), *it, p_);
        return acc;
    }

    Polynomial monic() const {
        if (is_zero()) return *this;
        return scale(zp::inv(leading(), p_));
    }

    Polynomial scale(u64 s) const {
        std::vector<u64> v(c_);
        for (auto& x : v) x = zp::mul(x, s % p_, p_);
        return Polynomial(p_, std::move(v));
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial(p_);
        std::vector<u64> v(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = zp::mul(c_[i], i % p_, p_);
        return Polynomial(p_, std::move(v));
    }

    /// f(X + a), by Horner's scheme in the shifted variable.
    Polynomial shift(u64 a) const {
        Polynomial out(p_);
        const Polynomial lin(p_, std::vector<u64>{a % p_, 1});
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) out = out * lin + constant(p_, *it);
        return out;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        const u64 p = common(a, b);
        std::vector<u64> v(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = zp::add(a.coeff(i), b.coeff(i), p);
        return Polynomial(p, std::move(v));
    }

    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        const u64 p = common(a, b);
        std::vector<u64> v(std::max(a.c_.size(), b.c_.size()), 0);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = zp::sub(a.coeff(i), b.coeff(i), p);
        return Polynomial(p, std::move(v));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        const u64 p = common(a, b);
        if (a.is_zero() || b.is_zero()) return Polynomial(p);
        std::vector<u64> v(a.c_.size() + b.c_.size() - 1, 0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] = zp::add(v[i + j], zp::mul(a.c_[i], b.c_[j], p), p);
        }
        return Polynomial(p, std::move(v));
    }

    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.p_ == b.p_ && a.c_ == b.c_; }

    /// Lexicographic comparison on (degree, coefficients from the top), for deterministic ordering.
    friend bool operator<(const Polynomial& a, const Polynomial& b) {
        if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
        return std::lexicographical_compare(a.c_.rbegin(), a.c_.rend(), b.c_.rbegin(), b.c_.rend());
    }

    std::string to_string(char var = 'X') const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (int i = degree(); i >= 0; --i) {
            u64 c = c_[static_cast<std::size_t>(i)];
            if (c == 0) continue;
            if (!first) os << " + ";
            first = false;
            if (c != 1 || i == 0) os << c;
            if (i >= 1) os << var;
            if (i >= 2) os << '^' << i;
        }
        return os.str();
    }

private:
    static u64 common(const Polynomial& a, const Polynomial& b) {
        if (a.p_ != b.p_) throw std::invalid_argument("polynomials over different fields");
        return a.p_;
    }

    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    u64 p_ = 2;
    std::vector<u64> c_;
};

/// Quotient and remainder of a by b.
inline std::pair<Polynomial, Polynomial> divrem(const Polynomial& a, const Polynomial& b) {
    const u64 p = a.modulus();
    if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
    if (a.degree() < b.degree()) return {Polynomial(p), a};
    std::vector<u64> rem = a.coeffs();
    const auto& bc = b.coeffs();
    const std::size_t db = bc.size() - 1;
    const u64 lead_inv = zp::inv(b.leading(), p);
    std::vector<u64> quot(rem.size() - db, 0);
    for (std::size_t k = quot.size(); k-- > 0;) {
        u64 q = zp::mul(rem[k + db], lead_inv, p);
        quot[k] = q;
        if (q == 0) continue;
        for (std::size_t j = 0; j <= db; ++j) rem[k + j] = zp::sub(rem[k + j], zp::mul(q, bc[j], p), p);
    }
    rem.resize(db);
    return {Polynomial(p, std::move(quot)), Polynomial(p, std::move(rem))};
}

inline Polynomial operator/(const Polynomial& a, const Polynomial& b) { return divrem(a, b).first; }
inline Polynomial operator%(const Polynomial& a, const Polynomial& b) { return divrem(a, b).second; }

/// Monic gcd; gcd(0, 0) = 0.
inline Polynomial gcd(Polynomial a, Polynomial b) {
    while (!b.is_zero()) {
        Polynomial r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

inline Polynomial pow(const Polynomial& base, u64 k) {
    Polynomial result = Polynomial::constant(base.modulus(), 1);
    Polynomial b = base;
    while (k != 0) {
        if (k & 1) result *= b;
        b *= b;
        k >>= 1;
    }
    return result;
}

/// base^k mod m.
inline Polynomial powmod(const Polynomial& base, u64 k, const Polynomial& m) {
    Polynomial result = Polynomial::constant(base.modulus(), 1) % m;
    Polynomial b = base % m;
    while (k != 0) {
        if (k & 1) result = (result * b) % m;
        b = (b * b) % m;
        k >>= 1;
    }
    return result;
}

/// Resultant of a and b by the Euclidean algorithm, using their actual degrees.
/// Res(0, b) = 0; Res(c, b) = c^deg b for a nonzero constant c.
inline u64 resultant(Polynomial a, Polynomial b) {
    const u64 p = a.modulus();
    if (a.is_zero() || b.is_zero()) return 0;
    u64 acc = 1;
    while (true) {
        const int da = a.degree();
        const int db = b.degree();
        if (db == 0) return zp::mul(acc, zp::pow(b.leading(), static_cast<u64>(da), p), p);
        if (da == 0) return zp::mul(acc, zp::pow(a.leading(), static_cast<u64>(db), p), p);
        if (da < db) {
            // Res(a, b) = (-1)^{da db} Res(b, a)
            if ((da * db) % 2 == 1) acc = zp::neg(acc, p);
            std::swap(a, b);
            continue;
        }
        Polynomial r = a % b;
        if (r.is_zero()) return 0;
        // Res(a, b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r)
        const int dr = r.degree();
        if ((da * db) % 2 == 1) acc = zp::neg(acc, p);
        acc = zp::mul(acc, zp::pow(b.leading(), static_cast<u64>(da - dr), p), p);
        a = std::move(b);
        b = std::move(r);
    }
}

/// Roots of f in F_p, ascending. Distinct-root extraction through gcd(f, X^p - X) followed by
/// deterministic splitting with (X + delta)^((p-1)/2) - 1 for delta = 0, 1, 2, ...
inline std::vector<u64> roots(const Polynomial& f) {
    const u64 p = f.modulus();
    if (f.is_zero()) throw std::domain_error("roots of the zero polynomial");
    std::vector<u64> out;
    if (f.degree() <= 0) return out;
    if (p <= 64) {
        for (u64 x = 0; x < p; ++x)
            if (f.eval(x) == 0) out.push_back(x);
        return out;
    }
    const Polynomial X = Polynomial::x(p);
    Polynomial split = gcd(f, powmod(X, p, f) - X);
    std::vector<Polynomial> stack{split};
    while (!stack.empty()) {
        Polynomial h = std::move(stack.back());
        stack.pop_back();
        if (h.degree() <= 0) continue;
        if (h.degree() == 1) {
            out.push_back(zp::neg(h.monic().coeff(0), p));
            continue;
        }
        if (h.eval(0) == 0) {
            out.push_back(0);
            stack.push_back(h / X);
            continue;
        }
        for (u64 delta = 0;; ++delta) {
            Polynomial probe = powmod(Polynomial(p, std::vector<u64>{delta, 1}), (p - 1) / 2, h) -
                               Polynomial::constant(p, 1);
            Polynomial factor = gcd(h, probe);
            if (factor.degree() > 0 && factor.degree() < h.degree()) {
                stack.push_back(h / factor);
                stack.push_back(factor);
                break;
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Lagrange basis polynomial L_i on the nodes xs.
inline Polynomial lagrange_basis(u64 p, std::span<const u64> xs, std::size_t i) {
    Polynomial num = Polynomial::constant(p, 1);
    u64 den = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (j == i) continue;
        num *= Polynomial::linear_root(p, xs[j]);
        u64 diff = zp::sub(xs[i] % p, xs[j] % p, p);
        if (diff == 0) throw std::domain_error("interpolation nodes must be distinct");
        den = zp::mul(den, diff, p);
    }
    return num.scale(zp::inv(den, p));
}

struct Point {
    u64 x;
    u64 y;
};

/// The unique polynomial of degree < points.size() through all points.
inline Polynomial lagrange_interpolate(u64 p, std::span<const Point> points) {
    if (points.empty()) throw std::domain_error("interpolation needs at least one point");
    std::vector<u64> xs;
    xs.reserve(points.size());
    for (const auto& pt : points) xs.push_back(pt.x % p);
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::domain_error("interpolation nodes must be distinct");
    // Newton divided differences, then expand
    const std::size_t n = points.size();
    std::vector<u64> dd(n);
    for (std::size_t i = 0; i < n; ++i) dd[i] = points[i].y % p;
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = n - 1; i >= k; --i) {
            u64 num = zp::sub(dd[i], dd[i - 1], p);
            u64 den = zp::sub(xs[i], xs[i - k], p);
            dd[i] = zp::div(num, den, p);
        }
    }
    Polynomial result = Polynomial::constant(p, dd[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) result = result * Polynomial::linear_root(p, xs[k]) + Polynomial::constant(p, dd[k]);
    return result;
}

/// True iff gcd(f, f') is constant. Requires deg f < p.
inline bool is_square_free(const Polynomial& f) {
    if (f.is_zero()) throw std::domain_error("square-freeness of the zero polynomial");
    if (static_cast<u64>(f.degree()) >= f.modulus()) throw std::domain_error("square-free test needs deg f < p");
    return gcd(f, f.derivative()).degree() == 0;
}

/// Yun's square-free decomposition of a nonzero polynomial with deg f < p.
/// Returns (factor, multiplicity) pairs with monic, pairwise coprime, square-free factors;
/// f = lc(f) * prod factor^multiplicity.
inline std::vector<std::pair<Polynomial, u64>> square_free_decomposition(const Polynomial& f) {
    if (f.is_zero()) throw std::domain_error("decomposition of the zero polynomial");
    if (static_cast<u64>(f.degree()) >= f.modulus()) throw std::domain_error("square-free decomposition needs deg f < p");
    std::vector<std::pair<Polynomial, u64>> out;
    if (f.degree() == 0) return out;
    Polynomial a = f.monic();
    Polynomial b = gcd(a, a.derivative());
    Polynomial c = a / b;
    Polynomial d = a.derivative() / b - c.derivative();
    for (u64 i = 1; c.degree() > 0; ++i) {
        Polynomial y = gcd(c, d);
        if (y.degree() > 0) out.emplace_back(y, i);
        c = c / y;
        d = d / y - c.derivative();
    }
    return out;
}

}  // namespace powerprobe

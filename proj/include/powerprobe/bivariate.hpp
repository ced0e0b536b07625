#pragma once

// Bivariate polynomials in (U, V), the shifted resultant R_a(U, V) and
// detection of torsion divisors alpha U^m V^n + beta, alpha U^m + beta V^n.

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "powerprobe/field.hpp"
#include "powerprobe/poly.hpp"

namespace powerprobe {

class BivariatePoly {
public:
    BivariatePoly() = default;
    explicit BivariatePoly(u64 p) : p_(p) {}
    /// grid[i][j] is the coefficient of U^i V^j. Rows may be ragged.
    BivariatePoly(u64 p, std::vector<std::vector<u64>> grid) : p_(p), c_(std::move(grid)) { canonicalize(); }

    u64 modulus() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    int deg_u() const { return static_cast<int>(c_.size()) - 1; }
    int deg_v() const { return c_.empty() ? -1 : static_cast<int>(c_.front().size()) - 1; }
    u64 coeff(std::size_t i, std::size_t j) const {
        return i < c_.size() && j < c_[i].size() ? c_[i][j] : 0;
    }
    const std::vector<std::vector<u64>>& grid() const { return c_; }

    /// Total degree; -1 for zero.
    int total_degree() const {
        int best = -1;
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < c_[i].size(); ++j)
                if (c_[i][j] != 0) best = std::max(best, static_cast<int>(i + j));
        return best;
    }

    u64 eval(u64 u, u64 v) const {
        u64 acc = 0;
        for (auto row = c_.rbegin(); row != c_.rend(); ++row) {
            u64 inner = 0;
            for (auto it = row->rbegin(); it != row->rend(); ++it) inner = zp::add(zp::mul(inner, v, p_), *it, p_);
            acc = zp::add(zp::mul(acc, u, p_), inner, p_);
        }
        return acc;
    }

    /// F(u, V) as a polynomial in V.
    Polynomial at_u(u64 u) const {
        std::vector<u64> out(static_cast<std::size_t>(std::max(deg_v() + 1, 0)), 0);
        u64 upow = 1;
        for (const auto& row : c_) {
            for (std::size_t j = 0; j < row.size(); ++j) out[j] = zp::add(out[j], zp::mul(upow, row[j], p_), p_);
            upow = zp::mul(upow, u, p_);
        }
        return Polynomial(p_, std::move(out));
    }

    BivariatePoly scale(u64 s) const {
        auto g = c_;
        for (auto& row : g)
            for (auto& x : row) x = zp::mul(x, s, p_);
        return BivariatePoly(p_, std::move(g));
    }

    friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) { return a.p_ == b.p_ && a.c_ == b.c_; }

    friend BivariatePoly operator*(const BivariatePoly& a, const BivariatePoly& b) {
        if (a.is_zero() || b.is_zero()) return BivariatePoly(a.p_);
        const u64 p = a.p_;
        std::vector<std::vector<u64>> g(a.c_.size() + b.c_.size() - 1,
                                        std::vector<u64>(static_cast<std::size_t>(a.deg_v() + b.deg_v() + 1), 0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < a.c_[i].size(); ++j) {
                if (a.c_[i][j] == 0) continue;
                for (std::size_t k = 0; k < b.c_.size(); ++k)
                    for (std::size_t l = 0; l < b.c_[k].size(); ++l)
                        g[i + k][j + l] = zp::add(g[i + k][j + l], zp::mul(a.c_[i][j], b.c_[k][l], p), p);
            }
        return BivariatePoly(p, std::move(g));
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (int i = deg_u(); i >= 0; --i)
            for (int j = deg_v(); j >= 0; --j) {
                u64 c = coeff(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                if (c == 0) continue;
                if (!first) os << " + ";
                first = false;
                if (c != 1 || (i == 0 && j == 0)) os << c;
                if (i >= 1) os << 'U' << (i >= 2 ? "^" + std::to_string(i) : "");
                if (j >= 1) os << 'V' << (j >= 2 ? "^" + std::to_string(j) : "");
            }
        return os.str();
    }

private:
    void canonicalize() {
        for (auto& row : c_)
            for (auto& x : row) x %= p_;
        std::size_t width = 0;
        for (const auto& row : c_)
            for (std::size_t j = 0; j < row.size(); ++j)
                if (row[j] != 0) width = std::max(width, j + 1);
        for (auto& row : c_) row.resize(width, 0);
        while (!c_.empty() && std::all_of(c_.back().begin(), c_.back().end(), [](u64 x) { return x == 0; }))
            c_.pop_back();
        if (width == 0) c_.clear();
    }

    u64 p_ = 2;
    std::vector<std::vector<u64>> c_;
};

/// Determinant of a square matrix over F_p by Gaussian elimination.
inline u64 determinant(std::vector<std::vector<u64>> m, u64 p) {
    const std::size_t n = m.size();
    u64 det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = zp::neg(det, p);
        }
        det = zp::mul(det, m[col][col], p);
        const u64 inv = zp::inv(m[col][col], p);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            const u64 factor = zp::mul(m[r][col], inv, p);
            for (std::size_t c = col; c < n; ++c) m[r][c] = zp::sub(m[r][c], zp::mul(factor, m[col][c], p), p);
        }
    }
    return det;
}

/// Sylvester resultant of a and b taken with formal degrees da >= deg a and db >= deg b.
inline u64 sylvester_resultant(const Polynomial& a, std::size_t da, const Polynomial& b, std::size_t db) {
    const u64 p = a.modulus();
    const std::size_t n = da + db;
    if (n == 0) return 1;
    std::vector<std::vector<u64>> m(n, std::vector<u64>(n, 0));
    for (std::size_t r = 0; r < db; ++r)
        for (std::size_t k = 0; k <= da; ++k) m[r][r + k] = a.coeff(da - k);
    for (std::size_t r = 0; r < da; ++r)
        for (std::size_t k = 0; k <= db; ++k) m[db + r][r + k] = b.coeff(db - k);
    return determinant(std::move(m), p);
}

class ResultantVanishes : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// R_a(U, V) = Res_X(f(X) - U g(X), f(X + a) - V g(X + a)).
///
/// Both arguments are taken with formal degree D = max(deg f, deg g), so the
/// result specializes correctly even where a leading coefficient vanishes.
/// Reconstructed from its values on a (D+1) x (D+1) grid; requires p > (D+1)^2.
/// Throws ResultantVanishes when R_a is identically zero.
inline BivariatePoly resultant_shifted(const Polynomial& f, const Polynomial& g, u64 a) {
    const u64 p = f.modulus();
    if (g.modulus() != p) throw std::invalid_argument("field mismatch");
    a %= p;
    if (a == 0) throw std::domain_error("shift a must be nonzero");
    const int dmax = std::max(f.degree(), g.degree());
    if (dmax <= 0) throw std::domain_error("f and g must not both be constant");
    const auto D = static_cast<std::size_t>(dmax);
    if (static_cast<u128>(D + 1) * (D + 1) >= p) throw std::domain_error("resultant interpolation requires p > (D+1)^2");

    const Polynomial fs = f.shift(a);
    const Polynomial gs = g.shift(a);
    std::vector<u64> nodes(D + 1);
    for (std::size_t i = 0; i <= D; ++i) nodes[i] = i;

    // rows[i] = R(u_i, V) as a polynomial in V
    std::vector<Polynomial> rows;
    rows.reserve(D + 1);
    for (u64 u : nodes) {
        const Polynomial left = f - g.scale(u);
        std::vector<Point> pts;
        pts.reserve(D + 1);
        for (u64 v : nodes) {
            const Polynomial right = fs - gs.scale(v);
            pts.push_back({v, sylvester_resultant(left, D, right, D)});
        }
        rows.push_back(lagrange_interpolate(p, pts));
    }
    std::vector<std::vector<u64>> grid(D + 1, std::vector<u64>(D + 1, 0));
    for (std::size_t j = 0; j <= D; ++j) {
        std::vector<Point> pts;
        pts.reserve(D + 1);
        for (std::size_t i = 0; i <= D; ++i) pts.push_back({nodes[i], rows[i].coeff(j)});
        const Polynomial col = lagrange_interpolate(p, pts);
        for (std::size_t i = 0; i <= D; ++i) grid[i][j] = col.coeff(i);
    }
    BivariatePoly out(p, std::move(grid));
    if (out.is_zero()) throw ResultantVanishes("R_a vanishes identically: the shifted pair shares a factor for all (U, V)");
    return out;
}

/// alpha U^m V^n + beta (Monomial) or alpha U^m + beta V^n (Binomial).
struct TorsionWitness {
    enum class Shape { Monomial, Binomial };
    Shape shape = Shape::Monomial;
    int m = 0;
    int n = 0;
    u64 alpha = 1;
    u64 beta = 1;

    BivariatePoly polynomial(u64 p) const {
        std::vector<std::vector<u64>> g(static_cast<std::size_t>(m + 1), std::vector<u64>(static_cast<std::size_t>(n + 1), 0));
        if (shape == Shape::Monomial) {
            g[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = alpha;
            g[0][0] = zp::add(g[0][0], beta, p);
        } else {
            g[static_cast<std::size_t>(m)][0] = alpha;
            g[0][static_cast<std::size_t>(n)] = zp::add(g[0][static_cast<std::size_t>(n)], beta, p);
        }
        return BivariatePoly(p, std::move(g));
    }
};

namespace detail {

/// Rewrites every monomial of F modulo the leading term of the torsion shape
/// with unknown constant c (U^m V^n -> -c, resp. U^m -> -c V^n). Each residual
/// monomial collects a polynomial in (-c); T divides F iff all of them vanish at c.
inline std::map<std::pair<int, int>, std::vector<u64>> torsion_residuals(const BivariatePoly& F,
                                                                        TorsionWitness::Shape shape, int m, int n) {
    std::map<std::pair<int, int>, std::vector<u64>> groups;
    for (int i = 0; i <= F.deg_u(); ++i)
        for (int j = 0; j <= F.deg_v(); ++j) {
            const u64 c = F.coeff(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (c == 0) continue;
            int k = 0;
            std::pair<int, int> residual;
            if (shape == TorsionWitness::Shape::Monomial) {
                const int ku = m == 0 ? j / n : i / m;
                const int kv = n == 0 ? ku : j / n;
                k = std::min(ku, kv);
                residual = {i - k * m, j - k * n};
            } else {
                k = i / m;
                residual = {i - k * m, j + k * n};
            }
            auto& poly = groups[residual];
            if (poly.size() <= static_cast<std::size_t>(k)) poly.resize(static_cast<std::size_t>(k) + 1, 0);
            poly[static_cast<std::size_t>(k)] = zp::add(poly[static_cast<std::size_t>(k)], c, F.modulus());
        }
    return groups;
}

}  // namespace detail

/// Remainder of F on division by the torsion polynomial w (lex order, U > V).
inline BivariatePoly torsion_remainder(const BivariatePoly& F, const TorsionWitness& w) {
    const u64 p = F.modulus();
    const u64 c = zp::div(w.beta, w.alpha, p);
    const u64 minus_c = zp::neg(c, p);
    std::map<std::pair<int, int>, u64> rem;
    for (const auto& [residual, poly] : detail::torsion_residuals(F, w.shape, w.m, w.n)) {
        u64 acc = 0;
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = zp::add(zp::mul(acc, minus_c, p), *it, p);
        if (acc != 0) rem[residual] = acc;
    }
    int du = 0, dv = 0;
    for (const auto& [mono, _] : rem) {
        du = std::max(du, mono.first);
        dv = std::max(dv, mono.second);
    }
    std::vector<std::vector<u64>> g(static_cast<std::size_t>(du + 1), std::vector<u64>(static_cast<std::size_t>(dv + 1), 0));
    for (const auto& [mono, val] : rem) g[static_cast<std::size_t>(mono.first)][static_cast<std::size_t>(mono.second)] = val;
    return BivariatePoly(p, std::move(g));
}

/// Searches all torsion shapes with m <= deg_U F and n <= deg_V F for a divisor
/// of F over F_p. Returns the first witness (alpha = 1) in search order, or nullopt.
inline std::optional<TorsionWitness> divisible_by_torsion(const BivariatePoly& F) {
    if (F.is_zero()) throw std::domain_error("torsion test of the zero polynomial");
    const u64 p = F.modulus();
    auto try_shape = [&](TorsionWitness::Shape shape, int m, int n) -> std::optional<TorsionWitness> {
        Polynomial common(p);
        for (const auto& [_, poly] : detail::torsion_residuals(F, shape, m, n)) {
            common = gcd(common, Polynomial(p, poly));
            if (common.degree() == 0) return std::nullopt;
        }
        // the group polynomials are in t = -c
        for (u64 t : roots(common)) {
            if (t == 0) continue;
            TorsionWitness w{shape, m, n, 1, zp::neg(t, p)};
            if (torsion_remainder(F, w).is_zero()) return w;
        }
        return std::nullopt;
    };
    for (int m = 0; m <= F.deg_u(); ++m)
        for (int n = 0; n <= F.deg_v(); ++n) {
            if (m == 0 && n == 0) continue;
            if (auto w = try_shape(TorsionWitness::Shape::Monomial, m, n)) return w;
        }
    for (int m = 1; m <= F.deg_u(); ++m)
        for (int n = 1; n <= F.deg_v(); ++n)
            if (auto w = try_shape(TorsionWitness::Shape::Binomial, m, n)) return w;
    return std::nullopt;
}

}  // namespace powerprobe

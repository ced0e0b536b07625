#pragma once

// Identity testing and interpolation of hidden monic polynomials from
// oracles returning f(x)^e.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "powerprobe/field.hpp"
#include "powerprobe/oracle.hpp"
#include "powerprobe/poly.hpp"

namespace powerprobe {

class WindowEmpty : public std::domain_error {
public:
    WindowEmpty() : std::domain_error("window empty; increase c1 or shrink e") {}
};

class InconsistentOracle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndistinguishableCandidates : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DishonestOracle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// max{d^3 e^2 / p, d^{7/3} e^{2/3}}, the common shape of the window and of the query bounds.
inline double window_shape(u64 p, u64 e, u64 d) {
    const long double dd = static_cast<long double>(d);
    const long double ee = static_cast<long double>(e);
    const long double first = dd * dd * dd * ee * ee / static_cast<long double>(p);
    const long double second = std::cbrt(std::pow(dd, 7.0L) * ee * ee);
    return static_cast<double>(std::max(first, second));
}

struct WindowParams {
    u64 H = 0;
    double c1 = 1.0;
    u64 cap = 0;
    /// e <= c1 min{p d^{-3/2}, p^{3/2} d^{-7/2}}
    bool condition_holds = false;
};

inline WindowParams compute_window(u64 p, u64 e, u64 d, double c1 = 1.0) {
    if (e == 0 || (p - 1) % e != 0) throw std::domain_error("e must divide p-1");
    if (d < 1) throw std::domain_error("degree d must be at least 1");
    if (!(c1 >= 0.0)) throw std::domain_error("c1 must be nonnegative");
    WindowParams w;
    w.c1 = c1;
    w.cap = p - 1;
    // the relative slack absorbs rounding in cbrt when the product is an exact integer
    const long double raw = static_cast<long double>(c1) * window_shape(p, e, d);
    const long double floored = std::floor(raw * (1.0L + 1e-12L));
    w.H = floored >= static_cast<long double>(w.cap) ? w.cap : static_cast<u64>(floored);
    const long double dd = static_cast<long double>(d);
    const long double pp = static_cast<long double>(p);
    const long double limit = c1 * std::min(pp * std::pow(dd, -1.5L), std::pow(pp, 1.5L) * std::pow(dd, -3.5L));
    w.condition_holds = static_cast<long double>(e) <= limit;
    if (w.H == 0) throw WindowEmpty();
    return w;
}

struct IdentityVerdict {
    enum class Kind { Different, IndistinguishableOnWindow };
    Kind kind = Kind::IndistinguishableOnWindow;
    std::optional<u64> witness;
    /// Oracle calls made by this run, over both oracles.
    std::size_t queries = 0;

    bool different() const { return kind == Kind::Different; }
};

/// Queries x = 1..H on both oracles and stops at the first disagreement.
inline IdentityVerdict identity_test(PowerOracle& oracle_f, PowerOracle& oracle_g, const WindowParams& window) {
    if (oracle_f.modulus() != oracle_g.modulus() || oracle_f.exponent() != oracle_g.exponent())
        throw std::invalid_argument("identity test needs oracles over the same (p, e)");
    IdentityVerdict verdict;
    for (u64 x = 1; x <= window.H; ++x) {
        const u64 a = oracle_f.query(x);
        const u64 b = oracle_g.query(x);
        verdict.queries += 2;
        if (a != b) {
            verdict.kind = IdentityVerdict::Kind::Different;
            verdict.witness = x;
            return verdict;
        }
    }
    return verdict;
}

/// Floor of the k-th root of n.
inline u64 integer_root(u64 n, u64 k) {
    if (k == 1 || n <= 1) return n;
    u64 r = static_cast<u64>(std::pow(static_cast<long double>(n), 1.0L / static_cast<long double>(k)));
    auto pow_le = [&](u64 base) {
        u128 acc = 1;
        for (u64 i = 0; i < k; ++i) {
            acc *= base;
            if (acc > n) return false;
        }
        return true;
    };
    while (r > 0 && !pow_le(r)) --r;
    while (pow_le(r + 1)) ++r;
    return r;
}

/// p >= (2m floor(e^{1/(2m+1)}) + 2m + 2) e
inline bool shifted_subgroup_condition(u64 p, u64 e, u64 m) {
    const u128 lhs = (static_cast<u128>(2 * m) * integer_root(e, 2 * m + 1) + 2 * m + 2) * e;
    return static_cast<u128>(p) >= lhs;
}

/// Smallest m in [1, cap] satisfying the shifted-subgroup condition.
inline u64 choose_filter_m(u64 p, u64 e, u64 cap = 64) {
    for (u64 m = 1; m <= cap; ++m)
        if (shifted_subgroup_condition(p, e, m)) return m;
    throw std::domain_error("no m <= " + std::to_string(cap) + " satisfies p >= (2m floor(e^(1/(2m+1))) + 2m + 2) e");
}

/// One pair (x, x + h) of step 1 with its admissible ratio set.
struct RatioBlock {
    u64 x = 0;
    std::vector<u64> ratios;
};

struct Step1Result {
    /// A_x for every queried x.
    std::map<u64, u64> answers;
    /// Inputs where the oracle answered 0; each is a root of f.
    std::vector<u64> zeros;
    /// Degree of the cofactor g = f / prod (X - zero).
    u64 reduced_degree = 0;
    u64 h = 0;
    /// 2 * reduced_degree pairs sharing the shift h, for the cofactor.
    std::vector<RatioBlock> blocks;
};

/// Number of step-1 inputs minus one: (2d-1) n^2 + n.
inline u64 step1_last_input(u64 d, u64 n) { return (2 * d - 1) * n * n + n; }

/// Queries x = 0..(2d-1)n^2+n. Zero answers are divided out as known roots;
/// among the root-free blocks [in, (i+1)n], i = 0..(2d-1)n, finds 2d' blocks
/// with a common shift h whose ratio A_x / A_{x+h} has an e-th root of index
/// divisible by n. Requires n | (p-1)/e so that this test is exact.
inline Step1Result step1_collect(PowerOracle& oracle, const PrimeField& field, u64 d, u64 n) {
    const u64 p = field.p();
    const u64 e = oracle.exponent();
    if (field.p() != oracle.modulus()) throw std::invalid_argument("field mismatch");
    if (d < 1) throw std::domain_error("degree d must be at least 1");
    if (n == 0 || ((p - 1) / e) % n != 0) throw std::domain_error("n must divide (p-1)/e");
    const u64 last = step1_last_input(d, n);
    if (last >= p) throw std::domain_error("step 1 needs (2d-1)n^2+n < p");

    Step1Result out;
    for (u64 x = 0; x <= last; ++x) {
        const u64 a = oracle.query(x);
        out.answers[x] = a;
        if (a == 0) out.zeros.push_back(x);
    }
    if (out.zeros.size() > d) throw InconsistentOracle("oracle reports more zeros than the degree allows");
    out.reduced_degree = d - out.zeros.size();
    if (out.reduced_degree == 0) return out;

    // answers of the cofactor: A_x / prod (x - y)^e
    auto reduced = [&](u64 x) {
        u64 den = 1;
        for (u64 y : out.zeros) den = field.mul(den, field.pow(field.sub(x, y), e));
        return field.div(out.answers.at(x), den);
    };
    std::set<u64> zero_set(out.zeros.begin(), out.zeros.end());
    auto block_clean = [&](u64 i) {
        auto it = zero_set.lower_bound(i * n);
        return it == zero_set.end() || *it > (i + 1) * n;
    };

    const u64 need = 2 * out.reduced_degree;
    const u64 block_count = (2 * d - 1) * n + 1;
    for (u64 h = 1; h <= n; ++h) {
        std::vector<RatioBlock> found;
        for (u64 i = 0; i < block_count && found.size() < need; ++i) {
            if (!block_clean(i)) continue;
            for (u64 x = i * n; x + h <= (i + 1) * n; ++x) {
                const u64 ratio = field.div(reduced(x), reduced(x + h));
                auto roots = field.extract_roots(ratio, e, n);
                if (!roots.empty()) {
                    found.push_back({x, std::move(roots)});
                    break;
                }
            }
        }
        if (found.size() == need) {
            out.h = h;
            out.blocks = std::move(found);
            return out;
        }
    }
    throw DishonestOracle("no shift h in [1, n] is shared by enough blocks");
}

struct Candidate {
    Polynomial poly;
    std::string provenance;
};

/// Deduplicated monic candidates, in discovery order.
class CandidateSet {
public:
    bool insert(Polynomial poly, std::string provenance) {
        if (!seen_.insert(poly.coeffs()).second) return false;
        items_.push_back({std::move(poly), std::move(provenance)});
        return true;
    }
    bool contains(const Polynomial& poly) const { return seen_.count(poly.coeffs()) != 0; }
    const std::vector<Candidate>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

private:
    std::vector<Candidate> items_;
    std::set<std::vector<u64>> seen_;
};

/// Tally of the rank dichotomy: extending a system by one ratio row keeps the
/// rank either for every ratio value or for at most one of them.
struct RankStats {
    std::size_t extensions = 0;
    std::size_t violations = 0;
};

namespace detail {

/// Incrementally reduced row basis with unit pivots.
class RowBasis {
public:
    explicit RowBasis(u64 p) : p_(p) {}

    std::size_t rank() const { return rows_.size(); }

    std::vector<u64> reduce(std::vector<u64> v) const {
        for (const auto& [row, pivot] : rows_) {
            const u64 c = v[pivot];
            if (c == 0) continue;
            for (std::size_t k = 0; k < v.size(); ++k) v[k] = zp::sub(v[k], zp::mul(c, row[k], p_), p_);
        }
        return v;
    }

    /// Adds v if it is independent; returns whether the rank grew.
    bool add(const std::vector<u64>& v) {
        auto r = reduce(v);
        auto it = std::find_if(r.begin(), r.end(), [](u64 x) { return x != 0; });
        if (it == r.end()) return false;
        const auto pivot = static_cast<std::size_t>(it - r.begin());
        const u64 inv = zp::inv(r[pivot], p_);
        for (auto& x : r) x = zp::mul(x, inv, p_);
        for (auto& [row, _] : rows_) {
            const u64 c = row[pivot];
            if (c == 0) continue;
            for (std::size_t k = 0; k < row.size(); ++k) row[k] = zp::sub(row[k], zp::mul(c, r[k], p_), p_);
        }
        rows_.emplace_back(std::move(r), pivot);
        return true;
    }

private:
    u64 p_;
    std::vector<std::pair<std::vector<u64>, std::size_t>> rows_;
};

inline bool all_zero(const std::vector<u64>& v) {
    return std::all_of(v.begin(), v.end(), [](u64 x) { return x == 0; });
}

/// Solves the square system rows * f = rhs; nullopt if singular.
inline std::optional<std::vector<u64>> solve_square(std::vector<std::vector<u64>> a, std::vector<u64> b, u64 p) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        const u64 inv = zp::inv(a[col][col], p);
        for (std::size_t k = col; k < n; ++k) a[col][k] = zp::mul(a[col][k], inv, p);
        b[col] = zp::mul(b[col], inv, p);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const u64 c = a[r][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] = zp::sub(a[r][k], zp::mul(c, a[col][k], p), p);
            b[r] = zp::sub(b[r], zp::mul(c, b[col], p), p);
        }
    }
    return b;
}

}  // namespace detail

/// Coefficient row of f(x) - y f(x+h) = 0 in the unknowns f_0..f_{d-1} of a
/// monic degree-d f: entries y (x+h)^k - x^k, right-hand side x^d - y (x+h)^d.
struct RatioRow {
    std::vector<u64> coeffs;
    u64 rhs = 0;
};

inline RatioRow ratio_row(u64 x, u64 h, u64 y, u64 d, u64 p) {
    RatioRow row;
    row.coeffs.resize(d);
    const u64 xh = zp::add(x % p, h % p, p);
    u64 px = 1, pxh = 1;
    for (u64 k = 0; k < d; ++k) {
        row.coeffs[k] = zp::sub(zp::mul(y, pxh, p), px, p);
        px = zp::mul(px, x, p);
        pxh = zp::mul(pxh, xh, p);
    }
    row.rhs = zp::sub(px, zp::mul(y, pxh, p), p);
    return row;
}

/// Every monic degree-d f with f(x_i) / f(x_i + h) in ratios_i for a consistent
/// selection of pairs. Backtracks over the blocks in order; at each block either
/// a ratio is fixed as a new independent row, or the block is skipped, which is
/// only needed when the block's unique rank-preserving ratio is admissible.
inline CandidateSet step2_candidates(const std::vector<RatioBlock>& blocks, u64 h, u64 d, u64 p,
                                     RankStats* stats = nullptr) {
    CandidateSet out;
    if (d == 0) throw std::domain_error("step 2 needs degree at least 1");

    struct Chosen {
        std::size_t block;
        u64 y;
        RatioRow row;
    };
    std::vector<Chosen> chosen;
    detail::RowBasis basis(p);

    std::function<void(std::size_t, const detail::RowBasis&)> search = [&](std::size_t idx, const detail::RowBasis& b) {
        if (b.rank() == d) {
            std::vector<std::vector<u64>> a;
            std::vector<u64> rhs;
            for (const auto& c : chosen) {
                a.push_back(c.row.coeffs);
                rhs.push_back(c.row.rhs);
            }
            auto sol = detail::solve_square(std::move(a), std::move(rhs), p);
            if (!sol) throw std::logic_error("independent rows produced a singular system");
            sol->push_back(1);
            std::ostringstream prov;
            prov << "h=" << h;
            for (const auto& c : chosen) prov << " x=" << blocks[c.block].x << ":y=" << c.y;
            out.insert(Polynomial(p, std::move(*sol)), prov.str());
            return;
        }
        if (idx == blocks.size() || blocks.size() - idx < d - b.rank()) return;

        const auto& blk = blocks[idx];
        // row(y) = y * a - b with a = ((x+h)^k), b = (x^k); reduction is linear in y
        const auto ra = b.reduce(ratio_row(blk.x, h, 1, d, p).coeffs);
        const auto r0 = b.reduce(ratio_row(blk.x, h, 0, d, p).coeffs);  // = -b reduced
        bool all_preserve = false;
        std::optional<u64> singular;
        {
            std::vector<u64> a_res(d), b_res(d);
            for (u64 k = 0; k < d; ++k) {
                a_res[k] = zp::sub(ra[k], r0[k], p);
                b_res[k] = zp::neg(r0[k], p);
            }
            if (detail::all_zero(a_res)) {
                all_preserve = detail::all_zero(b_res);
            } else {
                const auto k = static_cast<std::size_t>(
                    std::find_if(a_res.begin(), a_res.end(), [](u64 v) { return v != 0; }) - a_res.begin());
                const u64 y0 = zp::div(b_res[k], a_res[k], p);
                bool proportional = true;
                for (u64 j = 0; j < d; ++j)
                    if (zp::mul(y0, a_res[j], p) != b_res[j]) proportional = false;
                if (proportional) singular = y0;
            }
        }

        std::size_t preserving = 0;
        std::vector<RatioRow> rows;
        std::vector<bool> grows;
        for (u64 y : blk.ratios) {
            rows.push_back(ratio_row(blk.x, h, y, d, p));
            const bool g = !detail::all_zero(b.reduce(rows.back().coeffs));
            grows.push_back(g);
            if (!g) ++preserving;
            const bool predicted_preserve = all_preserve || (singular && *singular == y);
            if (stats && predicted_preserve == g) ++stats->violations;
        }
        if (stats) {
            ++stats->extensions;
            if (!(preserving == blk.ratios.size() || preserving <= 1)) ++stats->violations;
        }

        if (all_preserve) {
            search(idx + 1, b);
            return;
        }
        for (std::size_t i = 0; i < blk.ratios.size(); ++i) {
            if (!grows[i]) continue;
            detail::RowBasis next = b;
            next.add(rows[i].coeffs);
            chosen.push_back({idx, blk.ratios[i], rows[i]});
            search(idx + 1, next);
            chosen.pop_back();
        }
        if (singular && std::binary_search(blk.ratios.begin(), blk.ratios.end(), *singular)) search(idx + 1, b);
    };
    search(0, basis);
    return out;
}

struct InterpolationParams {
    u64 n = 1;
    double c1 = 1.0;
    u64 m_cap = 64;
};

struct Step3Result {
    Polynomial recovered;
    u64 m = 0;
    std::size_t passed_filter = 0;
    std::size_t square_free = 0;
    std::size_t survivors = 0;
    std::size_t identity_runs = 0;
};

/// Keeps candidates consistent with A_x on x = 0..d(m-1)+1, drops the
/// non-square-free ones and confirms each remaining one with the identity
/// test against a simulated oracle. Exactly one survivor is required.
inline Step3Result step3_filter(const CandidateSet& candidates, PowerOracle& oracle_f, u64 d,
                                const WindowParams& window, u64 m_cap = 64) {
    const u64 p = oracle_f.modulus();
    const u64 e = oracle_f.exponent();
    Step3Result res;
    res.m = choose_filter_m(p, e, m_cap);
    const u64 last = d * (res.m - 1) + 1;
    if (last >= p) throw std::domain_error("filter inputs exceed the field");

    std::vector<Polynomial> ordered;
    for (const auto& c : candidates.items()) ordered.push_back(c.poly);
    std::sort(ordered.begin(), ordered.end());

    std::vector<Polynomial> survivors;
    for (const auto& g : ordered) {
        bool consistent = true;
        for (u64 x = 0; x <= last && consistent; ++x)
            consistent = zp::pow(g.eval(x), e, p) == oracle_f.query(x);
        if (!consistent) continue;
        ++res.passed_filter;
        if (!is_square_free(g)) continue;
        ++res.square_free;
        LocalOracle simulated(g, e);
        ++res.identity_runs;
        if (!identity_test(oracle_f, simulated, window).different()) survivors.push_back(g);
    }
    res.survivors = survivors.size();
    if (survivors.empty()) throw InconsistentOracle("inconsistent oracle: no candidate survives filtering");
    if (survivors.size() > 1) {
        std::string msg = "indistinguishable candidates:";
        for (const auto& s : survivors) msg += " [" + s.to_string() + "]";
        throw IndistinguishableCandidates(msg);
    }
    res.recovered = survivors.front();
    return res;
}

struct InterpolationResult {
    Polynomial f;
    /// Distinct oracle inputs used, i.e. the oracle transcript growth of this run.
    std::size_t query_count = 0;
    Step1Result step1;
    /// Full-degree candidates handed to step 3 (cofactors times the known linear factors).
    CandidateSet candidates;
    Step3Result step3;
    RankStats rank;
    WindowParams window;
    bool degenerate_e1 = false;
};

/// Recovers a monic square-free f of degree d from its power oracle.
inline InterpolationResult interpolate(PowerOracle& oracle, const PrimeField& field, u64 d,
                                       const InterpolationParams& params = {}) {
    const u64 p = field.p();
    const u64 e = oracle.exponent();
    if (oracle.modulus() != p) throw std::invalid_argument("field mismatch");
    if (d < 1) throw std::domain_error("degree d must be at least 1");
    if (d >= p) throw std::domain_error("degree d must be below p");
    if (!field.divides_order(e)) throw std::domain_error("e must divide p-1");

    InterpolationResult result;
    const std::size_t before = oracle.query_count();
    CachedOracle cached(oracle);

    if (e == 1) {
        // the oracle reveals f itself: interpolate f - X^d on d nodes, check one more
        result.degenerate_e1 = true;
        std::vector<Point> pts;
        for (u64 x = 0; x < d; ++x) pts.push_back({x, zp::sub(cached.query(x), zp::pow(x, d, p), p)});
        Polynomial f = lagrange_interpolate(p, pts) + Polynomial::monomial(p, 1, d);
        if (f.eval(d) != cached.query(d % p)) throw InconsistentOracle("inconsistent oracle: values are not a monic degree-d polynomial");
        result.f = f;
        result.query_count = oracle.query_count() - before;
        return result;
    }

    result.window = compute_window(p, e, d, params.c1);
    result.step1 = step1_collect(cached, field, d, params.n);

    Polynomial known = Polynomial::constant(p, 1);
    for (u64 y : result.step1.zeros) known *= Polynomial::linear_root(p, y);
    const u64 dr = result.step1.reduced_degree;
    if (dr == 0) {
        result.candidates.insert(known, "product of oracle zeros");
    } else {
        CandidateSet cofactors = step2_candidates(result.step1.blocks, result.step1.h, dr, p, &result.rank);
        for (const auto& c : cofactors.items()) result.candidates.insert(c.poly * known, c.provenance);
    }
    result.step3 = step3_filter(result.candidates, cached, d, result.window, params.m_cap);
    result.f = result.step3.recovered;
    result.query_count = oracle.query_count() - before;
    return result;
}

/// Upper bound on interpolate's query count: (2d-1)n^2+n + d m + 2 + survivors H.
inline std::size_t interpolation_query_bound(u64 d, u64 n, u64 m, std::size_t survivors, u64 H) {
    return step1_last_input(d, n) + d * m + 2 + survivors * H;
}

}  // namespace powerprobe

#pragma once

// Exhaustive counters for value-set/subgroup intersections, curve points on
// subgroups, shifted-subgroup intersections and interpolating polynomials,
// each paired with its theoretical envelope, plus a CSV sweep harness.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "powerprobe/algorithms.hpp"
#include "powerprobe/bivariate.hpp"
#include "powerprobe/field.hpp"
#include "powerprobe/oracle.hpp"
#include "powerprobe/poly.hpp"
#include "powerprobe/rational.hpp"

namespace powerprobe::lab {

inline constexpr double kDefaultBudget = 1e8;

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(double need)
        : std::runtime_error("enumeration budget exceeded (needs ~" + std::to_string(static_cast<long long>(need)) +
                             " operations)") {}
};

// ---------------------------------------------------------------------------
// value sets

/// #(psi([1, H]) ∩ G_e): distinct values, poles skipped. Sorted-list route.
inline u64 count_value_set_in_subgroup(const RationalFn& psi, u64 H, u64 e, const PrimeField& field) {
    if (H >= field.p()) throw std::domain_error("window must satisfy H < p");
    field.subgroup(e);
    std::vector<u64> values;
    values.reserve(H);
    for (u64 x = 1; x <= H; ++x)
        if (auto v = psi.eval(x)) values.push_back(*v);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return static_cast<u64>(std::count_if(values.begin(), values.end(), [&](u64 v) { return field.in_subgroup(v, e); }));
}

/// Same count through a hash set of values against the enumerated subgroup.
inline u64 count_value_set_in_subgroup_hashed(const RationalFn& psi, u64 H, u64 e, const PrimeField& field) {
    if (H >= field.p()) throw std::domain_error("window must satisfy H < p");
    const auto group = field.subgroup_elements(e);
    const std::unordered_set<u64> members(group.begin(), group.end());
    std::unordered_set<u64> hits;
    const u64 p = field.p();
    for (u64 x = 1; x <= H; ++x) {
        const u64 den = psi.den().eval(x);
        if (den == 0) continue;
        const u64 v = zp::div(psi.num().eval(x), den, p);
        if (members.count(v)) hits.insert(v);
    }
    return hits.size();
}

/// C H^{1/2} max{d^{3/2} e p^{-1/2}, d^{7/6} e^{1/3}}
inline double envelope_value_set(u64 d, u64 e, u64 p, u64 H, double C = 1.0) {
    const double dd = static_cast<double>(d), ee = static_cast<double>(e);
    const double branch = std::max(std::pow(dd, 1.5) * ee / std::sqrt(static_cast<double>(p)),
                                   std::pow(dd, 7.0 / 6.0) * std::cbrt(ee));
    return C * std::sqrt(static_cast<double>(H)) * branch;
}

// ---------------------------------------------------------------------------
// curve points on subgroup pairs

struct CurveCount {
    u64 count = 0;
    double envelope = 0.0;
};

/// C max{d^2 W / p, d^{4/3} W^{1/3}} with W = e1 e2 and d the total degree.
inline double envelope_curve_points(u64 d, u64 e1, u64 e2, u64 p, double C = 1.0) {
    const double dd = static_cast<double>(d);
    const double w = static_cast<double>(e1) * static_cast<double>(e2);
    return C * std::max(dd * dd * w / static_cast<double>(p), std::pow(dd, 4.0 / 3.0) * std::cbrt(w));
}

/// #{(u, v) in G_e1 x G_e2 : F(u, v) = 0} by evaluation at every pair.
inline CurveCount count_curve_points_on_subgroups(const BivariatePoly& F, u64 e1, u64 e2, const PrimeField& field,
                                                  double C = 1.0) {
    if (F.is_zero()) throw std::domain_error("curve of the zero polynomial");
    const auto g1 = field.subgroup_elements(e1);
    const auto g2 = field.subgroup_elements(e2);
    CurveCount out;
    for (u64 u : g1)
        for (u64 v : g2)
            if (F.eval(u, v) == 0) ++out.count;
    out.envelope = envelope_curve_points(static_cast<u64>(std::max(F.total_degree(), 0)), e1, e2, field.p(), C);
    return out;
}

/// Same count by specializing U and finding the roots of F(u, V) in F_p.
inline u64 count_curve_points_by_roots(const BivariatePoly& F, u64 e1, u64 e2, const PrimeField& field) {
    if (F.is_zero()) throw std::domain_error("curve of the zero polynomial");
    u64 count = 0;
    for (u64 u : field.subgroup_elements(e1)) {
        const Polynomial slice = F.at_u(u);
        if (slice.is_zero()) {
            count += e2;
            continue;
        }
        for (u64 v : roots(slice))
            if (field.in_subgroup(v, e2)) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// shifted subgroups

struct ShiftedCount {
    u64 count = 0;
    /// p >= (2m floor(e^{1/(2m+1)}) + 2m + 2) e for m = number of shifts.
    bool condition_holds = true;
    double envelope = 0.0;
};

namespace detail {

inline void check_shifts(std::span<const u64> shifts, std::span<const u64> scales, u64 p) {
    if (shifts.size() != scales.size()) throw std::invalid_argument("shifts and scales differ in length");
    std::set<u64> seen;
    for (u64 xi : shifts) {
        if (xi % p == 0) throw std::domain_error("shifts must be nonzero");
        if (!seen.insert(xi % p).second) throw std::domain_error("shifts must be pairwise distinct");
    }
    for (u64 mu : scales)
        if (mu % p == 0) throw std::domain_error("scales must be nonzero");
}

}  // namespace detail

/// C e^{(m+1)/(2m+1)}
inline double envelope_shifted(u64 e, u64 m, double C = 1.0) {
    return C * std::pow(static_cast<double>(e), static_cast<double>(m + 1) / static_cast<double>(2 * m + 1));
}

/// #(G_e ∩ (mu_1 G_e + xi_1) ∩ ... ∩ (mu_m G_e + xi_m)) by intersecting sorted cosets.
inline ShiftedCount count_shifted_subgroup_intersection(u64 e, std::span<const u64> shifts, std::span<const u64> scales,
                                                        const PrimeField& field, double C = 1.0) {
    const u64 p = field.p();
    detail::check_shifts(shifts, scales, p);
    auto current = field.subgroup_elements(e);
    const auto base = current;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        std::vector<u64> coset;
        coset.reserve(base.size());
        for (u64 g : base) coset.push_back(field.add(field.mul(scales[i] % p, g), shifts[i] % p));
        std::sort(coset.begin(), coset.end());
        std::vector<u64> next;
        std::set_intersection(current.begin(), current.end(), coset.begin(), coset.end(), std::back_inserter(next));
        current = std::move(next);
    }
    ShiftedCount out;
    out.count = current.size();
    const u64 m = shifts.size();
    out.condition_holds = m == 0 || shifted_subgroup_condition(p, e, m);
    out.envelope = envelope_shifted(e, m, C);
    return out;
}

/// Same count by testing (lambda - xi_i) / mu_i in G_e for every lambda in G_e.
inline u64 count_shifted_by_membership(u64 e, std::span<const u64> shifts, std::span<const u64> scales,
                                       const PrimeField& field) {
    const u64 p = field.p();
    detail::check_shifts(shifts, scales, p);
    u64 count = 0;
    for (u64 lambda : field.subgroup_elements(e)) {
        bool inside = true;
        for (std::size_t i = 0; i < shifts.size() && inside; ++i)
            inside = field.in_subgroup(field.div(field.sub(lambda, shifts[i] % p), scales[i] % p), e);
        if (inside) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// interpolating polynomials

namespace detail {

inline void check_points(std::span<const u64> xs, std::span<const u64> as, u64 p) {
    if (xs.size() != as.size()) throw std::invalid_argument("xs and As differ in length");
    if (xs.empty()) throw std::domain_error("need at least one point");
    std::set<u64> seen;
    for (u64 x : xs)
        if (!seen.insert(x % p).second) throw std::domain_error("xs must be pairwise distinct");
    for (u64 a : as)
        if (a % p == 0) throw std::domain_error("As must be nonzero");
}

inline double exhaustive_cost(u64 p, u64 d, std::size_t points) {
    double total = 0;
    for (u64 k = 0; k <= d; ++k) total += std::pow(static_cast<double>(p), static_cast<double>(k));
    return total * static_cast<double>(points);
}

inline double subgroup_cost(u64 e, u64 d) {
    return std::pow(static_cast<double>(e), static_cast<double>(d + 1)) * static_cast<double>((d + 1) * (d + 1));
}

}  // namespace detail

/// Monic f of degree <= d with f(x_i)^e = A_i for all i, by trying every coefficient tuple.
inline u64 count_interpolating_exhaustive(std::span<const u64> xs, std::span<const u64> as, u64 e, u64 d,
                                          const PrimeField& field, double budget = kDefaultBudget) {
    const u64 p = field.p();
    detail::check_points(xs, as, p);
    const double cost = detail::exhaustive_cost(p, d, xs.size());
    if (cost > budget) throw BudgetExceeded(cost);
    u64 count = 0;
    for (u64 k = 0; k <= d; ++k) {
        std::vector<u64> coeffs(k + 1, 0);
        coeffs[k] = 1;
        while (true) {
            bool ok = true;
            for (std::size_t i = 0; i < xs.size() && ok; ++i) {
                u64 acc = 0;
                for (std::size_t j = coeffs.size(); j-- > 0;) acc = field.add(field.mul(acc, xs[i] % p), coeffs[j]);
                ok = field.pow(acc, e) == as[i] % p;
            }
            if (ok) ++count;
            // odometer over the k lower coefficients
            std::size_t pos = 0;
            while (pos < k && ++coeffs[pos] == p) coeffs[pos++] = 0;
            if (pos == k) break;
        }
    }
    return count;
}

/// Same count through f = sum c_i lambda_i L_i on the first d+1 nodes, with c_i^e = A_i
/// and lambda in G_e^{d+1}. Needs at least d+1 points.
inline u64 count_interpolating_by_subgroup(std::span<const u64> xs, std::span<const u64> as, u64 e, u64 d,
                                           const PrimeField& field, double budget = kDefaultBudget) {
    const u64 p = field.p();
    detail::check_points(xs, as, p);
    if (xs.size() < d + 1) throw std::domain_error("subgroup enumeration needs at least d+1 points");
    const double cost = detail::subgroup_cost(e, d);
    if (cost > budget) throw BudgetExceeded(cost);
    std::vector<u64> nodes(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(d + 1));
    std::vector<u64> base_roots;
    for (u64 i = 0; i <= d; ++i) {
        auto r = field.extract_roots(as[i], e);
        if (r.empty()) return 0;
        base_roots.push_back(r.front());
    }
    std::vector<std::vector<u64>> basis;  // c_i L_i coefficient vectors, length d+1
    for (u64 i = 0; i <= d; ++i) {
        Polynomial li = lagrange_basis(p, nodes, i).scale(base_roots[i]);
        std::vector<u64> c(d + 1, 0);
        for (u64 k = 0; k <= d; ++k) c[k] = li.coeff(k);
        basis.push_back(std::move(c));
    }
    const auto group = field.subgroup_elements(e);
    std::vector<std::size_t> pick(d + 1, 0);
    u64 count = 0;
    while (true) {
        std::vector<u64> f(d + 1, 0);
        for (u64 i = 0; i <= d; ++i) {
            const u64 lam = group[pick[i]];
            for (u64 k = 0; k <= d; ++k) f[k] = field.add(f[k], field.mul(lam, basis[i][k]));
        }
        Polynomial poly(p, f);
        if (poly.is_monic()) {
            bool ok = true;
            for (std::size_t i = d + 1; i < xs.size() && ok; ++i) ok = field.pow(poly.eval(xs[i]), e) == as[i] % p;
            if (ok) ++count;
        }
        std::size_t pos = 0;
        while (pos <= d && ++pick[pos] == group.size()) pick[pos++] = 0;
        if (pos > d) break;
    }
    return count;
}

/// Picks the cheaper of the two enumerations that fits the budget.
inline u64 count_interpolating_polynomials(std::span<const u64> xs, std::span<const u64> as, u64 e, u64 d,
                                           const PrimeField& field, double budget = kDefaultBudget) {
    const double exhaustive = detail::exhaustive_cost(field.p(), d, xs.size());
    const bool subgroup_ok = xs.size() >= d + 1;
    const double subgroup = subgroup_ok ? detail::subgroup_cost(e, d) : std::numeric_limits<double>::infinity();
    if (std::min(exhaustive, subgroup) > budget) throw BudgetExceeded(std::min(exhaustive, subgroup));
    if (subgroup < exhaustive) return count_interpolating_by_subgroup(xs, as, e, d, field, budget);
    return count_interpolating_exhaustive(xs, as, e, d, field, budget);
}

/// C e^{d - 1/2}
inline double envelope_interpolating(u64 e, u64 d, double C = 1.0) {
    return C * std::pow(static_cast<double>(e), static_cast<double>(d) - 0.5);
}

// ---------------------------------------------------------------------------
// sweeps

enum class Experiment { ValueSet, CurvePoints, ShiftedSubgroup, InterpolatingPolys };

inline const char* experiment_name(Experiment x) {
    switch (x) {
        case Experiment::ValueSet: return "value_set";
        case Experiment::CurvePoints: return "curve_points";
        case Experiment::ShiftedSubgroup: return "shifted_subgroup";
        case Experiment::InterpolatingPolys: return "interpolating_polys";
    }
    return "?";
}

inline Experiment parse_experiment(const std::string& s) {
    for (auto x : {Experiment::ValueSet, Experiment::CurvePoints, Experiment::ShiftedSubgroup, Experiment::InterpolatingPolys})
        if (s == experiment_name(x)) return x;
    throw std::invalid_argument("unknown experiment \"" + s + "\"");
}

/// e values per prime: every divisor, the proper ones, those up to a maximum, or an explicit list.
struct DivisorPolicy {
    enum class Kind { All, Proper, Max, List };
    Kind kind = Kind::All;
    u64 max = 0;
    std::vector<u64> list;
};

/// Window per cell: the algorithm's window, the whole field, or a fixed length.
struct WindowPolicy {
    enum class Kind { Window, Full, Fixed };
    Kind kind = Kind::Window;
    u64 fixed = 0;
};

struct GridSpec {
    std::vector<u64> primes;
    DivisorPolicy divisors;
    u64 d_min = 1;
    u64 d_max = 1;
    WindowPolicy window;
    std::vector<Experiment> experiments;
    u64 seed = 0;
    double C = 1.0;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// {primes, e_divisor_policy, d_range, H_policy, experiments, seed?, C?, threads?}
inline GridSpec parse_grid(const nlohmann::json& j) {
    GridSpec g;
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw std::invalid_argument(std::string("grid is missing \"") + key + "\"");
        return j.at(key);
    };
    g.primes = need("primes").get<std::vector<u64>>();
    for (u64 p : g.primes)
        if (!is_prime(p) || p >= kMaxModulus) throw std::invalid_argument("grid prime " + std::to_string(p) + " is not a prime below 2^62");

    const auto& pol = need("e_divisor_policy");
    if (pol.is_string()) {
        const auto s = pol.get<std::string>();
        if (s == "all") g.divisors.kind = DivisorPolicy::Kind::All;
        else if (s == "proper") g.divisors.kind = DivisorPolicy::Kind::Proper;
        else throw std::invalid_argument("e_divisor_policy must be \"all\", \"proper\", {\"max\": K} or a list");
    } else if (pol.is_object() && pol.contains("max")) {
        g.divisors.kind = DivisorPolicy::Kind::Max;
        g.divisors.max = pol.at("max").get<u64>();
    } else if (pol.is_array()) {
        g.divisors.kind = DivisorPolicy::Kind::List;
        g.divisors.list = pol.get<std::vector<u64>>();
    } else {
        throw std::invalid_argument("e_divisor_policy must be \"all\", \"proper\", {\"max\": K} or a list");
    }

    const auto range = need("d_range").get<std::vector<u64>>();
    if (range.size() != 2 || range[0] < 1 || range[0] > range[1]) throw std::invalid_argument("d_range must be [lo, hi] with 1 <= lo <= hi");
    g.d_min = range[0];
    g.d_max = range[1];

    const auto& hp = need("H_policy");
    if (hp.is_string()) {
        const auto s = hp.get<std::string>();
        if (s == "window") g.window.kind = WindowPolicy::Kind::Window;
        else if (s == "full") g.window.kind = WindowPolicy::Kind::Full;
        else throw std::invalid_argument("H_policy must be \"window\", \"full\" or {\"fixed\": H}");
    } else if (hp.is_number_unsigned()) {
        g.window = {WindowPolicy::Kind::Fixed, hp.get<u64>()};
    } else if (hp.is_object() && hp.contains("fixed")) {
        g.window = {WindowPolicy::Kind::Fixed, hp.at("fixed").get<u64>()};
    } else {
        throw std::invalid_argument("H_policy must be \"window\", \"full\" or {\"fixed\": H}");
    }

    for (const auto& x : need("experiments")) g.experiments.push_back(parse_experiment(x.get<std::string>()));
    g.seed = j.value("seed", u64{0});
    g.C = j.value("C", 1.0);
    g.threads = j.value("threads", 0u);
    return g;
}

struct BoundReport {
    Experiment experiment = Experiment::ValueSet;
    u64 p = 0;
    u64 e = 0;
    u64 d = 0;
    std::optional<u64> H;
    std::optional<u64> m;
    std::optional<u64> measured;
    std::optional<double> envelope;
    /// ok | precondition_unmet | budget | error
    std::string status = "ok";
    std::string detail;
    double ms = 0.0;

    std::optional<double> ratio() const {
        if (!measured || !envelope || *envelope <= 0.0) return std::nullopt;
        return static_cast<double>(*measured) / *envelope;
    }

    auto key() const { return std::tuple(static_cast<int>(experiment), p, e, d); }
};

namespace detail {

inline u64 splitmix(u64 x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline u64 cell_seed(u64 seed, Experiment x, u64 p, u64 e, u64 d) {
    u64 s = splitmix(seed);
    for (u64 v : {static_cast<u64>(x), p, e, d}) s = splitmix(s ^ v);
    return s;
}

inline std::vector<u64> e_values(const DivisorPolicy& pol, u64 p) {
    auto all = divisors(p - 1);
    switch (pol.kind) {
        case DivisorPolicy::Kind::All: return all;
        case DivisorPolicy::Kind::Proper: {
            std::vector<u64> out;
            for (u64 e : all)
                if (e != 1 && e != p - 1) out.push_back(e);
            return out;
        }
        case DivisorPolicy::Kind::Max: {
            std::vector<u64> out;
            for (u64 e : all)
                if (e <= pol.max) out.push_back(e);
            return out;
        }
        case DivisorPolicy::Kind::List: {
            auto out = pol.list;
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
    }
    return all;
}

inline u64 window_for(const WindowPolicy& pol, u64 p, u64 e, u64 d) {
    u64 H = 0;
    switch (pol.kind) {
        case WindowPolicy::Kind::Window: H = compute_window(p, e, d, 1.0).H; break;
        case WindowPolicy::Kind::Full: H = p - 1; break;
        case WindowPolicy::Kind::Fixed: H = pol.fixed; break;
    }
    return std::clamp<u64>(H, 1, p - 1);
}

}  // namespace detail

/// Runs one grid cell. Never throws; failures become the row's status.
inline BoundReport run_cell(Experiment experiment, u64 p, u64 e, u64 d, const GridSpec& grid, double budget) {
    BoundReport r;
    r.experiment = experiment;
    r.p = p;
    r.e = e;
    r.d = d;
    const auto start = std::chrono::steady_clock::now();
    try {
        const PrimeField field(p);
        field.subgroup(e);
        const u64 seed = detail::cell_seed(grid.seed, experiment, p, e, d);
        switch (experiment) {
            case Experiment::ValueSet: {
                const u64 H = detail::window_for(grid.window, p, e, d);
                r.H = H;
                if (static_cast<double>(H) * static_cast<double>(d + 1) > budget) throw BudgetExceeded(static_cast<double>(H) * (d + 1));
                const auto inst = gen_instance(p, e, d, seed, {.require_non_perfect_power_ratio = true});
                const RationalFn psi(*inst.f, *inst.g);
                r.measured = count_value_set_in_subgroup(psi, H, e, field);
                r.envelope = envelope_value_set(d, e, p, H, grid.C);
                break;
            }
            case Experiment::CurvePoints: {
                const double cost = static_cast<double>(e) * static_cast<double>(e) * (2.0 * d + 1) * (2.0 * d + 1);
                if (cost > budget) throw BudgetExceeded(cost);
                const auto inst = gen_instance(p, e, d, seed, {.require_non_perfect_power_ratio = true});
                const auto F = resultant_shifted(*inst.f, *inst.g, 1);
                const auto c = count_curve_points_on_subgroups(F, e, e, field, grid.C);
                r.measured = c.count;
                r.envelope = c.envelope;
                break;
            }
            case Experiment::ShiftedSubgroup: {
                // the degree axis doubles as the number of shifted cosets
                const u64 m = d;
                r.m = m;
                if (m >= p - 1) throw std::domain_error("too many shifts for the field");
                if (static_cast<double>(e) * static_cast<double>(m + 1) > budget) throw BudgetExceeded(static_cast<double>(e) * (m + 1));
                std::mt19937_64 rng(seed);
                std::set<u64> xi_set;
                while (xi_set.size() < m) xi_set.insert(1 + rng() % (p - 1));
                std::vector<u64> xi(xi_set.begin(), xi_set.end());
                std::vector<u64> mu;
                for (u64 i = 0; i < m; ++i) mu.push_back(1 + rng() % (p - 1));
                const auto c = count_shifted_subgroup_intersection(e, xi, mu, field, grid.C);
                r.measured = c.count;
                r.envelope = c.envelope;
                if (!c.condition_holds) r.status = "precondition_unmet";
                break;
            }
            case Experiment::InterpolatingPolys: {
                const u64 m = choose_filter_m(p, e);
                r.m = m;
                const u64 count = d * (m - 1) + 2;
                if (count >= p) throw std::domain_error("not enough field elements for the interpolation points");
                std::vector<u64> xs(count);
                for (u64 i = 0; i < count; ++i) xs[i] = i;
                std::mt19937_64 rng(seed);
                std::vector<u64> as;
                for (int attempt = 0; attempt < 1000 && as.empty(); ++attempt) {
                    std::vector<u64> c(d + 1, 1);
                    for (u64 k = 0; k < d; ++k) c[k] = rng() % p;
                    const Polynomial f(p, c);
                    std::vector<u64> vals;
                    for (u64 x : xs) vals.push_back(field.pow(f.eval(x), e));
                    if (std::find(vals.begin(), vals.end(), 0) == vals.end()) as = std::move(vals);
                }
                if (as.empty()) throw std::domain_error("could not draw a polynomial without zeros on the points");
                r.measured = count_interpolating_polynomials(xs, as, e, d, field, budget);
                r.envelope = envelope_interpolating(e, d, grid.C);
                break;
            }
        }
    } catch (const BudgetExceeded& ex) {
        r.status = "budget";
        r.detail = ex.what();
        r.measured.reset();
    } catch (const std::exception& ex) {
        r.status = "error";
        r.detail = ex.what();
        r.measured.reset();
    }
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// Every cell of the grid, sorted by (experiment, p, e, d). Cells run on a worker pool.
inline std::vector<BoundReport> sweep(const GridSpec& grid, double budget = kDefaultBudget) {
    struct Cell {
        Experiment x;
        u64 p, e, d;
    };
    std::vector<Cell> cells;
    for (auto x : grid.experiments)
        for (u64 p : grid.primes)
            for (u64 e : detail::e_values(grid.divisors, p))
                for (u64 d = grid.d_min; d <= grid.d_max; ++d) cells.push_back({x, p, e, d});

    std::vector<BoundReport> out(cells.size());
    unsigned workers = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(cells.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            out[i] = run_cell(cells[i].x, cells[i].p, cells[i].e, cells[i].d, grid, budget);
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
    }
    std::stable_sort(out.begin(), out.end(), [](const BoundReport& a, const BoundReport& b) { return a.key() < b.key(); });
    return out;
}

inline constexpr const char* kCsvHeader = "experiment,p,e,d,H,m,measured,envelope,ratio,status,ms";

inline std::string to_csv(const std::vector<BoundReport>& rows) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    auto opt = [&](const auto& v) {
        if (v) os << *v;
    };
    for (const auto& r : rows) {
        os << experiment_name(r.experiment) << ',' << r.p << ',' << r.e << ',' << r.d << ',';
        opt(r.H);
        os << ',';
        opt(r.m);
        os << ',';
        opt(r.measured);
        os << ',';
        os << std::setprecision(10);
        opt(r.envelope);
        os << ',';
        opt(r.ratio());
        os << ',' << r.status << ',' << std::fixed << std::setprecision(3) << r.ms << std::defaultfloat << '\n';
    }
    return os.str();
}

}  // namespace powerprobe::lab

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "powerprobe/bounds_lab.hpp"

using namespace powerprobe;
using namespace powerprobe::lab;

namespace {

BivariatePoly bi(u64 p, std::vector<std::vector<u64>> g) { return BivariatePoly(p, std::move(g)); }

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST(ValueSet, Examples) {
    const PrimeField field(13);
    const RationalFn x(Polynomial::x(13));
    EXPECT_EQ(count_value_set_in_subgroup(x, 5, 3, field), 2u);
    EXPECT_EQ(count_value_set_in_subgroup(x, 12, 12, field), 12u);
    EXPECT_EQ(count_value_set_in_subgroup(x, 5, 1, field), 1u);
    const RationalFn shifted(Polynomial(13, {2, 1}));  // X + 2 never hits 1 on [1, 5]
    EXPECT_EQ(count_value_set_in_subgroup(shifted, 5, 1, field), 0u);
    EXPECT_THROW(count_value_set_in_subgroup(x, 13, 3, field), std::domain_error);
}

TEST(ValueSet, PolesAreSkipped) {
    const PrimeField field(13);
    const RationalFn psi(Polynomial::constant(13, 1), Polynomial::linear_root(13, 1));  // 1/(X-1)
    EXPECT_EQ(count_value_set_in_subgroup(psi, 12, 12, field), 11u);
    EXPECT_EQ(count_value_set_in_subgroup_hashed(psi, 12, 12, field), 11u);
}

TEST(ValueSet, MonotoneBoundedAndDualRouteAgrees) {
    std::mt19937_64 rng(3);
    GenOptions opts;
    opts.require_non_perfect_power_ratio = true;
    for (u64 p : {101ULL, 409ULL}) {
        const PrimeField field(p);
        for (u64 e : divisors(p - 1)) {
            const auto inst = gen_instance(p, e, 2, rng(), opts);
            const RationalFn psi(*inst.f, *inst.g);
            u64 prev = 0;
            std::set<u64> values;
            for (u64 H = 1; H < p; H += 7) {
                const u64 c = count_value_set_in_subgroup(psi, H, e, field);
                ASSERT_EQ(c, count_value_set_in_subgroup_hashed(psi, H, e, field));
                ASSERT_GE(c, prev);
                values.clear();
                for (u64 x = 1; x <= H; ++x)
                    if (auto v = psi.eval(x)) values.insert(*v);
                ASSERT_LE(c, std::min<u64>(e, values.size()));
                prev = c;
            }
        }
    }
}

TEST(Envelopes, Examples) {
    EXPECT_DOUBLE_EQ(envelope_value_set(1, 1, 1000000007, 1), 1.0);
    EXPECT_NEAR(envelope_value_set(2, 3, 1000000, 4), 2 * std::pow(2.0, 7.0 / 6.0) * std::cbrt(3.0), 1e-12);
    EXPECT_NEAR(envelope_value_set(2, 3, 1000000, 4), 6.475481627442266, 1e-12);
    EXPECT_EQ(envelope_value_set(2, 3, 1000000, 4, 0.0), 0.0);
    EXPECT_NEAR(envelope_shifted(8, 1), 4.0, 1e-12);
    EXPECT_NEAR(envelope_interpolating(4, 2), 8.0, 1e-12);
    EXPECT_NEAR(envelope_curve_points(1, 8, 8, 1000003), 4.0, 1e-12);
}

TEST(CurvePoints, Examples) {
    const PrimeField field(13);
    const auto diag = bi(13, {{0, 12}, {1}});  // U - V
    const auto inv = bi(13, {{12}, {0, 1}});   // UV - 1
    for (u64 e : divisors(12)) {
        EXPECT_EQ(count_curve_points_on_subgroups(diag, e, e, field).count, e);
        EXPECT_EQ(count_curve_points_on_subgroups(inv, e, e, field).count, e);
    }
    EXPECT_EQ(count_curve_points_on_subgroups(bi(13, {{1, 12}, {1}}), 4, 4, field).count, 0u);
    EXPECT_THROW(count_curve_points_on_subgroups(BivariatePoly(13), 4, 4, field), std::domain_error);
}

TEST(CurvePoints, RootRouteAgrees) {
    std::mt19937_64 rng(5);
    for (u64 p : {101ULL, 1009ULL}) {
        const PrimeField field(p);
        const auto es = divisors(p - 1);
        for (int t = 0; t < 30; ++t) {
            std::vector<std::vector<u64>> g(3, std::vector<u64>(3));
            for (auto& row : g)
                for (auto& x : row) x = rng() % 2 ? rng() % p : 0;
            g[1][1] = 1 + rng() % (p - 1);
            const BivariatePoly F(p, g);
            const u64 e1 = es[rng() % es.size()], e2 = es[rng() % es.size()];
            ASSERT_EQ(count_curve_points_on_subgroups(F, e1, e2, field).count, count_curve_points_by_roots(F, e1, e2, field));
        }
        // a slice vanishing identically: F = U - 1 contributes all of G_e2 at u = 1
        const auto F = bi(p, {{p - 1}, {1}});
        EXPECT_EQ(count_curve_points_by_roots(F, 4, 4, field), 4u);
        EXPECT_EQ(count_curve_points_on_subgroups(F, 4, 4, field).count, 4u);
    }
}

TEST(Shifted, Examples) {
    const PrimeField field(13);
    const std::vector<u64> xi{4}, mu{1};
    EXPECT_EQ(count_shifted_subgroup_intersection(4, xi, mu, field).count, 2u);
    EXPECT_EQ(count_shifted_subgroup_intersection(4, {}, {}, field).count, 4u);
    const std::vector<u64> zero{0}, dup{4, 4}, ones{1, 1};
    EXPECT_THROW(count_shifted_subgroup_intersection(4, zero, mu, field), std::domain_error);
    EXPECT_THROW(count_shifted_subgroup_intersection(4, dup, ones, field), std::domain_error);
    EXPECT_FALSE(count_shifted_subgroup_intersection(4, xi, mu, field).condition_holds);
}

TEST(Shifted, MembershipRouteAgrees) {
    std::mt19937_64 rng(6);
    for (u64 p : {101ULL, 409ULL, 1009ULL}) {
        const PrimeField field(p);
        for (u64 e : divisors(p - 1))
            for (u64 m = 0; m <= 3; ++m) {
                std::set<u64> s;
                while (s.size() < m) s.insert(1 + rng() % (p - 1));
                std::vector<u64> xi(s.begin(), s.end()), mu;
                for (u64 i = 0; i < m; ++i) mu.push_back(1 + rng() % (p - 1));
                const auto c = count_shifted_subgroup_intersection(e, xi, mu, field);
                ASSERT_EQ(c.count, count_shifted_by_membership(e, xi, mu, field));
                if (m == 0) {
                    ASSERT_EQ(c.count, e);
                }
            }
    }
}

TEST(Interpolating, ExponentOneIsUniqueOrEmpty) {
    const PrimeField field(31);
    const std::vector<u64> xs{0, 1, 2, 3};
    const Polynomial f(31, {5, 0, 1});
    std::vector<u64> as;
    for (u64 x : xs) as.push_back(f.eval(x));
    EXPECT_EQ(count_interpolating_exhaustive(xs, as, 1, 2, field), 1u);
    as[3] = (as[3] + 1) % 31;
    if (as[3] == 0) as[3] = 1;
    EXPECT_EQ(count_interpolating_exhaustive(xs, as, 1, 2, field), 0u);
}

TEST(Interpolating, NonPowerDataHasNoSolutions) {
    const PrimeField field(31);
    const std::vector<u64> xs{0, 1, 2};
    const std::vector<u64> as{3, 1, 1};  // 3 is not a cube mod 31
    ASSERT_TRUE(field.extract_roots(3, 3).empty());
    EXPECT_EQ(count_interpolating_exhaustive(xs, as, 3, 2, field), 0u);
    EXPECT_EQ(count_interpolating_by_subgroup(xs, as, 3, 2, field), 0u);
}

TEST(Interpolating, StrategiesAgree) {
    std::mt19937_64 rng(2);
    for (u64 p : {31ULL, 61ULL}) {
        const PrimeField field(p);
        for (u64 e : {2ULL, 3ULL, 5ULL})
            for (u64 d : {1ULL, 2ULL}) {
                if ((p - 1) % e != 0) continue;
                for (int t = 0; t < 6; ++t) {
                    const std::size_t npts = d + 1 + rng() % 2;
                    std::vector<u64> xs;
                    std::set<u64> used;
                    while (xs.size() < npts) {
                        const u64 x = rng() % p;
                        if (used.insert(x).second) xs.push_back(x);
                    }
                    std::vector<u64> c(d + 1, 1);
                    for (u64 k = 0; k < d; ++k) c[k] = rng() % p;
                    const Polynomial f(p, c);
                    std::vector<u64> as;
                    for (u64 x : xs) as.push_back(field.pow(f.eval(x), e));
                    if (std::count(as.begin(), as.end(), 0)) continue;
                    const u64 a = count_interpolating_exhaustive(xs, as, e, d, field);
                    const u64 b = count_interpolating_by_subgroup(xs, as, e, d, field);
                    ASSERT_EQ(a, b);
                    ASSERT_GE(a, 1u);
                    ASSERT_EQ(count_interpolating_polynomials(xs, as, e, d, field), a);
                }
            }
    }
}

TEST(Interpolating, BudgetIsEnforced) {
    const PrimeField field(1009);
    const std::vector<u64> xs{0, 1, 2, 3, 4}, as{1, 1, 1, 1, 1};
    EXPECT_THROW(count_interpolating_exhaustive(xs, as, 3, 3, field, 1e6), BudgetExceeded);
    EXPECT_THROW(count_interpolating_polynomials(xs, as, 1008, 3, field, 1e6), BudgetExceeded);
    EXPECT_THROW(count_interpolating_exhaustive(std::vector<u64>{1, 1}, std::vector<u64>{1, 1}, 3, 1, field), std::domain_error);
}

TEST(Grid, ParsesPolicies) {
    const auto g = parse_grid(nlohmann::json::parse(R"({
        "primes": [13, 101], "e_divisor_policy": {"max": 5}, "d_range": [1, 2],
        "H_policy": {"fixed": 7}, "experiments": ["value_set", "shifted_subgroup"], "seed": 3, "threads": 2})"));
    EXPECT_EQ(g.primes, (std::vector<u64>{13, 101}));
    EXPECT_EQ(g.divisors.kind, DivisorPolicy::Kind::Max);
    EXPECT_EQ(g.window.fixed, 7u);
    EXPECT_EQ(g.experiments.size(), 2u);
    EXPECT_EQ(g.threads, 2u);
    EXPECT_THROW(parse_grid(nlohmann::json::parse(R"({"primes": [12]})")), std::invalid_argument);
    EXPECT_THROW(parse_grid(nlohmann::json::parse(
                     R"({"primes": [13], "e_divisor_policy": "all", "d_range": [2, 1], "H_policy": "full", "experiments": []})")),
                 std::invalid_argument);
    EXPECT_THROW(parse_grid(nlohmann::json::parse(
                     R"({"primes": [13], "e_divisor_policy": "all", "d_range": [1, 1], "H_policy": "full", "experiments": ["x"]})")),
                 std::invalid_argument);
}

TEST(Sweep, EmptyGridIsHeaderOnly) {
    GridSpec g;
    EXPECT_EQ(to_csv(sweep(g)), std::string(kCsvHeader) + "\n");
}

TEST(Sweep, SingleCell) {
    GridSpec g;
    g.primes = {101};
    g.divisors = {DivisorPolicy::Kind::List, 0, {5}};
    g.d_min = g.d_max = 2;
    g.experiments = {Experiment::ValueSet};
    const auto rows = sweep(g);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[0].H, std::optional<u64>(14));
    EXPECT_EQ(count_lines(to_csv(rows)), 2u);
}

TEST(Sweep, TenPrimesThreeExponentsSorted) {
    GridSpec g;
    g.primes = {1009, 13, 61, 97, 37, 73, 181, 109, 193, 157};  // all = 1 mod 12
    g.divisors = {DivisorPolicy::Kind::List, 0, {4, 2, 3}};
    g.experiments = {Experiment::ShiftedSubgroup};
    g.threads = 4;
    const auto rows = sweep(g);
    ASSERT_EQ(rows.size(), 30u);
    for (std::size_t i = 1; i < rows.size(); ++i) ASSERT_LT(rows[i - 1].key(), rows[i].key());
    for (const auto& r : rows) EXPECT_TRUE(r.status == "ok" || r.status == "precondition_unmet") << r.detail;
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    GridSpec g;
    g.primes = {31, 101};
    g.divisors.kind = DivisorPolicy::Kind::Proper;
    g.d_max = 2;
    g.experiments = {Experiment::ValueSet, Experiment::CurvePoints, Experiment::ShiftedSubgroup, Experiment::InterpolatingPolys};
    g.seed = 11;
    g.threads = 1;
    auto strip = [](std::vector<BoundReport> rows) {
        for (auto& r : rows) r.ms = 0;
        return to_csv(rows);
    };
    const auto one = strip(sweep(g));
    g.threads = 8;
    EXPECT_EQ(strip(sweep(g)), one);
}

TEST(Sweep, BudgetCellsAreReported) {
    GridSpec g;
    g.primes = {1009};
    g.d_min = g.d_max = 3;
    g.divisors = {DivisorPolicy::Kind::List, 0, {3}};
    g.experiments = {Experiment::InterpolatingPolys};
    auto rows = sweep(g, 1e4);
    g.divisors = {DivisorPolicy::Kind::List, 0, {1008}};
    g.experiments = {Experiment::CurvePoints};
    const auto more = sweep(g, 1e4);
    rows.insert(rows.end(), more.begin(), more.end());
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.status, "budget") << r.detail;
        EXPECT_FALSE(r.measured.has_value());
    }
    EXPECT_NE(to_csv(rows).find(",budget,"), std::string::npos);
}

TEST(Sweep, CellErrorsDoNotAbort) {
    GridSpec g;
    g.primes = {13};
    g.divisors = {DivisorPolicy::Kind::List, 0, {5, 3}};
    g.experiments = {Experiment::ValueSet};
    const auto rows = sweep(g);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[1].status, "error");
}

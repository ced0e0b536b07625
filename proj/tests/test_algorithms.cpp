#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "powerprobe/algorithms.hpp"

using namespace powerprobe;

namespace {

// Answers g^x for a primitive root g: not of the form f(x)^e for any low-degree f.
class GeometricOracle final : public PowerOracle {
public:
    GeometricOracle(u64 p, u64 e, u64 g) : PowerOracle(p, e), g_(g) {}

protected:
    u64 answer(u64 x) override { return zp::pow(g_, x, modulus()); }

private:
    u64 g_;
};

Polynomial from_roots(u64 p, std::initializer_list<u64> rs) {
    Polynomial f = Polynomial::constant(p, 1);
    for (u64 r : rs) f *= Polynomial::linear_root(p, r);
    return f;
}

}  // namespace

TEST(Window, Examples) {
    EXPECT_EQ(static_cast<u64>(std::floor(window_shape(10007, 4, 2))), 12u);
    EXPECT_THROW(compute_window(10007, 4, 2), std::domain_error);  // 4 does not divide 10006
    EXPECT_EQ(compute_window(10009, 4, 2).H, 12u);
    EXPECT_EQ(compute_window(13, 1, 1).H, 1u);
    EXPECT_EQ(compute_window(101, 5, 2).H, 14u);
    EXPECT_THROW(compute_window(13, 3, 2, 0.0), WindowEmpty);
    EXPECT_THROW(compute_window(13, 5, 2), std::domain_error);
}

TEST(Window, CappedAtPMinusOne) {
    const auto w = compute_window(13, 12, 5);
    EXPECT_EQ(w.H, 12u);
    EXPECT_EQ(w.cap, 12u);
    EXPECT_FALSE(w.condition_holds);
    EXPECT_TRUE(compute_window(1000003, 3, 2).condition_holds);
}

TEST(Window, EmptyMessage) {
    try {
        compute_window(13, 3, 2, 0.0);
        FAIL();
    } catch (const WindowEmpty& e) {
        EXPECT_STREQ(e.what(), "window empty; increase c1 or shrink e");
    }
}

TEST(IdentityTest, EqualOraclesAreIndistinguishable) {
    const Polynomial f(101, {3, 4, 1});
    LocalOracle a(f, 5), b(f, 5);
    const auto w = compute_window(101, 5, 2);
    const auto v = identity_test(a, b, w);
    EXPECT_FALSE(v.different());
    EXPECT_EQ(v.queries, 2 * w.H);
    EXPECT_EQ(a.query_count(), w.H);
}

TEST(IdentityTest, ExponentOneRevealsValues) {
    LocalOracle a(Polynomial(13, {0, 1}), 1), b(Polynomial(13, {1, 1}), 1);
    const auto v = identity_test(a, b, compute_window(13, 1, 1));
    ASSERT_TRUE(v.different());
    EXPECT_EQ(v.witness, std::optional<u64>(1));
    EXPECT_EQ(v.queries, 2u);
}

TEST(IdentityTest, DetectsNonPerfectPowerRatio) {
    GenOptions opts;
    opts.require_non_perfect_power_ratio = true;
    for (u64 seed = 0; seed < 20; ++seed) {
        const auto inst = gen_instance(10007, 2, 2, seed, opts);
        auto of = inst.oracle_f();
        auto og = inst.oracle_g();
        const auto w = compute_window(10007, 2, 2);
        const auto v = identity_test(of, og, w);
        ASSERT_TRUE(v.different()) << seed;
        ASSERT_LE(*v.witness, w.H);
        ASSERT_NE(of.transcript().lookup(*v.witness), og.transcript().lookup(*v.witness));
    }
}

TEST(IdentityTest, VerdictMatchesBruteForceScan) {
    std::mt19937_64 rng(1);
    GenOptions opts;
    opts.with_g = true;
    for (int t = 0; t < 200; ++t) {
        const u64 p = t % 2 ? 101 : 13;
        const auto es = divisors(p - 1);
        const u64 e = es[rng() % es.size()];
        const u64 d = 1 + rng() % 3;
        const auto inst = gen_instance(p, e, d, rng(), opts);
        const auto w = compute_window(p, e, d, 1.0 + static_cast<double>(rng() % 3));
        bool brute = false;
        for (u64 x = 1; x <= w.H; ++x)
            brute |= zp::pow(inst.f->eval(x), e, p) != zp::pow(inst.g->eval(x), e, p);
        auto of = inst.oracle_f();
        auto og = inst.oracle_g();
        ASSERT_EQ(identity_test(of, og, w).different(), brute);
    }
}

TEST(IdentityTest, RejectsMismatchedOracles) {
    LocalOracle a(Polynomial(13, {0, 1}), 3), b(Polynomial(13, {0, 1}), 4);
    EXPECT_THROW(identity_test(a, b, compute_window(13, 3, 1)), std::invalid_argument);
}

TEST(FilterM, IntegerRootIsExact) {
    for (u64 k = 1; k <= 9; ++k)
        for (u64 n = 0; n < 3000; ++n) {
            const u64 r = integer_root(n, k);
            u128 lo = 1, hi = 1;
            for (u64 i = 0; i < k; ++i) {
                lo *= r;
                hi *= r + 1;
            }
            ASSERT_TRUE(lo <= n && n < hi) << "n=" << n << " k=" << k;
        }
    EXPECT_EQ(integer_root(1000000000000ULL, 3), 10000u);
    EXPECT_EQ(integer_root(999999999999ULL, 3), 9999u);
}

TEST(FilterM, SmallestSatisfyingM) {
    // m = 1: (2 floor(e^{1/3}) + 4) e
    EXPECT_EQ(choose_filter_m(101, 5), 1u);  // (2 + 4) 5 = 30
    EXPECT_EQ(choose_filter_m(1009, 3), 1u);
    EXPECT_TRUE(shifted_subgroup_condition(101, 5, 1));
    EXPECT_FALSE(shifted_subgroup_condition(29, 5, 1));
    EXPECT_THROW(choose_filter_m(13, 12, 8), std::domain_error);
}

TEST(Step1, UnitBlocksUseShiftOne) {
    const PrimeField field(101);
    const Polynomial f(101, {7, 3, 1});
    LocalOracle o(f, 5);
    const auto s = step1_collect(o, field, 2, 1);
    EXPECT_EQ(s.h, 1u);
    EXPECT_EQ(o.query_count(), step1_last_input(2, 1) + 1);
    ASSERT_EQ(s.blocks.size(), 4u);
    for (std::size_t i = 0; i < s.blocks.size(); ++i) {
        EXPECT_EQ(s.blocks[i].x, i);
        EXPECT_LE(s.blocks[i].ratios.size(), 5u);
        const u64 y = field.div(f.eval(i), f.eval(i + 1));
        EXPECT_TRUE(std::binary_search(s.blocks[i].ratios.begin(), s.blocks[i].ratios.end(), y));
    }
}

TEST(Step1, ZeroAnswersBecomeKnownRoots) {
    const PrimeField field(101);
    const auto f = from_roots(101, {3, 50});
    LocalOracle o(f, 5);
    const auto s = step1_collect(o, field, 2, 1);
    EXPECT_EQ(s.zeros, (std::vector<u64>{3}));
    EXPECT_EQ(s.reduced_degree, 1u);
    ASSERT_EQ(s.blocks.size(), 2u);
    for (const auto& b : s.blocks) EXPECT_TRUE(b.x + 1 < 3 || b.x > 3);
}

TEST(Step1, PigeonholeWithLargerN) {
    const PrimeField field(1009);
    // (p-1)/e = 336 for e = 3, divisible by n = 4
    for (u64 seed = 0; seed < 20; ++seed) {
        GenOptions sf;
        sf.require_square_free = true;
        const auto inst = gen_instance(1009, 3, 3, seed, sf);
        auto o = inst.oracle_f();
        const auto s = step1_collect(o, field, 3, 4);
        ASSERT_GE(s.h, 1u);
        ASSERT_LE(s.h, 4u);
        ASSERT_EQ(s.blocks.size(), 2 * s.reduced_degree);
        Polynomial cofactor = *inst.f;
        for (u64 z : s.zeros) cofactor = divrem(cofactor, Polynomial::linear_root(1009, z)).first;
        for (const auto& b : s.blocks) {
            const u64 y = field.div(cofactor.eval(b.x), cofactor.eval(b.x + s.h));
            ASSERT_TRUE(std::binary_search(b.ratios.begin(), b.ratios.end(), y));
        }
    }
}

TEST(Step1, Preconditions) {
    const PrimeField field(101);
    LocalOracle o(Polynomial(101, {7, 3, 1}), 5);
    EXPECT_THROW(step1_collect(o, field, 2, 3), std::domain_error);   // 3 does not divide 20
    EXPECT_THROW(step1_collect(o, field, 30, 2), std::domain_error);  // too many inputs
}

TEST(Step1, DishonestOracleIsReported) {
    const PrimeField field(101);
    GeometricOracle o(101, 5, 2);
    EXPECT_THROW(step1_collect(o, field, 2, 2), DishonestOracle);
}

TEST(Step1, TooManyZerosIsInconsistent) {
    const PrimeField field(101);
    LocalOracle o(from_roots(101, {0, 1, 2}), 5);
    EXPECT_THROW(step1_collect(o, field, 2, 1), InconsistentOracle);
}

TEST(Step2, RatioRowVanishesOnTruth) {
    const u64 p = 101;
    const Polynomial f(p, {7, 3, 1});
    for (u64 x = 0; x < 10; ++x) {
        const u64 y = zp::div(f.eval(x), f.eval(x + 2), p);
        const auto row = ratio_row(x, 2, y, 2, p);
        u64 lhs = 0;
        for (u64 k = 0; k < 2; ++k) lhs = zp::add(lhs, zp::mul(row.coeffs[k], f.coeff(k), p), p);
        EXPECT_EQ(lhs, row.rhs);
    }
}

TEST(Step2, SingletonRatiosGiveOneCandidate) {
    const u64 p = 101;
    const Polynomial f(p, {7, 3, 1});
    std::vector<RatioBlock> blocks;
    for (u64 x = 0; x < 4; ++x) blocks.push_back({x, {zp::div(f.eval(x), f.eval(x + 1), p)}});
    RankStats stats;
    const auto c = step2_candidates(blocks, 1, 2, p, &stats);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.items()[0].poly, f);
    EXPECT_EQ(stats.violations, 0u);
}

TEST(Step2, DegreeOneEachRatioGivesOneCandidate) {
    const u64 p = 101;
    std::vector<RatioBlock> blocks{{0, {2, 5, 9}}, {1, {}}};
    const auto c = step2_candidates(blocks, 1, 1, p);
    EXPECT_EQ(c.size(), 3u);
    for (const auto& cand : c.items()) {
        EXPECT_EQ(cand.poly.degree(), 1);
        const u64 y = zp::div(cand.poly.eval(0), cand.poly.eval(1), p);
        EXPECT_TRUE(y == 2 || y == 5 || y == 9);
    }
}

TEST(Step2, MatchesExhaustiveSearchOverMonicPolys) {
    // Every monic degree-2 f over F_31 consistent with some selection must be found.
    const u64 p = 31;
    const PrimeField field(p);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 25; ++t) {
        const Polynomial hidden(p, {rng() % p, rng() % p, 1});
        bool ok = true;
        for (u64 x = 0; x <= 4; ++x) ok &= hidden.eval(x) != 0;
        if (!ok) continue;
        std::vector<RatioBlock> blocks;
        for (u64 x = 0; x < 4; ++x)
            blocks.push_back({x, field.extract_roots(field.pow(field.div(hidden.eval(x), hidden.eval(x + 1)), 5), 5)});
        RankStats stats;
        const auto c = step2_candidates(blocks, 1, 2, p, &stats);
        EXPECT_EQ(stats.violations, 0u);
        for (u64 c0 = 0; c0 < p; ++c0)
            for (u64 c1 = 0; c1 < p; ++c1) {
                const Polynomial g(p, {c0, c1, 1});
                bool consistent = true;
                for (const auto& b : blocks) {
                    const u64 gx = g.eval(b.x), gxh = g.eval(b.x + 1);
                    if (gxh == 0 || gx == 0) {
                        consistent = false;
                        break;
                    }
                    consistent &= std::binary_search(b.ratios.begin(), b.ratios.end(), field.div(gx, gxh));
                }
                if (consistent) {
                    ASSERT_TRUE(c.contains(g)) << g.to_string();
                }
            }
        ASSERT_TRUE(c.contains(hidden));
    }
}

TEST(Step3, SingleTrueCandidate) {
    const Polynomial f(101, {7, 3, 1});
    LocalOracle o(f, 5);
    CandidateSet c;
    c.insert(f, "truth");
    const auto r = step3_filter(c, o, 2, compute_window(101, 5, 2));
    EXPECT_EQ(r.recovered, f);
    EXPECT_EQ(r.survivors, 1u);
    EXPECT_EQ(r.m, 1u);
}

TEST(Step3, FilterDiscardsInconsistentCandidate) {
    const Polynomial f(101, {7, 3, 1});
    LocalOracle o(f, 5);
    CandidateSet c;
    c.insert(f.shift(1), "shifted");
    c.insert(f, "truth");
    const auto r = step3_filter(c, o, 2, compute_window(101, 5, 2));
    EXPECT_EQ(r.recovered, f);
    EXPECT_EQ(r.passed_filter, 1u);
}

TEST(Step3, NoSurvivorIsInconsistent) {
    LocalOracle o(Polynomial(101, {7, 3, 1}), 5);
    CandidateSet c;
    c.insert(Polynomial(101, {8, 3, 1}), "wrong");
    EXPECT_THROW(step3_filter(c, o, 2, compute_window(101, 5, 2)), InconsistentOracle);
}

TEST(Interpolate, RoundTripExample) {
    GenOptions sf;
    sf.require_square_free = true;
    const auto inst = gen_instance(101, 5, 2, 7, sf);
    auto o = inst.oracle_f();
    const auto r = interpolate(o, PrimeField(101), 2);
    EXPECT_EQ(r.f, *inst.f);
    EXPECT_EQ(r.query_count, o.query_count());
    EXPECT_EQ(o.transcript().repeated_count(), 0u);
    EXPECT_TRUE(r.candidates.contains(*inst.f));
    EXPECT_EQ(r.rank.violations, 0u);
    EXPECT_LE(r.query_count, interpolation_query_bound(2, 1, r.step3.m, r.step3.survivors, r.window.H));
}

TEST(Interpolate, RootInsideQueryRange) {
    const auto f = from_roots(101, {3, 50});
    LocalOracle o(f, 5);
    const auto r = interpolate(o, PrimeField(101), 2);
    EXPECT_EQ(r.f, f);
    EXPECT_EQ(r.step1.zeros, (std::vector<u64>{3}));
}

TEST(Interpolate, AllRootsInsideQueryRange) {
    const auto f = from_roots(1009, {1, 4});
    LocalOracle o(f, 3);
    EXPECT_EQ(interpolate(o, PrimeField(1009), 2).f, f);
}

TEST(Interpolate, ExponentOneIsPlainInterpolation) {
    const Polynomial f(101, {9, 0, 4, 1});
    LocalOracle o(f, 1);
    const auto r = interpolate(o, PrimeField(101), 3);
    EXPECT_TRUE(r.degenerate_e1);
    EXPECT_EQ(r.f, f);
    EXPECT_EQ(r.query_count, 4u);
}

TEST(Interpolate, RoundTripSuite) {
    GenOptions sf;
    sf.require_square_free = true;
    std::size_t runs = 0;
    for (u64 p : {101ULL, 1009ULL})
        for (u64 d : {2ULL, 3ULL})
            for (u64 e : {2ULL, 3ULL, 5ULL}) {
                if ((p - 1) % e != 0) continue;
                for (u64 n : {1ULL, 2ULL}) {
                    if (((p - 1) / e) % n != 0) continue;
                    for (u64 seed = 0; seed < 3; ++seed) {
                        const auto inst = gen_instance(p, e, d, 1000 * seed + p + d + e, sf);
                        auto o = inst.oracle_f();
                        InterpolationParams params;
                        params.n = n;
                        const auto r = interpolate(o, PrimeField(p), d, params);
                        ASSERT_EQ(r.f, *inst.f) << "p=" << p << " d=" << d << " e=" << e << " n=" << n;
                        ASSERT_EQ(r.rank.violations, 0u);
                        ASSERT_LE(r.query_count, interpolation_query_bound(d, n, r.step3.m, r.step3.survivors, r.window.H));
                        ++runs;
                    }
                }
            }
    EXPECT_GT(runs, 20u);
}

TEST(Interpolate, ReplayReproducesRun) {
    GenOptions sf;
    sf.require_square_free = true;
    const auto inst = gen_instance(1009, 3, 3, 5, sf);
    auto live = inst.oracle_f();
    const auto first = interpolate(live, PrimeField(1009), 3);
    ReplayOracle replay(live.transcript());
    const auto second = interpolate(replay, PrimeField(1009), 3);
    EXPECT_EQ(second.f, first.f);
    EXPECT_EQ(replay.transcript(), live.transcript());
}

TEST(Interpolate, IncompleteReplayFails) {
    const Polynomial f(101, {7, 3, 1});
    LocalOracle live(f, 5);
    for (u64 x = 0; x < 3; ++x) live.query(x);
    ReplayOracle replay(live.transcript());
    EXPECT_THROW(interpolate(replay, PrimeField(101), 2), TranscriptIncomplete);
}

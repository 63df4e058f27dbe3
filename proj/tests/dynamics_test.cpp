#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "contgrowth/dynamics.hpp"
#include "contgrowth/stats.hpp"

using namespace contgrowth;

namespace {

const RadiusLaw kUnit = RadiusLaw::deterministic(1.0);

// Direct thinning: walk every field point in a generous window in time order and
// accept those that land in the current union.
std::vector<Event<2>> brute_force_thinning(const PoissonField<2>& field, const Ball<2>& start, double t_max,
                                           int half_width) {
    std::vector<FieldPoint<2>> pts;
    for (int x = -half_width; x < half_width; ++x)
        for (int y = -half_width; y < half_width; ++y)
            for (std::int64_t s = 0; static_cast<double>(s) < t_max; ++s)
                for (const auto& p : field.generate({x, y}, s))
                    if (p.time <= t_max) pts.push_back(p);
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
    std::vector<Ball<2>> balls{start};
    std::vector<Event<2>> out;
    for (const auto& p : pts) {
        bool inside = false;
        for (const auto& b : balls) inside = inside || b.contains(p.location);
        if (!inside) continue;
        out.push_back({static_cast<std::int64_t>(out.size()) + 1, p.time, p.location, p.radius});
        balls.push_back({p.location, p.radius});
    }
    return out;
}

}  // namespace

TEST(Init, DefaultIsGammaBallAtOrigin) {
    const auto law = RadiusLaw::uniform_interval(0.5, 1.5);
    const auto s = init_default<2>(law, 3);
    EXPECT_EQ(s.clock, 0.0);
    EXPECT_TRUE(s.log.empty());
    ASSERT_EQ(s.region.size(), 1u);
    EXPECT_EQ(s.region.ball(0).radius, 1.0);
    EXPECT_EQ(s.initial_balls, 1u);
}

TEST(Init, BoxIsCoveredWithinTolerance) {
    const auto law = RadiusLaw::deterministic(1.0);
    const auto s = init<2>(InitialSet<2>::box({0, 0}, {2, 1}), law, 1);
    RngStream rng(4);
    for (int i = 0; i < 2000; ++i) {
        const Point<2> p{2.0 * rng.uniform(), rng.uniform()};
        ASSERT_TRUE(s.region.covers(p));
    }
    // Nothing farther than the tolerance from the box is covered.
    for (const auto& b : s.region.balls()) {
        EXPECT_GE(b.center[0] - b.radius, -0.01 - 1e-12);
        EXPECT_LE(b.center[0] + b.radius, 2.01 + 1e-12);
    }
}

TEST(Init, RejectsDegenerateSets) {
    EXPECT_THROW(init<2>(InitialSet<2>::ball({0, 0}, 0.0), kUnit, 1), InvalidInput);
    EXPECT_THROW(init<2>(InitialSet<2>::box({0, 0}, {1, 0}), kUnit, 1), InvalidInput);
    EXPECT_THROW(init<2>(InitialSet<2>::box({0, 0}, {INFINITY, 1}), kUnit, 1), InvalidInput);
    EXPECT_THROW(init<2>(InitialSet<2>::ball_list({}), kUnit, 1), InvalidInput);
}

TEST(RunUntil, ZeroEventsLeavesStateUnchanged) {
    PoissonField<2> field(1, kUnit);
    auto s = init_default<2>(kUnit, 1);
    run_until<2>(s, StopCondition::after_events(0), field);
    EXPECT_TRUE(s.log.empty());
    EXPECT_EQ(s.clock, 0.0);
}

TEST(RunUntil, TimeStopSetsClockAndBoundsEvents) {
    PoissonField<2> field(2, kUnit);
    auto s = init_default<2>(kUnit, 2);
    run_until<2>(s, StopCondition::at_time(2.5), field);
    EXPECT_EQ(s.clock, 2.5);
    for (const auto& ev : s.log) EXPECT_LE(ev.time, 2.5);
    EXPECT_THROW(run_until<2>(s, StopCondition{}, field), InvalidInput);
    EXPECT_THROW(run_until<2>(s, StopCondition::at_time(-1.0), field), InvalidInput);
}

TEST(RunUntil, EventsAreIndexedIncreasingAndConnected) {
    PoissonField<2> field(3, RadiusLaw::uniform_interval(0.5, 1.5));
    auto s = init_default<2>(field.law(), 3);
    run_until<2>(s, StopCondition::after_events(500), field);
    ASSERT_EQ(s.log.size(), 500u);
    for (std::size_t i = 0; i < s.log.size(); ++i) {
        EXPECT_EQ(s.log[i].index, static_cast<std::int64_t>(i) + 1);
        if (i > 0) { EXPECT_GT(s.log[i].time, s.log[i - 1].time); }
        // Outburst centres lie in the union of the earlier balls.
        bool inside = false;
        for (std::size_t j = 0; j < s.initial_balls + i && !inside; ++j)
            inside = s.region.ball(j).contains(s.log[i].location);
        EXPECT_TRUE(inside) << i;
    }
}

TEST(Thinning, MatchesBruteForceOracle) {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        PoissonField<2> field(seed, kUnit);
        auto s = init_default<2>(kUnit, seed);
        run_until<2>(s, StopCondition::at_time(3.0), field);
        const auto ref = brute_force_thinning(field, {{0, 0}, 1.0}, 3.0, 12);
        ASSERT_EQ(s.log.size(), ref.size()) << seed;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            EXPECT_EQ(s.log[i].time, ref[i].time);
            EXPECT_EQ(s.log[i].location, ref[i].location);
        }
    }
}

TEST(Thinning, CopiedStateStepsIdentically) {
    PoissonField<2> field(21, kUnit);
    auto a = init_default<2>(kUnit, 21);
    run_until<2>(a, StopCondition::after_events(50), field);
    auto b = a;
    run_until<2>(a, StopCondition::after_events(50), field);
    run_until<2>(b, StopCondition::after_events(50), field);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].time, b.log[i].time);
}

TEST(FirstWait, BothSteppersGiveExponentialWithRatePi) {
    std::vector<double> thin, rate;
    for (std::uint64_t r = 0; r < 3000; ++r) {
        PoissonField<2> field(derive_seed(31, {r}), kUnit);
        auto s = init_default<2>(kUnit, r);
        thin.push_back(step_thinning<2>(s, field).time);
        RngStream rng(derive_seed(32, {r}));
        auto q = init_default<2>(kUnit, r);
        rate.push_back(step_rate<2>(q, rng).time);
    }
    const auto cdf = [](double t) { return 1.0 - std::exp(-std::numbers::pi * t); };
    EXPECT_TRUE(stats::ks_one_sample(thin, cdf).passes(0.01));
    EXPECT_TRUE(stats::ks_one_sample(rate, cdf).passes(0.01));
}

TEST(FirstWait, UniformLocationOnInitialBall) {
    // Radial CDF of a uniform point in the unit disk is r^2.
    std::vector<double> radii;
    for (std::uint64_t r = 0; r < 3000; ++r) {
        PoissonField<2> field(derive_seed(33, {r}), kUnit);
        auto s = init_default<2>(kUnit, r);
        radii.push_back(norm<2>(step_thinning<2>(s, field).location));
    }
    EXPECT_TRUE(stats::ks_one_sample(radii, [](double x) { return std::clamp(x * x, 0.0, 1.0); }).passes(0.01));
}

TEST(Coupling, LargerInitialSetDominatesPathwise) {
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        PoissonField<2> field(seed, kUnit);
        auto small = init_default<2>(kUnit, seed);
        auto big = init<2>(InitialSet<2>::ball({0.3, 0}, 2.0), kUnit, seed);
        run_until<2>(small, StopCondition::at_time(4.0), field);
        run_until<2>(big, StopCondition::at_time(4.0), field);
        std::vector<double> big_times;
        for (const auto& ev : big.log) big_times.push_back(ev.time);
        for (const auto& ev : small.log)
            EXPECT_TRUE(std::binary_search(big_times.begin(), big_times.end(), ev.time)) << seed;
    }
}

TEST(Restart, AtTimeZeroFromOriginEqualsFreshProcess) {
    PoissonField<2> field(50, kUnit);
    auto fresh = init_default<2>(kUnit, 50);
    auto re = restart<2>(field, origin<2>(), 0.0, kUnit);
    run_until<2>(fresh, StopCondition::after_events(100), field);
    run_until<2>(re, StopCondition::after_events(100), field);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(fresh.log[i].time, re.log[i].time);
}

TEST(Restart, StartsAtGivenTimeFromGammaBall) {
    PoissonField<2> field(51, kUnit);
    auto re = restart<2>(field, {5.0, -2.0}, 3.5, kUnit);
    EXPECT_EQ(re.clock, 3.5);
    EXPECT_EQ(re.origin_time, 3.5);
    EXPECT_EQ(re.region.ball(0).center, (Point<2>{5.0, -2.0}));
    const auto ev = step_thinning<2>(re, field);
    EXPECT_GT(ev.time, 3.5);
    EXPECT_THROW(restart<2>(field, origin<2>(), -1.0, kUnit), InvalidInput);
}

TEST(NonExplosion, FiniteEventsOnFiniteHorizonInEachDimension) {
    auto check = [](auto tag) {
        constexpr int D = decltype(tag)::value;
        PoissonField<D> field(60 + D, kUnit);
        auto s = init_default<D>(kUnit, 60);
        run_until<D>(s, StopCondition::at_time(3.0), field);
        EXPECT_EQ(s.clock, 3.0);
        EXPECT_LT(s.log.size(), 200000u);
    };
    check(std::integral_constant<int, 1>{});
    check(std::integral_constant<int, 2>{});
    check(std::integral_constant<int, 3>{});
}

TEST(RateStepper, AgreesInLawWithThinningAfterSeveralEvents) {
    std::vector<double> thin, rate;
    for (std::uint64_t r = 0; r < 400; ++r) {
        PoissonField<2> field(derive_seed(70, {r}), kUnit);
        auto s = init_default<2>(kUnit, r);
        run_until<2>(s, StopCondition::after_events(8), field);
        thin.push_back(s.clock);
        RngStream rng(derive_seed(71, {r}));
        auto q = init_default<2>(kUnit, r);
        run_until<2>(q, StopCondition::after_events(8), rng);
        rate.push_back(q.clock);
    }
    EXPECT_TRUE(stats::ks_two_sample(thin, rate).passes(0.01));
}

// Slower statistical properties of the growth process at experiment scale.
#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "contgrowth/estimators.hpp"
#include "contgrowth/harness/commands.hpp"
#include "contgrowth/stats.hpp"

using namespace contgrowth;

namespace {

const RadiusLaw kUnit = RadiusLaw::deterministic(1.0);
const auto kBall = InitialSet<2>::ball({0, 0}, 1.0);

}  // namespace

TEST(Properties, MeanCoverageTimePerUnitDistanceDoesNotIncrease) {
    const auto est = estimate_mu<2>({1, 0}, {10, 20, 40}, 50, kUnit, kBall, 101);
    for (std::size_t j = 1; j < 3; ++j) {
        const double prev = est.per_distance_means[j - 1] / est.distances[j - 1];
        const double cur = est.per_distance_means[j] / est.distances[j];
        const double prev_hi = prev + est.per_distance_ci_halfwidth[j - 1] / est.distances[j - 1];
        const double cur_lo = cur - est.per_distance_ci_halfwidth[j] / est.distances[j];
        EXPECT_LE(cur_lo, prev_hi) << "n = " << est.distances[j];
    }
}

TEST(Properties, ShapeConstantIsIsotropicAcrossRandomDirections) {
    RngStream rng(102);
    std::vector<double> mus;
    for (std::uint64_t k = 0; k < 8; ++k) {
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        mus.push_back(estimate_mu<2>({std::cos(a), std::sin(a)}, {10, 20, 30}, 20, kUnit, kBall,
                                     derive_seed(103, {k}))
                          .mu_hat);
    }
    const auto [lo, hi] = std::minmax_element(mus.begin(), mus.end());
    EXPECT_GT(*lo, 0.0);
    EXPECT_LE(*hi / *lo, 1.15);
}

TEST(Properties, UncoveredCentralBallBecomesRarerWithTime) {
    // P(B(0, s * delta) not inside S_s) with delta = 1 / (4 mu) at s = 50, 100, 200.
    const double mu = estimate_mu<2>({1, 0}, {10, 20, 30}, 20, kUnit, kBall, 104).mu_hat;
    const double delta = 1.0 / (4.0 * mu);
    const std::array<double, 3> horizons{50.0, 100.0, 200.0};
    std::array<std::size_t, 3> uncovered{};
    const std::size_t reps = 200;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto seed = derive_seed(105, {r});
        PoissonField<2> field(seed, kUnit);
        auto state = init_default<2>(kUnit, seed);
        std::vector<CoverageTracker<2>> trackers;
        for (double s : horizons) trackers.emplace_back(origin<2>(), s * delta, 0.25);
        std::array<Timing, 3> times{};
        std::size_t open = 3;
        std::int64_t slab = 0;
        for (const auto& b : state.region.balls())
            for (std::size_t j = 0; j < 3; ++j)
                if (!times[j] && trackers[j].absorb(b)) times[j] = 0.0, --open;
        run_until<2>(state, StopCondition::at_time(horizons.back()), field, [&](const auto& st, const Event<2>& ev) {
            for (std::size_t j = 0; j < 3; ++j)
                if (!times[j] && ev.time <= horizons[j] && trackers[j].absorb(ev.ball())) times[j] = ev.time, --open;
            if (st.cursor.slab > slab + 1) field.discard_before(slab = st.cursor.slab);
            return open > 0;
        });
        for (std::size_t j = 0; j < 3; ++j) uncovered[j] += !times[j] || *times[j] > horizons[j];
    }
    EXPECT_GE(uncovered[0], uncovered[1]);
    EXPECT_GE(uncovered[1], uncovered[2]);
}

TEST(Properties, LooseOuterContainmentAlwaysHolds) {
    harness::ExperimentConfig cfg;
    cfg.replications = 30;
    cfg.epsilon = 1.0;
    cfg.target_events = 3000;
    cfg.seed = 106;
    cfg.mu = estimate_mu<2>({1, 0}, {10, 20, 30}, 20, kUnit, kBall, 107).mu_hat;
    cfg.output_dir = (std::filesystem::temp_directory_path() / "contgrowth_loose_outer").string();
    const auto run = harness::cmd_shape_test(cfg);
    EXPECT_EQ(run.summary.outer_pass_fraction, 1.0);
    std::filesystem::remove_all(cfg.output_dir);
}

TEST(Properties, ShapePassFractionDoesNotDependOnInitialSet) {
    harness::ExperimentConfig cfg;
    cfg.replications = 50;
    cfg.epsilon = 0.2;
    cfg.target_events = 10000;
    cfg.seed = 108;
    cfg.mu = estimate_mu<2>({1, 0}, {10, 20, 30}, 20, kUnit, kBall, 109).mu_hat;
    const auto dir = std::filesystem::temp_directory_path() / "contgrowth_initial_sets";
    cfg.output_dir = (dir / "ball").string();
    const auto ball = harness::cmd_shape_test(cfg).summary;
    cfg.initial_set = {{"kind", "unit_box"}};
    cfg.output_dir = (dir / "box").string();
    const auto box = harness::cmd_shape_test(cfg).summary;
    EXPECT_LE(std::abs(ball.pass_fraction - box.pass_fraction), 0.10)
        << "ball " << ball.pass_fraction << ", box " << box.pass_fraction;
    std::filesystem::remove_all(dir);
}

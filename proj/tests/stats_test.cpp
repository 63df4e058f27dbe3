#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "contgrowth/stats.hpp"

using namespace contgrowth;

TEST(Stats, KolmogorovSurvivalKnownValues) {
    EXPECT_NEAR(stats::kolmogorov_q(1.0), 0.26999967, 1e-6);
    EXPECT_NEAR(stats::kolmogorov_q(1.36), 0.0494, 5e-4);
    EXPECT_NEAR(stats::kolmogorov_q(1.628), 0.0100, 2e-4);
    EXPECT_DOUBLE_EQ(stats::kolmogorov_q(0.0), 1.0);
}

TEST(Stats, KsDetectsShiftAndAcceptsSameLaw) {
    RngStream rng(1);
    std::vector<double> a, b, c;
    for (int i = 0; i < 5000; ++i) {
        a.push_back(rng.uniform());
        b.push_back(rng.uniform());
        c.push_back(rng.uniform() + 0.1);
    }
    EXPECT_TRUE(stats::ks_two_sample(a, b).passes(0.01));
    EXPECT_FALSE(stats::ks_two_sample(a, c).passes(0.01));
    EXPECT_TRUE(stats::ks_one_sample(a, [](double x) { return std::clamp(x, 0.0, 1.0); }).passes(0.01));
    EXPECT_FALSE(stats::ks_one_sample(c, [](double x) { return std::clamp(x, 0.0, 1.0); }).passes(0.01));
}

TEST(Stats, ChiSquareUpperTail) {
    // Two bins leave one degree of freedom, where P(X > x) = erfc(sqrt(x / 2)).
    const std::vector<double> o{113.86, 86.14}, e{100.0, 100.0};
    const auto r = stats::chi_square(o, e);
    const double x2 = 2 * 13.86 * 13.86 / 100.0;
    EXPECT_NEAR(r.statistic, x2, 1e-9);
    EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(x2 / 2.0)), 1e-9);
    EXPECT_NEAR(r.p_value, 0.05, 1e-3);
}

TEST(Stats, WelchTTest) {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{1, 2, 3, 4, 5}, c{11, 12, 13, 14, 15};
    EXPECT_NEAR(stats::welch_t(a, b).p_value, 1.0, 1e-12);
    EXPECT_LT(stats::welch_t(a, c).p_value, 1e-4);
}

TEST(Stats, OlsSlopeAndQuantiles) {
    const std::vector<double> x{10, 20, 30}, y{13, 23, 33};
    EXPECT_DOUBLE_EQ(stats::ols_slope(x, y), 1.0);
    EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(stats::quantile({5}, 0.9), 5.0);
}

TEST(Stats, BootstrapIsSeededAndBracketsTheMean) {
    const std::vector<double> xs{1.0, 1.2, 0.9, 1.1, 1.05, 0.95, 1.3, 0.8};
    const auto a = stats::bootstrap_mean_ci(xs, 1000, 5);
    const auto b = stats::bootstrap_mean_ci(xs, 1000, 5);
    EXPECT_EQ(a.low, b.low);
    EXPECT_EQ(a.high, b.high);
    EXPECT_LT(a.low, stats::mean(xs));
    EXPECT_GT(a.high, stats::mean(xs));
    EXPECT_TRUE(a.overlaps({a.high, a.high + 1}));
    EXPECT_FALSE(a.overlaps({a.high + 1, a.high + 2}));
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "contgrowth/rng.hpp"

namespace contgrowth::stats {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return std::nan("");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) return std::nan("");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

inline double std_error(std::span<const double> xs) {
    return std::sqrt(variance(xs) / static_cast<double>(xs.size()));
}

// Two-sided 95% half-width of the mean from the Student t distribution.
inline double mean_ci_halfwidth(std::span<const double> xs, double level = 0.95) {
    if (xs.size() < 2) return std::numeric_limits<double>::infinity();
    boost::math::students_t t(static_cast<double>(xs.size() - 1));
    return boost::math::quantile(t, 0.5 + 0.5 * level) * std_error(xs);
}

// Empirical quantile with linear interpolation (type 7).
inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double h = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct TestResult {
    double statistic;
    double p_value;
    bool passes(double alpha) const { return p_value >= alpha; }
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
inline TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("KS test needs data");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

/// Two-sample Kolmogorov-Smirnov test.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs data");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

/// Pearson chi-square goodness of fit. Expected counts must be positive.
inline TestResult chi_square(std::span<const double> observed, std::span<const double> expected,
                             std::size_t fitted_params = 0) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw std::invalid_argument("chi-square needs matching bins");
    double x2 = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (!(expected[i] > 0.0)) throw std::invalid_argument("chi-square expected count must be positive");
        const double r = observed[i] - expected[i];
        x2 += r * r / expected[i];
    }
    const double dof = static_cast<double>(observed.size() - 1 - fitted_params);
    boost::math::chi_squared dist(dof);
    return {x2, boost::math::cdf(boost::math::complement(dist, x2))};
}

/// Welch two-sample t-test for equal means.
inline TestResult welch_t(std::span<const double> a, std::span<const double> b) {
    const double va = variance(a) / static_cast<double>(a.size());
    const double vb = variance(b) / static_cast<double>(b.size());
    const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
    const double dof = (va + vb) * (va + vb) /
                       (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    boost::math::students_t dist(dof);
    return {t, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)))};
}

// Binomial standard deviation of a proportion.
inline double proportion_sigma(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

struct Interval {
    double low;
    double high;
    bool overlaps(const Interval& o) const { return low <= o.high && o.low <= high; }
};

/// Percentile bootstrap interval of the mean.
inline Interval bootstrap_mean_ci(std::span<const double> xs, std::size_t resamples, std::uint64_t seed,
                                  double level = 0.95) {
    RngStream rng(seed);
    std::vector<double> means;
    means.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) s += xs[rng.below(xs.size())];
        means.push_back(s / static_cast<double>(xs.size()));
    }
    const double tail = 0.5 * (1.0 - level);
    return {quantile(means, tail), quantile(means, 1.0 - tail)};
}

// Ordinary least-squares slope of y on x with a free intercept.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace contgrowth::stats

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "contgrowth/dynamics.hpp"
#include "contgrowth/estimators.hpp"
#include "contgrowth/geometry.hpp"
#include "contgrowth/parallel.hpp"
#include "contgrowth/stats.hpp"

// Packaged checks shared by `selftest` and the acceptance suite.
namespace contgrowth::harness {

// Area of the union of two unit disks whose centres are one unit apart.
inline double unit_lens_union_area() {
    const double lens = 2.0 * std::acos(0.5) - 0.5 * std::sqrt(3.0);
    return 2.0 * std::numbers::pi - lens;
}

inline BallUnion<2> unit_lens_union() {
    BallUnion<2> u(1.0);
    u.insert({{0.0, 0.0}, 1.0});
    u.insert({{1.0, 0.0}, 1.0});
    return u;
}

struct MeasureCheck {
    double estimate;
    double oracle;
    double rel_error;
};

inline MeasureCheck lens_measure_check(std::uint64_t seed, double target_rel_error = 1e-3) {
    RngStream rng(seed);
    const auto m = measure<2>(unit_lens_union(), target_rel_error, rng);
    const double oracle = unit_lens_union_area();
    return {m.value, oracle, std::abs(m.value - oracle) / oracle};
}

/// Grid lookups against linear scans on random unions; returns the number of disagreements.
inline std::size_t grid_completeness_mismatches(std::uint64_t seed, std::size_t unions = 5,
                                                std::size_t queries = 10000) {
    std::size_t bad = 0;
    for (std::size_t u = 0; u < unions; ++u) {
        RngStream rng(derive_seed(seed, {u}));
        BallUnion<2> region(1.0);
        for (int i = 0; i < 200; ++i) {
            const double r = (i % 25 == 0) ? rng.uniform(1.0, 3.0) : rng.uniform(0.1, 1.0);
            region.insert({{rng.uniform(-6.0, 6.0), rng.uniform(-6.0, 6.0)}, r});
        }
        for (std::size_t q = 0; q < queries; ++q) {
            const Point<2> p{rng.uniform(-9.0, 9.0), rng.uniform(-9.0, 9.0)};
            if (region.covers(p) != region.covers_linear(p)) ++bad;
        }
    }
    return bad;
}

/// Chi-square of sample_uniform cell counts against fine-grid cell areas on the
/// unit lens union (cell width 0.05); cells with small expectation are pooled.
inline stats::TestResult lens_sampling_chi_square(std::uint64_t seed, std::size_t draws = 100000) {
    const auto region = unit_lens_union();
    const double w = 0.05;
    const int nx = 60, ny = 40;  // [-1, 2] x [-1, 1]
    const int sub = 40;
    std::vector<double> area(static_cast<std::size_t>(nx * ny), 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            int hit = 0;
            for (int a = 0; a < sub; ++a)
                for (int b = 0; b < sub; ++b) {
                    const Point<2> p{-1.0 + w * (i + (a + 0.5) / sub), -1.0 + w * (j + (b + 0.5) / sub)};
                    hit += region.covers_linear(p);
                }
            area[static_cast<std::size_t>(i * ny + j)] = w * w * hit / (sub * sub);
        }
    double total_area = 0.0;
    for (double a : area) total_area += a;

    std::vector<double> counts(area.size(), 0.0);
    RngStream rng(seed);
    for (std::size_t k = 0; k < draws; ++k) {
        const auto p = sample_uniform<2>(region, rng);
        const int i = std::clamp(static_cast<int>(std::floor((p[0] + 1.0) / w)), 0, nx - 1);
        const int j = std::clamp(static_cast<int>(std::floor((p[1] + 1.0) / w)), 0, ny - 1);
        counts[static_cast<std::size_t>(i * ny + j)] += 1.0;
    }
    std::vector<double> obs, exp;
    double pool_obs = 0.0, pool_exp = 0.0;
    for (std::size_t c = 0; c < area.size(); ++c) {
        const double e = static_cast<double>(draws) * area[c] / total_area;
        if (e >= 5.0) {
            obs.push_back(counts[c]);
            exp.push_back(e);
        } else {
            pool_obs += counts[c];
            pool_exp += e;
        }
    }
    if (pool_exp > 0.0) {
        obs.push_back(pool_obs);
        exp.push_back(pool_exp);
    }
    return stats::chi_square(obs, exp);
}

struct FirstEventSample {
    std::vector<double> waits;      // Delta_1
    std::vector<double> distances;  // |X_1|
};

/// First outburst from S_0 = B(0, 1) in d = 2 under a deterministic(1) law.
inline FirstEventSample first_events(bool thinning, std::size_t reps, std::uint64_t seed) {
    const auto law = RadiusLaw::deterministic(1.0);
    FirstEventSample out;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto s = derive_seed(seed, {r});
        auto state = init_default<2>(law, s);
        Event<2> ev;
        if (thinning) {
            PoissonField<2> field(s, law);
            ev = step_thinning<2>(state, field);
        } else {
            RngStream rng(s);
            ev = step_rate<2>(state, rng);
        }
        out.waits.push_back(ev.time);
        out.distances.push_back(norm<2>(ev.location));
    }
    return out;
}

struct PathwiseCounts {
    std::size_t events = 0;
    std::size_t prefixes = 0;
    std::size_t disconnected = 0;
    std::size_t extent_violations = 0;
    std::size_t non_increasing = 0;
    bool ok() const { return events > 0 && disconnected == 0 && extent_violations == 0 && non_increasing == 0; }
};

/// Connectivity, extent and monotone-time checks over independent thinning runs
/// (d = 2, deterministic(1)).
inline PathwiseCounts pathwise_invariants(std::size_t runs, std::uint64_t events, std::uint64_t seed,
                                          unsigned threads = 1) {
    const auto law = RadiusLaw::deterministic(1.0);
    std::vector<PathwiseCounts> per(runs);
    parallel_for(runs, threads, [&](std::size_t r) {
        const auto s = derive_seed(seed, {r});
        PoissonField<2> field(s, law);
        auto state = init_default<2>(law, s);
        auto& c = per[r];
        double last = state.clock;
        std::uint64_t n = 0;
        // Connectivity is checked against a reference union built by linear scan order.
        BallUnion<2> before(law.r_max());
        for (std::size_t i = 0; i < state.initial_balls; ++i) before.insert(state.region.ball(i));
        run_until<2>(state, StopCondition::after_events(events), field, [&](const auto& st, const Event<2>& ev) {
            ++n;
            ++c.events;
            ++c.prefixes;
            if (!before.covers_linear(ev.location)) ++c.disconnected;
            before.insert(ev.ball());
            if (!(ev.time > last)) ++c.non_increasing;
            last = ev.time;
            if (first_uncovered_extent<2>(st.region) > st.initial_extent + static_cast<double>(n) * law.r_max() + 1e-12)
                ++c.extent_violations;
            return true;
        });
    });
    PathwiseCounts total;
    for (const auto& c : per) {
        total.events += c.events;
        total.prefixes += c.prefixes;
        total.disconnected += c.disconnected;
        total.extent_violations += c.extent_violations;
        total.non_increasing += c.non_increasing;
    }
    return total;
}

struct ChainCheck {
    ChainBound bound;
    double mean_hitting_time = 0.0;
    double upper_ci = 0.0;  // one-sided upper 95% limit of the mean
    std::vector<double> samples;
};

/// Empirical T(x) at |x| = 5 (d = 2, deterministic(1)) against the chain bound.
inline ChainCheck chain_bound_check(std::size_t reps, std::uint64_t seed, unsigned threads = 1) {
    const auto law = RadiusLaw::deterministic(1.0);
    const Point<2> x{5.0, 0.0};
    ChainCheck out;
    out.bound = chain_bound<2>(x, law);
    out.samples.resize(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        const auto s = derive_seed(seed, {r});
        PoissonField<2> field(s, law);
        auto state = init_default<2>(law, s);
        Timing hit;
        run_until<2>(state, StopCondition::after_events(1'000'000), field, [&](const auto&, const Event<2>& ev) {
            if (ev.ball().contains(x)) hit = ev.time;
            return !hit;
        });
        out.samples[r] = hit.value_or(std::numeric_limits<double>::infinity());
    });
    out.mean_hitting_time = stats::mean(out.samples);
    boost::math::students_t t(static_cast<double>(reps - 1));
    out.upper_ci = out.mean_hitting_time + boost::math::quantile(t, 0.95) * stats::std_error(out.samples);
    return out;
}

struct SubadditivityCheck {
    std::size_t trials = 0;
    std::size_t complete = 0;
    std::size_t holds = 0;
    std::size_t needed_slack = 0;
    std::vector<SubadditivityTrial> results;
};

inline SubadditivityCheck subadditivity_check(std::size_t trials, double x_len, double y_len, std::uint64_t seed,
                                              double net_resolution, unsigned threads = 1) {
    const auto law = RadiusLaw::deterministic(1.0);
    SubadditivityCheck out;
    out.trials = trials;
    out.results.resize(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        out.results[i] =
            subadditivity_trial<2>({x_len, 0.0}, {y_len, 0.0}, law, derive_seed(seed, {i}), net_resolution);
    });
    for (const auto& r : out.results) {
        out.complete += r.complete;
        out.holds += r.complete && r.holds;
        out.needed_slack += r.complete && r.coverage_y > r.coverage_x + r.restarted;
    }
    return out;
}

}  // namespace contgrowth::harness

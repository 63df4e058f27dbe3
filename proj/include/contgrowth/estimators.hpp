#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/gamma.hpp>

#include "contgrowth/dynamics.hpp"
#include "contgrowth/errors.hpp"
#include "contgrowth/geometry.hpp"
#include "contgrowth/parallel.hpp"
#include "contgrowth/stats.hpp"

namespace contgrowth {

// Hitting and coverage times; nullopt means "uncovered at horizon".
using Timing = std::optional<double>;

/// T(x): 0 if x lies in the initial set, else the time of the first event
/// whose ball contains x.
template <int D>
Timing hitting_time(const GrowthState<D>& state, const Point<D>& x) {
    for (std::size_t i = 0; i < state.initial_balls; ++i)
        if (state.region.ball(i).contains(x)) return state.origin_time;
    for (const auto& ev : state.log)
        if (ev.ball().contains(x)) return ev.time;
    return std::nullopt;
}

/// Coverage time of B(x, gamma) over the recorded history, using the
/// conservative net predicate. Coverage, once reached, is never lost.
template <int D>
Timing coverage_time(const GrowthState<D>& state, const Point<D>& x, double gamma, double net_resolution) {
    CoverageTracker<D> tracker(x, gamma, net_resolution);
    for (std::size_t i = 0; i < state.initial_balls; ++i)
        if (tracker.absorb(state.region.ball(i))) return state.origin_time;
    for (const auto& ev : state.log)
        if (tracker.absorb(ev.ball())) return ev.time;
    return std::nullopt;
}

/// Steps `state` on `field` until every tracker is covered or `event_cap`
/// further events were appended. Trackers are first fed the current region.
/// With `exclusive_field` set, slabs behind the scan are dropped from the field.
template <int D>
void run_until_covered(GrowthState<D>& state, PoissonField<D>& field, std::span<CoverageTracker<D>> trackers,
                       std::span<Timing> times, std::uint64_t event_cap, bool exclusive_field = false) {
    std::size_t open = 0;
    for (std::size_t j = 0; j < trackers.size(); ++j) {
        if (times[j]) continue;
        bool done = false;
        for (const auto& b : state.region.balls())
            if (trackers[j].absorb(b)) {
                done = true;
                break;
            }
        if (done)
            times[j] = state.clock;
        else
            ++open;
    }
    if (open == 0 || event_cap == 0) return;
    std::int64_t slab = field.slab_of(state.clock);
    run_until<D>(state, StopCondition::after_events(event_cap), field, [&](const auto& st, const Event<D>& ev) {
        for (std::size_t j = 0; j < trackers.size(); ++j) {
            if (times[j]) continue;
            if (trackers[j].absorb(ev.ball())) {
                times[j] = ev.time;
                --open;
            }
        }
        if (exclusive_field && st.cursor.slab > slab + 1) {
            slab = st.cursor.slab;
            field.discard_before(slab);
        }
        return open > 0;
    });
}

/// T~(x, y): time for the process restarted at (x, s) on `field` to cover B(y, gamma),
/// measured from s.
template <int D>
Timing coverage_time_restarted(const PoissonField<D>& field, const Point<D>& x, double s, const Point<D>& y,
                               double gamma, double net_resolution, std::uint64_t event_cap = 1'000'000) {
    auto state = restart<D>(field, x, s, field.law());
    CoverageTracker<D> tracker(y, gamma, net_resolution);
    if (tracker.absorb(state.region.ball(0))) return 0.0;
    Timing hit;
    run_until<D>(state, StopCondition::after_events(event_cap), field, [&](const auto&, const Event<D>& ev) {
        if (tracker.absorb(ev.ball())) hit = ev.time - s;
        return !hit;
    });
    return hit;
}

struct MuOptions {
    double net_resolution = 0.0;  // 0 selects gamma/100
    std::uint64_t event_cap = 1'000'000;
    std::size_t bootstrap_resamples = 1000;
    unsigned threads = 1;
    double max_failure_fraction = 0.05;
};

struct MuEstimate {
    double mu_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool ci_degenerate = false;
    std::vector<double> direction;
    std::vector<double> distances;
    std::size_t replications = 0;  // successful
    std::size_t failed_replications = 0;
    std::vector<double> per_distance_means;
    std::vector<double> per_distance_ci_halfwidth;
    std::vector<std::uint64_t> replication_seeds;
    std::vector<std::vector<double>> coverage_times;  // [replication][distance]; empty row if failed
};

/// Shape constant along `direction` from the growth of mean coverage times.
///
/// Every (replication, distance) pair runs a fresh process from `initial` until
/// B(L * direction, gamma) is covered. mu_hat is the least-squares slope of mean
/// coverage time against L (free intercept), which equals the mean of the
/// per-replication slopes; the interval is a percentile bootstrap over those.
template <int D>
MuEstimate estimate_mu(const Point<D>& direction, std::vector<double> distances, std::size_t reps,
                       const RadiusLaw& law, const InitialSet<D>& initial, std::uint64_t seed,
                       const MuOptions& opts = {}) {
    if (distances.size() < 3) throw InvalidInput("estimate_mu needs at least three distances");
    for (std::size_t i = 1; i < distances.size(); ++i)
        if (!(distances[i] > distances[i - 1])) throw InvalidInput("distances must be strictly increasing");
    if (reps < 1) throw InvalidInput("estimate_mu needs at least one replication");
    const double len = norm<D>(direction);
    if (!(len > 0.0) || !std::isfinite(len)) throw InvalidInput("direction must be a nonzero finite vector");
    const Point<D> unit = scaled<D>(direction, 1.0 / len);
    const double gamma = law.gamma();
    const double eps = opts.net_resolution > 0.0 ? opts.net_resolution : gamma / 100.0;

    MuEstimate out;
    out.direction.assign(unit.begin(), unit.end());
    out.distances = distances;
    out.replication_seeds.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) out.replication_seeds[r] = derive_seed(seed, {r});

    const std::size_t nd = distances.size();
    std::vector<std::vector<Timing>> times(reps, std::vector<Timing>(nd));
    parallel_for(reps * nd, opts.threads, [&](std::size_t task) {
        const std::size_t r = task / nd;
        const std::size_t j = task % nd;
        PoissonField<D> field(derive_seed(out.replication_seeds[r], {j}), law);
        auto state = init<D>(initial, law, out.replication_seeds[r]);
        CoverageTracker<D> tracker(scaled<D>(unit, distances[j]), gamma, eps);
        Timing t;
        run_until_covered<D>(state, field, std::span(&tracker, 1), std::span(&t, 1), opts.event_cap, true);
        times[r][j] = t;
    });

    std::vector<double> slopes;
    std::vector<std::vector<double>> by_distance(nd);
    out.coverage_times.resize(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        if (!std::all_of(times[r].begin(), times[r].end(), [](const Timing& t) { return t.has_value(); })) {
            ++out.failed_replications;
            continue;
        }
        std::vector<double> row;
        for (std::size_t j = 0; j < nd; ++j) {
            row.push_back(*times[r][j]);
            by_distance[j].push_back(*times[r][j]);
        }
        slopes.push_back(stats::ols_slope(distances, row));
        out.coverage_times[r] = std::move(row);
    }
    if (static_cast<double>(out.failed_replications) > opts.max_failure_fraction * static_cast<double>(reps) ||
        slopes.empty()) {
        throw EstimationAborted(std::to_string(out.failed_replications) + " of " + std::to_string(reps) +
                                " replications hit the event cap of " + std::to_string(opts.event_cap) +
                                " before covering every target; raise the cap or lower the distances");
    }
    out.replications = slopes.size();
    for (std::size_t j = 0; j < nd; ++j) {
        out.per_distance_means.push_back(stats::mean(by_distance[j]));
        out.per_distance_ci_halfwidth.push_back(stats::mean_ci_halfwidth(by_distance[j]));
    }
    out.mu_hat = stats::mean(slopes);
    if (slopes.size() < 2) {
        out.ci_degenerate = true;
        out.ci_low = 0.0;
        out.ci_high = std::numeric_limits<double>::infinity();
    } else {
        const auto ci = stats::bootstrap_mean_ci(slopes, opts.bootstrap_resamples, derive_seed(seed, {~0ULL}));
        out.ci_low = std::min(ci.low, out.mu_hat);
        out.ci_high = std::max(ci.high, out.mu_hat);
    }
    return out;
}

/// Chain-of-balls upper bound on T(x): a sum of k i.i.d. Exp(lambda) waits for
/// an outburst of radius >= gamma in small balls spaced gamma/2 apart.
struct ChainBound {
    std::vector<double> x;
    double bound_mean = 0.0;
    double lambda = 0.0;
    double c = 0.0;
    double p = 0.0;
    std::uint64_t k = 0;

    // Quantile of the Gamma(k, lambda) bounding variable.
    double quantile(double q) const {
        boost::math::gamma_distribution<double> g(static_cast<double>(k), 1.0 / lambda);
        return boost::math::quantile(g, q);
    }
};

template <int D>
ChainBound chain_bound(const Point<D>& x, const RadiusLaw& law) {
    if (!(law.p_gamma() > 0.0)) throw BoundInapplicable("chain bound needs P(R >= gamma) > 0");
    ChainBound b;
    b.x.assign(x.begin(), x.end());
    const double gamma = law.gamma();
    const double ratio = std::ceil(norm<D>(x) / gamma);
    b.k = 2 * static_cast<std::uint64_t>(std::max(1.0, ratio));
    b.c = gamma / 10.0;
    b.p = law.p_gamma();
    b.lambda = b.p * unit_ball_volume(D) * std::pow(b.c, D);
    b.bound_mean = static_cast<double>(b.k) / b.lambda;
    return b;
}

struct ShapeReport {
    double t = 0.0;
    double epsilon = 0.0;
    bool inner_ok = false;
    bool outer_ok = false;
    double inner_margin = 0.0;  // min over the inner net of the deepest covering depth; < 0 if uncovered
    double outer_radius_ratio = 0.0;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
};

/// Sandwich check (1-eps)(t/mu) B(0,1) in S_t and S_t in (1+eps)(t/mu) B(0,1)
/// at t = state.clock.
template <int D>
ShapeReport shape_report(const GrowthState<D>& state, double mu, double epsilon, double net_resolution) {
    if (!(mu > 0.0)) throw InvalidInput("mu must be positive");
    if (!(state.clock > 0.0)) throw InvalidInput("shape report needs a positive evaluation time");
    if (!(net_resolution > 0.0)) throw InvalidInput("net_resolution must be positive");
    ShapeReport rep;
    rep.t = state.clock;
    rep.epsilon = epsilon;
    const double scale = state.clock / mu;
    rep.inner_radius = (1.0 - epsilon) * scale;
    rep.outer_radius = (1.0 + epsilon) * scale;

    const double extent = first_uncovered_extent<D>(state.region);
    rep.outer_radius_ratio = extent / scale;
    rep.outer_ok = rep.outer_radius_ratio <= 1.0 + epsilon;

    rep.inner_margin = std::numeric_limits<double>::infinity();
    if (rep.inner_radius > 0.0) {
        const auto& region = state.region;
        for (const auto& q : ball_net<D>(origin<D>(), rep.inner_radius, net_resolution)) {
            double depth = -std::numeric_limits<double>::infinity();
            region.for_each_near(Box<D>{q, q}, [&](std::size_t i) {
                const auto& b = region.ball(i);
                depth = std::max(depth, b.radius - distance<D>(q, b.center));
            });
            if (depth == -std::numeric_limits<double>::infinity()) {
                // No ball registered nearby: distance to the region is at least the cell size.
                depth = -region.cell_size();
            }
            rep.inner_margin = std::min(rep.inner_margin, depth);
        }
    }
    rep.inner_ok = rep.inner_margin >= 0.0;
    return rep;
}

/// Per-point membership in the strongly infected set {x : B(x, gamma) in S_t}.
template <int D>
std::vector<bool> strong_infection_set_probe(const GrowthState<D>& state, std::span<const Point<D>> points,
                                             double gamma, double net_resolution) {
    std::vector<bool> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(covers_ball<D>(state.region, p, gamma, net_resolution));
    return out;
}

/// One coupled trial of T~(y) <= T~(x) + T~(x, y).
struct SubadditivityTrial {
    double coverage_x = 0.0;   // T~(x)
    double coverage_y = 0.0;   // T~(y)
    double restarted = 0.0;    // T~(x, y)
    double slack = 0.0;        // gap to the next parent event after T~(x) + T~(x, y)
    bool holds = false;
    bool complete = false;     // false when a run hit the event cap
};

template <int D>
SubadditivityTrial subadditivity_trial(const Point<D>& x, const Point<D>& y, const RadiusLaw& law,
                                       std::uint64_t seed, double net_resolution,
                                       std::uint64_t event_cap = 1'000'000) {
    SubadditivityTrial out;
    PoissonField<D> field(seed, law);
    auto parent = init_default<D>(law, seed);
    std::array<CoverageTracker<D>, 2> trackers{CoverageTracker<D>(x, law.gamma(), net_resolution),
                                               CoverageTracker<D>(y, law.gamma(), net_resolution)};
    std::array<Timing, 2> times{};
    run_until_covered<D>(parent, field, trackers, times, event_cap);
    if (!times[0] || !times[1]) return out;
    const auto xy = coverage_time_restarted<D>(field, x, *times[0], y, law.gamma(), net_resolution, event_cap);
    if (!xy) return out;
    out.complete = true;
    out.coverage_x = *times[0];
    out.coverage_y = *times[1];
    out.restarted = *xy;
    const double bound = out.coverage_x + out.restarted;
    // Parent has recorded every event up to T~(y); extend it if the bound is later.
    auto it = std::upper_bound(parent.log.begin(), parent.log.end(), bound,
                               [](double t, const Event<D>& e) { return t < e.time; });
    if (it == parent.log.end()) {
        run_until<D>(parent, StopCondition::after_events(event_cap), field,
                     [&](const auto&, const Event<D>& ev) { return ev.time <= bound; });
        if (parent.log.back().time <= bound) {
            out.complete = false;
            return out;
        }
        it = parent.log.end() - 1;
    }
    out.slack = it->time - bound;
    out.holds = out.coverage_y <= bound + out.slack;
    return out;
}

}  // namespace contgrowth

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "contgrowth/errors.hpp"
#include "contgrowth/geometry.hpp"
#include "contgrowth/poisson_field.hpp"
#include "contgrowth/radius_law.hpp"
#include "contgrowth/rng.hpp"

namespace contgrowth {

template <int D>
struct Event {
    std::int64_t index = 0;  // n >= 1; n = 0 is the initial set
    double time = 0.0;
    Point<D> location{};
    double radius = 0.0;

    Ball<D> ball() const { return {location, radius}; }
};

/// Bounded initial region of positive volume.
template <int D>
struct InitialSet {
    struct BallShape {
        Point<D> center;
        double radius;
    };
    struct BoxShape {
        Point<D> lo;
        Point<D> hi;
    };
    struct BallList {
        std::vector<Ball<D>> balls;
    };
    std::variant<BallShape, BoxShape, BallList> shape;

    static InitialSet ball(const Point<D>& c, double r) { return {BallShape{c, r}}; }
    static InitialSet box(const Point<D>& lo, const Point<D>& hi) { return {BoxShape{lo, hi}}; }
    static InitialSet ball_list(std::vector<Ball<D>> bs) { return {BallList{std::move(bs)}}; }

    // Axis-aligned box of unit volume centred at the origin.
    static InitialSet unit_box() {
        Point<D> lo, hi;
        lo.fill(-0.5);
        hi.fill(0.5);
        return box(lo, hi);
    }
};

/// Finite ball cover of a box: the union contains the box and every covering
/// point lies within `tolerance` of it. Sub-boxes are split in half along every
/// axis until their circumscribed ball fits in the box grown by tolerance/sqrt(d).
template <int D>
std::vector<Ball<D>> cover_box(const Point<D>& lo, const Point<D>& hi, double tolerance) {
    const double slack = tolerance / std::sqrt(static_cast<double>(D));
    std::vector<Ball<D>> out;
    std::vector<Box<D>> todo{Box<D>{lo, hi}};
    while (!todo.empty()) {
        const Box<D> b = todo.back();
        todo.pop_back();
        Ball<D> ball;
        double r2 = 0.0;
        for (int i = 0; i < D; ++i) {
            ball.center[i] = 0.5 * (b.lo[i] + b.hi[i]);
            const double half = 0.5 * (b.hi[i] - b.lo[i]);
            r2 += half * half;
        }
        ball.radius = std::sqrt(r2);
        bool fits = true;
        for (int i = 0; i < D; ++i)
            if (ball.center[i] - ball.radius < lo[i] - slack || ball.center[i] + ball.radius > hi[i] + slack)
                fits = false;
        if (fits) {
            out.push_back(ball);
            continue;
        }
        for (std::uint32_t corner = 0; corner < (1u << D); ++corner) {
            Box<D> child;
            for (int i = 0; i < D; ++i) {
                const double mid = ball.center[i];
                const bool upper = (corner >> i) & 1u;
                child.lo[i] = upper ? mid : b.lo[i];
                child.hi[i] = upper ? b.hi[i] : mid;
            }
            todo.push_back(child);
        }
    }
    return out;
}

template <int D>
class ThinningCursor;

/// Full history of one growth process.
template <int D>
struct GrowthState {
    static constexpr int dim = D;

    BallUnion<D> region;
    double clock = 0.0;
    std::vector<Event<D>> log;
    double origin_time = 0.0;
    RadiusLaw law;
    std::uint64_t seed = 0;
    std::size_t initial_balls = 0;  // leading balls of `region` forming S_0
    double initial_extent = 0.0;

    // Scan position of the thinning stepper; part of the state so copies step identically.
    struct Candidate {
        double time;
        const FieldPoint<D>* point;
        bool operator>(const Candidate& o) const { return time > o.time; }
    };
    struct Cursor {
        const void* field = nullptr;
        std::int64_t slab = 0;
        CellKey<D> lo{}, hi{};
        std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
    } cursor;

    GrowthState(BallUnion<D> r, RadiusLaw l) : region(std::move(r)), law(std::move(l)) {}

    std::int64_t next_index() const { return static_cast<std::int64_t>(log.size()) + 1; }
};

template <int D>
GrowthState<D> init(const InitialSet<D>& initial, const RadiusLaw& law, std::uint64_t seed) {
    std::vector<Ball<D>> balls = std::visit(
        [&](const auto& s) -> std::vector<Ball<D>> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, typename InitialSet<D>::BallShape>) {
                return {Ball<D>{s.center, s.radius}};
            } else if constexpr (std::is_same_v<S, typename InitialSet<D>::BoxShape>) {
                for (int i = 0; i < D; ++i)
                    if (!std::isfinite(s.lo[i]) || !std::isfinite(s.hi[i]))
                        throw InvalidInput("initial box must be bounded");
                for (int i = 0; i < D; ++i)
                    if (!(s.hi[i] > s.lo[i])) throw InvalidInput("initial box must have positive volume");
                return cover_box<D>(s.lo, s.hi, law.gamma() / 100.0);
            } else {
                return s.balls;
            }
        },
        initial.shape);
    if (balls.empty()) throw InvalidInput("initial set must have positive volume");
    for (const auto& b : balls) {
        if (!is_finite<D>(b.center) || !std::isfinite(b.radius)) throw InvalidInput("initial set must be bounded");
        if (!(b.radius > 0.0)) throw InvalidInput("initial set must have positive volume");
    }

    GrowthState<D> state(BallUnion<D>(law.r_max()), law);
    for (const auto& b : balls) state.region.insert(b);
    state.seed = seed;
    state.initial_balls = balls.size();
    state.initial_extent = state.region.extent();
    return state;
}

template <int D>
GrowthState<D> init_default(const RadiusLaw& law, std::uint64_t seed) {
    return init<D>(InitialSet<D>::ball(origin<D>(), law.gamma()), law, seed);
}

namespace detail {

template <int D>
Event<D> commit(GrowthState<D>& state, double time, const Point<D>& where, double radius) {
    Event<D> ev{state.next_index(), time, where, radius};
    state.region.insert(ev.ball());
    state.log.push_back(ev);
    state.clock = time;
    return ev;
}

// Push every point with time > state.clock from the blocks of the current slab in
// the cells of [lo, hi] that lie outside the previously gathered cell range.
template <int D>
void gather(GrowthState<D>& state, const PoissonField<D>& field, const CellKey<D>& lo, const CellKey<D>& hi,
            bool have_previous) {
    auto& c = state.cursor;
    BallUnion<D>::for_each_cell(lo, hi, [&](const CellKey<D>& k) {
        if (have_previous) {
            bool inside = true;
            for (int i = 0; i < D; ++i)
                if (k[i] < c.lo[i] || k[i] > c.hi[i]) inside = false;
            if (inside) return;
        }
        for (const auto& fp : field.block(k, c.slab))
            if (fp.time > state.clock) c.heap.push({fp.time, &fp});
    });
    c.lo = lo;
    c.hi = hi;
}

template <int D>
void begin_slab(GrowthState<D>& state, const PoissonField<D>& field, std::int64_t slab) {
    auto& c = state.cursor;
    c.heap = {};
    c.slab = slab;
    const auto& box = state.region.bbox();
    gather<D>(state, field, state.region.cell_of(box.lo), state.region.cell_of(box.hi), false);
}

template <int D>
void extend_to_bbox(GrowthState<D>& state, const PoissonField<D>& field) {
    const auto& box = state.region.bbox();
    auto lo = state.region.cell_of(box.lo);
    auto hi = state.region.cell_of(box.hi);
    auto& c = state.cursor;
    bool grew = false;
    for (int i = 0; i < D; ++i) {
        lo[i] = std::min(lo[i], c.lo[i]);
        hi[i] = std::max(hi[i], c.hi[i]);
        if (lo[i] != c.lo[i] || hi[i] != c.hi[i]) grew = true;
    }
    if (grew) gather<D>(state, field, lo, hi, true);
}

}  // namespace detail

/// Next outburst by thinning the space-time Poisson field: the first field
/// point after the current clock whose location lies in the region at that
/// time. Returns nullopt (leaving the point queued) when that point is later
/// than `t_limit`.
template <int D>
std::optional<Event<D>> step_thinning_until(GrowthState<D>& state, const PoissonField<D>& field, double t_limit) {
    if (field.cell_size() != state.region.cell_size())
        throw InvalidInput("field cells must match the region grid");
    auto& c = state.cursor;
    if (c.field != &field) {
        c.field = &field;
        detail::begin_slab<D>(state, field, field.slab_of(state.clock));
    }
    while (true) {
        while (c.heap.empty()) {
            if (field.slab_height() * static_cast<double>(c.slab + 1) > t_limit) return std::nullopt;
            detail::begin_slab<D>(state, field, c.slab + 1);
        }
        const auto cand = c.heap.top();
        if (cand.time > t_limit) return std::nullopt;
        c.heap.pop();
        if (cand.time <= state.clock) continue;
        if (!state.region.covers(cand.point->location)) continue;
        auto ev = detail::commit<D>(state, cand.time, cand.point->location, cand.point->radius);
        detail::extend_to_bbox<D>(state, field);
        return ev;
    }
}

template <int D>
Event<D> step_thinning(GrowthState<D>& state, const PoissonField<D>& field) {
    return *step_thinning_until<D>(state, field, std::numeric_limits<double>::infinity());
}

/// Next outburst by the exponential clock: waiting time Exp(|S|) with |S| from
/// `measure`, location uniform on the region, radius from the law.
template <int D>
std::optional<Event<D>> step_rate_until(GrowthState<D>& state, RngStream& rng, double t_limit,
                                        double target_rel_error = 1e-2) {
    state.cursor.field = nullptr;
    const auto m = measure<D>(state.region, target_rel_error, rng);
    const double t = state.clock + rng.exponential(m.value);
    if (t > t_limit) return std::nullopt;
    const auto where = sample_uniform<D>(state.region, rng);
    const double r = state.law.sample(rng);
    return detail::commit<D>(state, t, where, r);
}

template <int D>
Event<D> step_rate(GrowthState<D>& state, RngStream& rng, double target_rel_error = 1e-2) {
    return *step_rate_until<D>(state, rng, std::numeric_limits<double>::infinity(), target_rel_error);
}

struct StopCondition {
    std::optional<double> t_max;
    std::optional<std::uint64_t> n_max;  // events appended by this call

    static StopCondition at_time(double t) { return {t, std::nullopt}; }
    static StopCondition after_events(std::uint64_t n) { return {std::nullopt, n}; }
};

namespace detail {

inline void validate_stop(const StopCondition& stop) {
    if (!stop.t_max && !stop.n_max) throw InvalidInput("run_until needs t_max or n_max");
    if (stop.t_max && !(*stop.t_max > 0.0)) throw InvalidInput("t_max must be positive");
}

template <int D, class Step, class OnEvent>
void drive(GrowthState<D>& state, const StopCondition& stop, Step&& step, OnEvent&& on_event) {
    validate_stop(stop);
    const double t_limit = stop.t_max.value_or(std::numeric_limits<double>::infinity());
    std::uint64_t appended = 0;
    while (!stop.n_max || appended < *stop.n_max) {
        auto ev = step(t_limit);
        if (!ev) {
            state.clock = std::max(state.clock, t_limit);
            return;
        }
        ++appended;
        if (!on_event(state, *ev)) return;
    }
}

}  // namespace detail

/// Steps with the thinning stepper until the next event would pass t_max (the
/// clock is then set to t_max), n_max events were appended, or `on_event`
/// returns false.
template <int D, class OnEvent>
GrowthState<D>& run_until(GrowthState<D>& state, const StopCondition& stop, const PoissonField<D>& field,
                          OnEvent&& on_event) {
    detail::drive<D>(
        state, stop, [&](double lim) { return step_thinning_until<D>(state, field, lim); },
        std::forward<OnEvent>(on_event));
    return state;
}

template <int D>
GrowthState<D>& run_until(GrowthState<D>& state, const StopCondition& stop, const PoissonField<D>& field) {
    return run_until<D>(state, stop, field, [](const auto&, const auto&) { return true; });
}

template <int D, class OnEvent>
GrowthState<D>& run_until(GrowthState<D>& state, const StopCondition& stop, RngStream& rng, OnEvent&& on_event,
                          double target_rel_error = 1e-2) {
    detail::drive<D>(
        state, stop, [&](double lim) { return step_rate_until<D>(state, rng, lim, target_rel_error); },
        std::forward<OnEvent>(on_event));
    return state;
}

template <int D>
GrowthState<D>& run_until(GrowthState<D>& state, const StopCondition& stop, RngStream& rng) {
    return run_until<D>(state, stop, rng, [](const auto&, const auto&) { return true; });
}

/// The process restarted at time s from B(x, gamma) alone, driven by the same
/// field as its parent.
template <int D>
GrowthState<D> restart(const PoissonField<D>& field, const Point<D>& x, double s, const RadiusLaw& law) {
    if (!(s >= 0.0)) throw InvalidInput("restart time must be nonnegative");
    auto state = init<D>(InitialSet<D>::ball(x, law.gamma()), law, field.seed());
    state.clock = s;
    state.origin_time = s;
    return state;
}

}  // namespace contgrowth

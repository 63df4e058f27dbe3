#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "contgrowth/errors.hpp"
#include "contgrowth/rng.hpp"

namespace contgrowth {

template <int D>
using Point = std::array<double, D>;

template <int D>
constexpr Point<D> origin() {
    return Point<D>{};
}

template <int D>
double squared_norm(const Point<D>& p) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += p[i] * p[i];
    return s;
}

template <int D>
double norm(const Point<D>& p) {
    return std::sqrt(squared_norm<D>(p));
}

template <int D>
double squared_distance(const Point<D>& a, const Point<D>& b) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

template <int D>
double distance(const Point<D>& a, const Point<D>& b) {
    return std::sqrt(squared_distance<D>(a, b));
}

template <int D>
Point<D> scaled(const Point<D>& p, double s) {
    Point<D> out;
    for (int i = 0; i < D; ++i) out[i] = p[i] * s;
    return out;
}

template <int D>
bool is_finite(const Point<D>& p) {
    return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

template <int D>
struct Ball {
    Point<D> center{};
    double radius = 0.0;

    double volume() const { return unit_ball_volume(D) * std::pow(radius, D); }

    // Closed ball.
    bool contains(const Point<D>& p) const {
        return squared_distance<D>(p, center) <= radius * radius;
    }
};

template <int D>
struct Box {
    Point<D> lo{};
    Point<D> hi{};

    double volume() const {
        double v = 1.0;
        for (int i = 0; i < D; ++i) v *= hi[i] - lo[i];
        return v;
    }

    bool contains(const Point<D>& p) const {
        for (int i = 0; i < D; ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }

    static Box around(const Ball<D>& b) {
        Box out;
        for (int i = 0; i < D; ++i) {
            out.lo[i] = b.center[i] - b.radius;
            out.hi[i] = b.center[i] + b.radius;
        }
        return out;
    }

    void expand(const Box& other) {
        for (int i = 0; i < D; ++i) {
            lo[i] = std::min(lo[i], other.lo[i]);
            hi[i] = std::max(hi[i], other.hi[i]);
        }
    }
};

enum class MeasureMethod { exact, monte_carlo };

struct MeasureEstimate {
    double value = 0.0;
    double rel_error = 0.0;  // 1-sigma relative standard error
    MeasureMethod method = MeasureMethod::exact;
    std::uint64_t samples_used = 0;
};

template <int D>
using CellKey = std::array<std::int64_t, D>;

template <int D>
struct CellKeyHash {
    std::size_t operator()(const CellKey<D>& k) const noexcept {
        std::uint64_t h = 0x51ed270b27a3f0c5ULL;
        for (auto v : k) h = mix64(h ^ static_cast<std::uint64_t>(v));
        return static_cast<std::size_t>(h);
    }
};

/// Dynamic union of closed balls, indexed by a uniform grid.
///
/// Every ball is registered in each grid cell its bounding box overlaps, so a
/// point query only needs the cell containing the point. Balls are never
/// removed; insertion order is preserved and is the outburst order.
template <int D>
class BallUnion {
public:
    using Key = CellKey<D>;

    explicit BallUnion(double cell_size = 1.0) : cell_size_(cell_size) {
        if (!(cell_size > 0.0) || !std::isfinite(cell_size))
            throw InvalidInput("cell_size must be positive and finite");
    }

    std::size_t insert(const Ball<D>& ball) {
        if (!is_finite<D>(ball.center)) throw InvalidInput("ball center has non-finite coordinates");
        if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
            throw InvalidInput("ball radius must be positive and finite");

        const auto index = balls_.size();
        balls_.push_back(ball);
        const auto box = Box<D>::around(ball);
        if (index == 0)
            bbox_ = box;
        else
            bbox_.expand(box);

        const double v = ball.volume();
        volume_sum_ += v;
        cumulative_volume_.push_back(volume_sum_);
        max_ball_volume_ = std::max(max_ball_volume_, v);
        extent_ = std::max(extent_, norm<D>(ball.center) + ball.radius);

        const Key lo = cell_of(box.lo);
        const Key hi = cell_of(box.hi);
#ifdef CONTGROWTH_FAULT_INJECT_GRID
        // Negative control: forget the last overlapped cell of every multi-cell ball.
        const bool drop_last = lo != hi;
#else
        const bool drop_last = false;
#endif
        for_each_cell(lo, hi, [&](const Key& k) {
            if (drop_last && k == hi) return;
            grid_[k].push_back(static_cast<std::uint32_t>(index));
        });
        return index;
    }

    bool empty() const { return balls_.empty(); }
    std::size_t size() const { return balls_.size(); }
    std::span<const Ball<D>> balls() const { return balls_; }
    const Ball<D>& ball(std::size_t i) const { return balls_[i]; }
    const Box<D>& bbox() const { return bbox_; }
    double cell_size() const { return cell_size_; }
    double volume_sum() const { return volume_sum_; }
    double max_ball_volume() const { return max_ball_volume_; }
    double extent() const { return extent_; }

    Key cell_of(const Point<D>& p) const {
        Key k;
        for (int i = 0; i < D; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / cell_size_));
        return k;
    }

    // Lowest-index ball containing p, if any.
    std::optional<std::size_t> first_covering(const Point<D>& p) const {
        const auto it = grid_.find(cell_of(p));
        if (it == grid_.end()) return std::nullopt;
        for (auto idx : it->second)
            if (balls_[idx].contains(p)) return idx;
        return std::nullopt;
    }

    bool covers(const Point<D>& p) const { return first_covering(p).has_value(); }

    // Reference membership by scanning every ball.
    bool covers_linear(const Point<D>& p) const {
        return std::any_of(balls_.begin(), balls_.end(), [&](const Ball<D>& b) { return b.contains(p); });
    }

    // Calls f(index) once for every ball whose bounding box meets `query`.
    template <class F>
    void for_each_near(const Box<D>& query, F&& f) const {
        const Key qlo = cell_of(query.lo);
        const Key qhi = cell_of(query.hi);
        for_each_cell(qlo, qhi, [&](const Key& k) {
            const auto it = grid_.find(k);
            if (it == grid_.end()) return;
            for (auto idx : it->second) {
                const auto bbox = Box<D>::around(balls_[idx]);
                bool meets = true;
                for (int i = 0; i < D; ++i)
                    if (bbox.hi[i] < query.lo[i] || bbox.lo[i] > query.hi[i]) meets = false;
                if (!meets) continue;
                // Report only from the first cell shared by the ball and the query.
                const Key blo = cell_of(bbox.lo);
                bool first = true;
                for (int i = 0; i < D; ++i)
                    if (k[i] != std::max(blo[i], qlo[i])) first = false;
                if (first) f(static_cast<std::size_t>(idx));
            }
        });
    }

    // Index of the ball selected with probability proportional to volume, given u in [0,1).
    std::size_t ball_by_volume(double u) const {
        const double target = u * volume_sum_;
        const auto it = std::upper_bound(cumulative_volume_.begin(), cumulative_volume_.end(), target);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_volume_.begin()), balls_.size() - 1);
    }

    template <class F>
    static void for_each_cell(const Key& lo, const Key& hi, F&& f) {
        Key k = lo;
        while (true) {
            f(k);
            int axis = 0;
            while (axis < D) {
                if (k[axis] < hi[axis]) {
                    ++k[axis];
                    break;
                }
                k[axis] = lo[axis];
                ++axis;
            }
            if (axis == D) return;
        }
    }

private:
    double cell_size_;
    std::vector<Ball<D>> balls_;
    std::vector<double> cumulative_volume_;
    std::unordered_map<Key, std::vector<std::uint32_t>, CellKeyHash<D>> grid_;
    Box<D> bbox_{};
    double volume_sum_ = 0.0;
    double max_ball_volume_ = 0.0;
    double extent_ = 0.0;
};

template <int D>
std::size_t insert_ball(BallUnion<D>& region, const Ball<D>& ball) {
    return region.insert(ball);
}

template <int D>
bool covers_point(const BallUnion<D>& region, const Point<D>& p) {
    return region.covers(p);
}

// Max over balls of |center| + radius: an outer radius of the union about the origin.
template <int D>
double first_uncovered_extent(const BallUnion<D>& region) {
    if (region.empty()) throw EmptyRegion();
    return region.extent();
}

template <int D, class Engine>
Point<D> uniform_in_box(const Box<D>& box, BasicStream<Engine>& rng) {
    Point<D> p;
    for (int i = 0; i < D; ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
    return p;
}

// Rejection from the circumscribed cube.
template <int D, class Engine>
Point<D> uniform_in_ball(const Ball<D>& ball, BasicStream<Engine>& rng) {
    while (true) {
        Point<D> u;
        for (int i = 0; i < D; ++i) u[i] = rng.uniform(-1.0, 1.0);
        if (squared_norm<D>(u) <= 1.0) {
            for (int i = 0; i < D; ++i) u[i] = ball.center[i] + ball.radius * u[i];
            return u;
        }
    }
}

/// Lebesgue measure of the union.
///
/// A single ball is measured in closed form. Otherwise hit-or-miss Monte Carlo
/// over the bounding box, in batches, until the relative standard error of the
/// estimate is at most `target_rel_error`. The value is clamped to
/// [largest ball volume, sum of ball volumes].
template <int D>
MeasureEstimate measure(const BallUnion<D>& region, double target_rel_error, RngStream& rng) {
    if (region.empty()) throw EmptyRegion();
    if (!(target_rel_error > 0.0)) throw InvalidInput("target_rel_error must be positive");
    if (region.size() == 1) return {region.ball(0).volume(), 0.0, MeasureMethod::exact, 0};

    constexpr std::uint64_t batch = 4096;
    constexpr std::uint64_t max_samples = std::uint64_t{1} << 32;
    const auto& box = region.bbox();
    const double box_volume = box.volume();
    std::uint64_t hits = 0;
    std::uint64_t n = 0;
    double rel = std::numeric_limits<double>::infinity();
    while (n < max_samples) {
        for (std::uint64_t i = 0; i < batch; ++i)
            if (region.covers(uniform_in_box<D>(box, rng))) ++hits;
        n += batch;
        if (hits == 0) continue;
        const double p = static_cast<double>(hits) / static_cast<double>(n);
        rel = std::sqrt((1.0 - p) / (p * static_cast<double>(n)));
        if (rel <= target_rel_error) break;
    }
    double value = box_volume * static_cast<double>(hits) / static_cast<double>(n);
    value = std::clamp(value, region.max_ball_volume(), region.volume_sum());
    return {value, rel, MeasureMethod::monte_carlo, n};
}

/// Uniform point of the union: pick a ball by volume, a point inside it, and
/// keep it only if that ball is the lowest-index ball covering the point.
template <int D>
Point<D> sample_uniform(const BallUnion<D>& region, RngStream& rng) {
    if (region.empty()) throw EmptyRegion();
    while (true) {
        const auto i = region.ball_by_volume(rng.uniform());
        const auto p = uniform_in_ball<D>(region.ball(i), rng);
        if (region.first_covering(p) == i) return p;
    }
}

/// Finite test points standing in for a closed ball.
///
/// Lattice points of pitch eps/sqrt(d) inside the ball plus the radial
/// projection of a face grid of the circumscribed cube onto the sphere. Both
/// parts have covering radius at most eps/2, so every point of the ball lies
/// within eps of some net point.
template <int D>
std::vector<Point<D>> ball_net(const Point<D>& center, double radius, double eps) {
    std::vector<Point<D>> net;
    const double h = eps / std::sqrt(static_cast<double>(D));
    const auto m = static_cast<std::int64_t>(std::floor(radius / h));
    CellKey<D> lo, hi;
    lo.fill(-m);
    hi.fill(m);
    const double r2 = radius * radius;
    BallUnion<D>::for_each_cell(lo, hi, [&](const CellKey<D>& k) {
        Point<D> q;
        double s = 0.0;
        for (int i = 0; i < D; ++i) {
            q[i] = h * static_cast<double>(k[i]);
            s += q[i] * q[i];
        }
        if (s > r2) return;
        for (int i = 0; i < D; ++i) q[i] += center[i];
        net.push_back(q);
    });

    if constexpr (D == 1) {
        net.push_back({center[0] - radius});
        net.push_back({center[0] + radius});
    } else {
        const double face_pitch = eps / (radius * std::sqrt(static_cast<double>(D - 1)));
        const auto steps = static_cast<std::int64_t>(std::ceil(2.0 / face_pitch));
        CellKey<D - 1> flo, fhi;
        flo.fill(0);
        fhi.fill(steps);
        for (int axis = 0; axis < D; ++axis) {
            for (double side : {-1.0, 1.0}) {
                BallUnion<D - 1>::for_each_cell(flo, fhi, [&](const CellKey<D - 1>& k) {
                    Point<D> u;
                    int j = 0;
                    for (int i = 0; i < D; ++i) {
                        if (i == axis) {
                            u[i] = side;
                        } else {
                            u[i] = -1.0 + 2.0 * static_cast<double>(k[j++]) / static_cast<double>(steps);
                        }
                    }
                    const double len = norm<D>(u);
                    for (int i = 0; i < D; ++i) u[i] = center[i] + radius * u[i] / len;
                    net.push_back(u);
                });
            }
        }
    }
    return net;
}

/// Incremental form of the conservative ball-coverage predicate.
///
/// Tracks the net points of B(center, radius) not yet covered by any absorbed
/// ball shrunk by the resolution margin. Coverage is also granted outright when
/// a single absorbed ball contains the whole target ball. Pending points are
/// bucketed so an absorbed ball only visits nearby ones.
template <int D>
class CoverageTracker {
public:
    CoverageTracker(const Point<D>& center, double radius, double resolution)
        : center_(center), radius_(radius), eps_(resolution) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("coverage radius must be positive");
        if (!(resolution > 0.0)) throw InvalidInput("net_resolution must be positive");
        if (resolution > radius / 4.0) throw InvalidInput("net_resolution must not exceed radius/4");
        bucket_ = std::max(4.0 * resolution, std::min(radius / 4.0, 1.0));
        for (const auto& q : ball_net<D>(center, radius, resolution)) {
            buckets_[key(q)].push_back(q);
            ++remaining_;
        }
    }

    bool absorb(const Ball<D>& b) {
        if (covered_) return true;
        const double d = distance<D>(center_, b.center);
        if (d <= b.radius - radius_) {
            mark_covered();
            return true;
        }
        const double shrunk = b.radius - eps_;
        if (shrunk < 0.0 || d > radius_ + shrunk) return false;
        const double s2 = shrunk * shrunk;
        const auto box = Box<D>::around(Ball<D>{b.center, shrunk});
        BallUnion<D>::for_each_cell(key(box.lo), key(box.hi), [&](const CellKey<D>& k) {
            auto it = buckets_.find(k);
            if (it == buckets_.end()) return;
            remaining_ -= std::erase_if(it->second,
                                        [&](const Point<D>& q) { return squared_distance<D>(q, b.center) <= s2; });
            if (it->second.empty()) buckets_.erase(it);
        });
        if (remaining_ == 0) mark_covered();
        return covered_;
    }

    bool covered() const { return covered_; }
    std::size_t remaining() const { return remaining_; }
    const Point<D>& center() const { return center_; }
    double radius() const { return radius_; }
    double resolution() const { return eps_; }

private:
    CellKey<D> key(const Point<D>& p) const {
        CellKey<D> k;
        for (int i = 0; i < D; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / bucket_));
        return k;
    }

    void mark_covered() {
        covered_ = true;
        remaining_ = 0;
        buckets_.clear();
    }

    Point<D> center_;
    double radius_;
    double eps_;
    double bucket_;
    std::unordered_map<CellKey<D>, std::vector<Point<D>>, CellKeyHash<D>> buckets_;
    std::size_t remaining_ = 0;
    bool covered_ = false;
};

/// Conservative test that B(center, radius) lies inside the union. A true
/// result implies exact containment; false may be returned for a ball that is
/// only barely covered.
template <int D>
bool covers_ball(const BallUnion<D>& region, const Point<D>& center, double radius, double net_resolution) {
    CoverageTracker<D> tracker(center, radius, net_resolution);
    if (region.empty()) return false;
    const auto query = Box<D>::around(Ball<D>{center, radius});
    std::vector<std::size_t> near;
    region.for_each_near(query, [&](std::size_t i) { near.push_back(i); });
    std::sort(near.begin(), near.end());
    for (auto i : near)
        if (tracker.absorb(region.ball(i))) return true;
    return false;
}

}  // namespace contgrowth

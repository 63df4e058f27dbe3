#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace contgrowth {

// splitmix64 finalizer; also the basis of all counter-based seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable derivation of a child seed from a root seed and a list of counters.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t h = mix64(root);
    for (auto c : counters) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

// Uniform/exponential/Poisson draws are written out here rather than taken from
// <random> distributions so that streams are identical across standard libraries.
template <class Engine>
class BasicStream {
public:
    using engine_type = Engine;

    BasicStream() = default;
    explicit BasicStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return static_cast<std::uint64_t>(engine_()); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // Inversion for moderate means, splitting for large ones.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 30.0) {
            total += poisson_small(30.0);
            mean -= 30.0;
        }
        return total + poisson_small(mean);
    }

    engine_type& engine() { return engine_; }

private:
    std::uint64_t poisson_small(double mean) {
        if (mean <= 0.0) return 0;
        double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) break;  // tail underflow guard
        }
        return k;
    }

    engine_type engine_{};
};

// Cheap-to-seed counter generator; used for Poisson field blocks.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    SplitMix64() = default;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }
    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_ - 0x9e3779b97f4a7c15ULL);
    }

private:
    std::uint64_t state_ = 0;
};

/// Explicitly passed source of randomness for one replication.
using RngStream = BasicStream<std::mt19937_64>;
using BlockStream = BasicStream<SplitMix64>;

}  // namespace contgrowth

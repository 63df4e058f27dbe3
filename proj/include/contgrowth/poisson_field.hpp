#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "contgrowth/geometry.hpp"
#include "contgrowth/radius_law.hpp"
#include "contgrowth/rng.hpp"

namespace contgrowth {

template <int D>
struct FieldPoint {
    Point<D> location;
    double time;
    double radius;
    double mark;  // independent uniform, available to thinning variants
};

template <int D>
using FieldBlock = std::vector<FieldPoint<D>>;

/// Unit-intensity Poisson process on R^d x R with i.i.d. radius marks,
/// materialized lazily in (cell, time-slab) blocks.
///
/// Block contents depend only on (seed, cell, slab), so processes that share a
/// field are coupled pathwise no matter which of them touches a block first.
/// Materialization is thread-safe; the first inserted copy of a block wins.
template <int D>
class PoissonField {
public:
    using Key = CellKey<D>;

    PoissonField(std::uint64_t seed, RadiusLaw law, double cell_size, double slab_height = 1.0)
        : seed_(seed), law_(std::move(law)), cell_size_(cell_size), slab_height_(slab_height) {
        if (!(cell_size > 0.0) || !(slab_height > 0.0)) throw InvalidInput("field block sizes must be positive");
        block_volume_ = std::pow(cell_size_, D) * slab_height_;
    }

    // Block cells match the region grid of processes driven by this field.
    PoissonField(std::uint64_t seed, RadiusLaw law) : PoissonField(seed, law, law.r_max()) {}

    std::uint64_t seed() const { return seed_; }
    const RadiusLaw& law() const { return law_; }
    double cell_size() const { return cell_size_; }
    double slab_height() const { return slab_height_; }

    // Points of the block sorted by time. The returned pointer stays valid for the
    // lifetime of the field.
    const FieldBlock<D>& block(const Key& cell, std::int64_t slab) const {
        const BlockKey key{cell, slab};
        {
            std::shared_lock lock(mutex_);
            if (auto it = blocks_.find(key); it != blocks_.end()) return *it->second;
        }
        auto fresh = std::make_unique<FieldBlock<D>>(generate(cell, slab));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = blocks_.try_emplace(key, std::move(fresh));
        return *it->second;
    }

    // Pure function of (seed, cell, slab); does not touch the store.
    FieldBlock<D> generate(const Key& cell, std::int64_t slab) const {
        std::uint64_t h = mix64(seed_ ^ 0x7f4a7c159e3779b9ULL);
        for (auto c : cell) h = mix64(h ^ static_cast<std::uint64_t>(c));
        h = mix64(h ^ static_cast<std::uint64_t>(slab));
        BlockStream rng(h);

        const auto count = rng.poisson(block_volume_);
        FieldBlock<D> pts;
        pts.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            FieldPoint<D> fp;
            for (int a = 0; a < D; ++a)
                fp.location[a] = cell_size_ * (static_cast<double>(cell[a]) + rng.uniform());
            fp.time = slab_height_ * (static_cast<double>(slab) + rng.uniform());
            fp.radius = law_.sample(rng);
            fp.mark = rng.uniform();
            pts.push_back(fp);
        }
        std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
        return pts;
    }

    std::size_t materialized_blocks() const {
        std::shared_lock lock(mutex_);
        return blocks_.size();
    }

    // Drops blocks of slabs before `slab`. Only valid when no process driven by
    // this field will scan those slabs again (no later restarts into the past).
    void discard_before(std::int64_t slab) {
        std::unique_lock lock(mutex_);
        std::erase_if(blocks_, [&](const auto& kv) { return kv.first.slab < slab; });
    }

    std::int64_t slab_of(double t) const { return static_cast<std::int64_t>(std::floor(t / slab_height_)); }

private:
    struct BlockKey {
        Key cell;
        std::int64_t slab;
        bool operator==(const BlockKey&) const = default;
    };
    struct BlockKeyHash {
        std::size_t operator()(const BlockKey& k) const noexcept {
            return CellKeyHash<D>{}(k.cell) ^ static_cast<std::size_t>(mix64(static_cast<std::uint64_t>(k.slab)));
        }
    };

    std::uint64_t seed_;
    RadiusLaw law_;
    double cell_size_;
    double slab_height_;
    double block_volume_;
    mutable std::shared_mutex mutex_;
    mutable std::unordered_map<BlockKey, std::unique_ptr<FieldBlock<D>>, BlockKeyHash> blocks_;
};

}  // namespace contgrowth

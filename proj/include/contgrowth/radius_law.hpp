#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contgrowth/errors.hpp"
#include "contgrowth/rng.hpp"

namespace contgrowth {

/// Law F of the outburst radii. Support is bounded and strictly positive.
class RadiusLaw {
public:
    struct Deterministic {
        double r;
    };
    struct UniformInterval {
        double a;
        double b;
    };
    struct FiniteDiscrete {
        std::vector<std::pair<double, double>> atoms;  // (radius, probability)
    };
    using Kind = std::variant<Deterministic, UniformInterval, FiniteDiscrete>;

    static RadiusLaw deterministic(double r) { return RadiusLaw(Deterministic{r}); }
    static RadiusLaw uniform_interval(double a, double b) { return RadiusLaw(UniformInterval{a, b}); }
    static RadiusLaw finite_discrete(std::vector<std::pair<double, double>> atoms) {
        return RadiusLaw(FiniteDiscrete{std::move(atoms)});
    }

    const Kind& kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double r_max() const { return r_max_; }
    double p_gamma() const { return p_gamma_; }

    template <class Engine>
    double sample(BasicStream<Engine>& rng) const {
        return std::visit(
            [&](const auto& k) -> double {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Deterministic>) {
                    return k.r;
                } else if constexpr (std::is_same_v<K, UniformInterval>) {
                    return k.a + (k.b - k.a) * rng.uniform();
                } else {
                    const double u = rng.uniform();
                    double acc = 0.0;
                    for (const auto& [r, p] : k.atoms) {
                        acc += p;
                        if (u < acc) return r;
                    }
                    return k.atoms.back().first;
                }
            },
            kind_);
    }

    std::string describe() const {
        return std::visit(
            [](const auto& k) -> std::string {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Deterministic>) {
                    return "deterministic(" + std::to_string(k.r) + ")";
                } else if constexpr (std::is_same_v<K, UniformInterval>) {
                    return "uniform(" + std::to_string(k.a) + "," + std::to_string(k.b) + ")";
                } else {
                    return "discrete(" + std::to_string(k.atoms.size()) + " atoms)";
                }
            },
            kind_);
    }

private:
    explicit RadiusLaw(Kind kind) : kind_(std::move(kind)) {
        std::visit([this](auto& k) { validate(k); }, kind_);
    }

    static void check_radius(double r) {
        if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("radius law support must lie in (0, inf)");
    }

    void validate(const Deterministic& k) {
        check_radius(k.r);
        gamma_ = r_max_ = k.r;
        p_gamma_ = 1.0;
    }

    void validate(const UniformInterval& k) {
        check_radius(k.a);
        check_radius(k.b);
        if (k.a > k.b) throw InvalidInput("uniform radius law needs a <= b");
        gamma_ = 0.5 * (k.a + k.b);
        r_max_ = k.b;
        p_gamma_ = k.a == k.b ? 1.0 : (k.b - gamma_) / (k.b - k.a);
    }

    void validate(FiniteDiscrete& k) {
        if (k.atoms.empty()) throw InvalidInput("discrete radius law needs at least one atom");
        double total = 0.0;
        for (const auto& [r, p] : k.atoms) {
            check_radius(r);
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("discrete radius law has a bad probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("discrete radius law probabilities must sum to 1");
        std::sort(k.atoms.begin(), k.atoms.end());
        gamma_ = 0.0;
        r_max_ = 0.0;
        for (const auto& [r, p] : k.atoms) {
            gamma_ += r * p;
            if (p > 0.0) r_max_ = std::max(r_max_, r);
        }
        p_gamma_ = 0.0;
        for (const auto& [r, p] : k.atoms)
            if (r >= gamma_ * (1.0 - 1e-12)) p_gamma_ += p;
    }

    Kind kind_;
    double gamma_ = 0.0;
    double r_max_ = 0.0;
    double p_gamma_ = 0.0;
};

}  // namespace contgrowth

#pragma once

#include <cmath>

#include "json.hpp"

#include "contgrowth/estimators.hpp"

namespace contgrowth {

// Non-finite values (e.g. the upper end of a degenerate interval) serialize as null.
inline nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

inline void to_json(nlohmann::json& j, const MuEstimate& m) {
    j = nlohmann::json{{"mu_hat", m.mu_hat},
                       {"ci_low", finite_or_null(m.ci_low)},
                       {"ci_high", finite_or_null(m.ci_high)},
                       {"ci_degenerate", m.ci_degenerate},
                       {"direction", m.direction},
                       {"distances", m.distances},
                       {"replications", m.replications},
                       {"failed_replications", m.failed_replications},
                       {"per_distance_means", m.per_distance_means},
                       {"per_distance_ci_halfwidth", m.per_distance_ci_halfwidth},
                       {"replication_seeds", m.replication_seeds}};
    auto rows = nlohmann::json::array();
    for (const auto& r : m.coverage_times) rows.push_back(r.empty() ? nlohmann::json() : nlohmann::json(r));
    j["coverage_times"] = rows;
}

inline void to_json(nlohmann::json& j, const ShapeReport& s) {
    j = nlohmann::json{{"t", s.t},
                       {"epsilon", s.epsilon},
                       {"inner_ok", s.inner_ok},
                       {"outer_ok", s.outer_ok},
                       {"inner_margin", finite_or_null(s.inner_margin)},
                       {"outer_radius_ratio", s.outer_radius_ratio},
                       {"inner_radius", s.inner_radius},
                       {"outer_radius", s.outer_radius}};
}

inline void to_json(nlohmann::json& j, const ChainBound& b) {
    j = nlohmann::json{{"x", b.x}, {"bound_mean", b.bound_mean}, {"lambda", b.lambda},
                       {"c", b.c}, {"p", b.p},                   {"k", b.k}};
}

}  // namespace contgrowth

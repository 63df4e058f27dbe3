#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "contgrowth/harness/experiments.hpp"

namespace contgrowth::harness {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

inline std::vector<CheckResult> run_selftest(std::uint64_t seed = 20021101, unsigned threads = 1) {
    std::vector<CheckResult> out;
    auto fmt = [](auto&&... parts) {
        std::ostringstream os;
        (os << ... << parts);
        return os.str();
    };

    {
        const auto m = lens_measure_check(derive_seed(seed, {1}));
        out.push_back({"lens measure", m.rel_error <= 0.005,
                       fmt("estimate ", m.estimate, " vs ", m.oracle, " (rel err ", m.rel_error, ")")});
    }
    {
        const auto bad = grid_completeness_mismatches(derive_seed(seed, {2}));
        out.push_back({"grid completeness", bad == 0, fmt(bad, " grid/linear disagreements in 5x10^4 queries")});
    }
    {
        const auto chi = lens_sampling_chi_square(derive_seed(seed, {3}));
        out.push_back({"uniform sampling", chi.passes(0.01), fmt("chi2 ", chi.statistic, ", p = ", chi.p_value)});
    }
    {
        const auto rate = first_events(false, 10000, derive_seed(seed, {4}));
        const auto thin = first_events(true, 10000, derive_seed(seed, {5}));
        const auto ks = stats::ks_one_sample(rate.waits, [](double t) { return 1.0 - std::exp(-std::numbers::pi * t); });
        out.push_back({"first wait ~ Exp(pi)", ks.passes(0.01), fmt("KS D = ", ks.statistic, ", p = ", ks.p_value)});
        const auto kw = stats::ks_two_sample(rate.waits, thin.waits);
        const auto kx = stats::ks_two_sample(rate.distances, thin.distances);
        out.push_back({"stepper equivalence", kw.passes(0.01) && kx.passes(0.01),
                       fmt("p(wait) = ", kw.p_value, ", p(|X|) = ", kx.p_value)});
    }
    {
        const auto c = pathwise_invariants(10, 1000, derive_seed(seed, {6}), threads);
        out.push_back({"pathwise invariants", c.ok(),
                       fmt(c.events, " events; disconnected ", c.disconnected, ", extent ", c.extent_violations,
                           ", non-increasing ", c.non_increasing)});
    }
    {
        const auto c = chain_bound_check(200, derive_seed(seed, {7}), threads);
        out.push_back({"chain bound domination", c.upper_ci <= c.bound.bound_mean,
                       fmt("mean T(x) ", c.mean_hitting_time, ", upper CI ", c.upper_ci, " <= ", c.bound.bound_mean)});
    }
    return out;
}

inline bool print_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
    bool all = true;
    for (const auto& c : checks) {
        os << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  -- " << c.detail << '\n';
        all = all && c.passed;
    }
    return all;
}

}  // namespace contgrowth::harness

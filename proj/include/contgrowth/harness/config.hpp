#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "contgrowth/radius_law.hpp"

namespace contgrowth::harness {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stepper { thinning, rate };

struct ExperimentConfig {
    int dimension = 2;
    json radius_law = {{"kind", "deterministic"}, {"r", 1.0}};
    json initial_set = {{"kind", "default"}};
    Stepper stepper = Stepper::thinning;
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    unsigned threads = 1;

    std::vector<double> distances;
    std::vector<double> direction;
    double epsilon = 0.2;
    std::optional<double> t_max;
    std::optional<std::uint64_t> n_max;
    std::optional<double> net_resolution;        // default gamma/100
    std::optional<double> shape_net_resolution;  // default gamma/10
    double target_rel_error = 1e-2;
    std::uint64_t event_cap = 1'000'000;
    std::size_t bootstrap_resamples = 1000;
    std::optional<double> mu;
    std::optional<std::string> mu_file;
    std::optional<std::uint64_t> target_events;
    std::size_t pilot_replications = 20;
    std::vector<double> snapshot_times;
    std::string output_dir = ".";

    RadiusLaw law() const;
};

namespace detail {

inline double positive(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("config key '" + key + "' must be positive");
    return x;
}

inline std::uint64_t count(const json& v, const std::string& key, std::uint64_t min = 0) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min))
        throw ConfigError("config key '" + key + "' must be an integer >= " + std::to_string(min));
    return v.get<std::uint64_t>();
}

inline std::vector<double> reals(const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("config key '" + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown config key '" + where + it.key() + "'");
}

}  // namespace detail

inline RadiusLaw parse_radius_law(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("config key 'radius_law' needs a string 'kind'");
    const auto kind = j["kind"].get<std::string>();
    try {
        if (kind == "deterministic") {
            detail::only_keys(j, "radius_law.", {"kind", "r"});
            if (!j.contains("r")) throw ConfigError("config key 'radius_law.r' is required");
            return RadiusLaw::deterministic(detail::positive(j["r"], "radius_law.r"));
        }
        if (kind == "uniform") {
            detail::only_keys(j, "radius_law.", {"kind", "a", "b"});
            if (!j.contains("a") || !j.contains("b")) throw ConfigError("config key 'radius_law.a/b' is required");
            return RadiusLaw::uniform_interval(detail::positive(j["a"], "radius_law.a"),
                                               detail::positive(j["b"], "radius_law.b"));
        }
        if (kind == "discrete") {
            detail::only_keys(j, "radius_law.", {"kind", "atoms"});
            if (!j.contains("atoms") || !j["atoms"].is_array())
                throw ConfigError("config key 'radius_law.atoms' must be an array of [radius, probability]");
            std::vector<std::pair<double, double>> atoms;
            for (const auto& a : j["atoms"]) {
                if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
                    throw ConfigError("config key 'radius_law.atoms' must be an array of [radius, probability]");
                atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
            }
            return RadiusLaw::finite_discrete(std::move(atoms));
        }
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("config key 'radius_law': ") + e.what());
    }
    throw ConfigError("config key 'radius_law.kind' must be deterministic, uniform or discrete");
}

inline RadiusLaw ExperimentConfig::law() const { return parse_radius_law(radius_law); }

inline void validate_initial_set(const json& j, int d) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("config key 'initial_set' needs a string 'kind'");
    const auto kind = j["kind"].get<std::string>();
    auto point = [&](const json& v, const std::string& key) {
        const auto p = detail::reals(v, key);
        if (static_cast<int>(p.size()) != d)
            throw ConfigError("config key '" + key + "' must have " + std::to_string(d) + " coordinates");
        for (double x : p)
            if (!std::isfinite(x)) throw ConfigError("config key '" + key + "' must be finite");
    };
    if (kind == "default" || kind == "unit_box") {
        detail::only_keys(j, "initial_set.", {"kind"});
    } else if (kind == "ball") {
        detail::only_keys(j, "initial_set.", {"kind", "center", "radius"});
        if (!j.contains("center") || !j.contains("radius"))
            throw ConfigError("config key 'initial_set' ball needs center and radius");
        point(j["center"], "initial_set.center");
        detail::positive(j["radius"], "initial_set.radius");
    } else if (kind == "box") {
        detail::only_keys(j, "initial_set.", {"kind", "lo", "hi"});
        if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("config key 'initial_set' box needs lo and hi");
        point(j["lo"], "initial_set.lo");
        point(j["hi"], "initial_set.hi");
        const auto lo = detail::reals(j["lo"], "initial_set.lo");
        const auto hi = detail::reals(j["hi"], "initial_set.hi");
        for (int i = 0; i < d; ++i)
            if (!(hi[i] > lo[i])) throw ConfigError("config key 'initial_set.hi' must exceed lo (zero-volume box)");
    } else if (kind == "ball_list") {
        detail::only_keys(j, "initial_set.", {"kind", "balls"});
        if (!j.contains("balls") || !j["balls"].is_array() || j["balls"].empty())
            throw ConfigError("config key 'initial_set.balls' must be a non-empty array");
        for (const auto& b : j["balls"]) {
            if (!b.is_object()) throw ConfigError("config key 'initial_set.balls' entries must be objects");
            detail::only_keys(b, "initial_set.balls.", {"center", "radius"});
            if (!b.contains("center") || !b.contains("radius"))
                throw ConfigError("config key 'initial_set.balls' entries need center and radius");
            point(b["center"], "initial_set.balls.center");
            detail::positive(b["radius"], "initial_set.balls.radius");
        }
    } else {
        throw ConfigError("config key 'initial_set.kind' must be default, ball, box, unit_box or ball_list");
    }
}

/// Parses and validates a config document; every error names the offending key.
inline ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    detail::only_keys(j, "",
                      {"dimension", "radius_law", "initial_set", "stepper", "seed", "replications", "threads",
                       "distances", "direction", "epsilon", "t_max", "n_max", "net_resolution",
                       "shape_net_resolution", "target_rel_error", "event_cap", "bootstrap_resamples", "mu",
                       "mu_file", "target_events", "pilot_replications", "snapshot_times", "output_dir"});
    ExperimentConfig c;
    if (j.contains("dimension")) {
        const auto d = detail::count(j["dimension"], "dimension", 1);
        if (d > 4) throw ConfigError("config key 'dimension' must be between 1 and 4");
        c.dimension = static_cast<int>(d);
    }
    if (j.contains("radius_law")) c.radius_law = j["radius_law"];
    parse_radius_law(c.radius_law);
    if (j.contains("initial_set")) c.initial_set = j["initial_set"];
    validate_initial_set(c.initial_set, c.dimension);
    if (j.contains("stepper")) {
        const auto& s = j["stepper"];
        if (s == "thinning")
            c.stepper = Stepper::thinning;
        else if (s == "rate")
            c.stepper = Stepper::rate;
        else
            throw ConfigError("config key 'stepper' must be \"thinning\" or \"rate\"");
    }
    if (j.contains("seed")) c.seed = detail::count(j["seed"], "seed");
    if (j.contains("replications")) c.replications = detail::count(j["replications"], "replications", 1);
    if (j.contains("threads")) c.threads = static_cast<unsigned>(detail::count(j["threads"], "threads", 1));
    if (j.contains("distances")) {
        c.distances = detail::reals(j["distances"], "distances");
        for (std::size_t i = 0; i < c.distances.size(); ++i)
            if (!(c.distances[i] > 0.0) || (i > 0 && !(c.distances[i] > c.distances[i - 1])))
                throw ConfigError("config key 'distances' must be positive and strictly increasing");
    }
    if (j.contains("direction")) {
        c.direction = detail::reals(j["direction"], "direction");
        if (static_cast<int>(c.direction.size()) != c.dimension)
            throw ConfigError("config key 'direction' must have 'dimension' entries");
        double s = 0.0;
        for (double x : c.direction) s += x * x;
        if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("config key 'direction' must be a nonzero vector");
    }
    if (j.contains("epsilon")) c.epsilon = detail::positive(j["epsilon"], "epsilon");
    if (j.contains("t_max")) c.t_max = detail::positive(j["t_max"], "t_max");
    if (j.contains("n_max")) c.n_max = detail::count(j["n_max"], "n_max");
    if (j.contains("net_resolution")) c.net_resolution = detail::positive(j["net_resolution"], "net_resolution");
    if (j.contains("shape_net_resolution"))
        c.shape_net_resolution = detail::positive(j["shape_net_resolution"], "shape_net_resolution");
    if (j.contains("target_rel_error")) c.target_rel_error = detail::positive(j["target_rel_error"], "target_rel_error");
    if (j.contains("event_cap")) c.event_cap = detail::count(j["event_cap"], "event_cap", 1);
    if (j.contains("bootstrap_resamples"))
        c.bootstrap_resamples = detail::count(j["bootstrap_resamples"], "bootstrap_resamples", 1);
    if (j.contains("mu")) c.mu = detail::positive(j["mu"], "mu");
    if (j.contains("mu_file")) {
        if (!j["mu_file"].is_string()) throw ConfigError("config key 'mu_file' must be a path string");
        c.mu_file = j["mu_file"].get<std::string>();
    }
    if (j.contains("target_events")) c.target_events = detail::count(j["target_events"], "target_events", 1);
    if (j.contains("pilot_replications"))
        c.pilot_replications = detail::count(j["pilot_replications"], "pilot_replications", 1);
    if (j.contains("snapshot_times")) {
        c.snapshot_times = detail::reals(j["snapshot_times"], "snapshot_times");
        for (double t : c.snapshot_times)
            if (!(t >= 0.0)) throw ConfigError("config key 'snapshot_times' must be nonnegative");
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("config key 'output_dir' must be a path string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    return c;
}

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["dimension"] = c.dimension;
    j["radius_law"] = c.radius_law;
    j["initial_set"] = c.initial_set;
    j["stepper"] = c.stepper == Stepper::thinning ? "thinning" : "rate";
    j["seed"] = c.seed;
    j["replications"] = c.replications;
    j["threads"] = c.threads;
    if (!c.distances.empty()) j["distances"] = c.distances;
    if (!c.direction.empty()) j["direction"] = c.direction;
    j["epsilon"] = c.epsilon;
    if (c.t_max) j["t_max"] = *c.t_max;
    if (c.n_max) j["n_max"] = *c.n_max;
    if (c.net_resolution) j["net_resolution"] = *c.net_resolution;
    if (c.shape_net_resolution) j["shape_net_resolution"] = *c.shape_net_resolution;
    j["target_rel_error"] = c.target_rel_error;
    j["event_cap"] = c.event_cap;
    j["bootstrap_resamples"] = c.bootstrap_resamples;
    if (c.mu) j["mu"] = *c.mu;
    if (c.mu_file) j["mu_file"] = *c.mu_file;
    if (c.target_events) j["target_events"] = *c.target_events;
    j["pilot_replications"] = c.pilot_replications;
    if (!c.snapshot_times.empty()) j["snapshot_times"] = c.snapshot_times;
    j["output_dir"] = c.output_dir;
    return j;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

}  // namespace contgrowth::harness

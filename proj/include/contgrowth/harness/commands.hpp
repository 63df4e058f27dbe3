#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"

#include "contgrowth/dynamics.hpp"
#include "contgrowth/estimators.hpp"
#include "contgrowth/event_log.hpp"
#include "contgrowth/harness/config.hpp"
#include "contgrowth/harness/json_io.hpp"
#include "contgrowth/parallel.hpp"

namespace contgrowth::harness {

inline constexpr const char* engine_version = "contgrowth 1.0.0";

// Calls f(std::integral_constant<int, D>{}) for the runtime dimension.
template <class F>
decltype(auto) dispatch_dimension(int d, F&& f) {
    switch (d) {
        case 1: return f(std::integral_constant<int, 1>{});
        case 2: return f(std::integral_constant<int, 2>{});
        case 3: return f(std::integral_constant<int, 3>{});
        case 4: return f(std::integral_constant<int, 4>{});
        default: throw ConfigError("config key 'dimension' must be between 1 and 4");
    }
}

template <int D>
Point<D> to_point(const json& v) {
    Point<D> p{};
    for (int i = 0; i < D; ++i) p[i] = v.at(i).get<double>();
    return p;
}

template <int D>
InitialSet<D> make_initial_set(const json& j, const RadiusLaw& law) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "default") return InitialSet<D>::ball(origin<D>(), law.gamma());
    if (kind == "unit_box") return InitialSet<D>::unit_box();
    if (kind == "ball") return InitialSet<D>::ball(to_point<D>(j.at("center")), j.at("radius").get<double>());
    if (kind == "box") return InitialSet<D>::box(to_point<D>(j.at("lo")), to_point<D>(j.at("hi")));
    std::vector<Ball<D>> balls;
    for (const auto& b : j.at("balls")) balls.push_back({to_point<D>(b.at("center")), b.at("radius").get<double>()});
    return InitialSet<D>::ball_list(std::move(balls));
}

inline std::uint64_t replication_seed(const ExperimentConfig& c, std::size_t r) { return derive_seed(c.seed, {r}); }

inline std::string wall_clock_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

/// Records what a command ran and wrote. Everything except the wall times is
/// a function of the config.
struct RunManifest {
    std::string command;
    json config;
    std::vector<std::uint64_t> replication_seeds;
    std::string start_time;
    std::string end_time;
    std::vector<std::string> artifacts;

    json to_json() const {
        return json{{"engine_version", engine_version}, {"command", command},
                    {"config", config},                 {"replication_seeds", replication_seeds},
                    {"start_time", start_time},         {"end_time", end_time},
                    {"artifacts", artifacts}};
    }
};

class OutputDir {
public:
    explicit OutputDir(const std::string& path) : root_(path) {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec || !std::filesystem::is_directory(root_))
            throw ConfigError("config key 'output_dir': cannot create '" + path + "'");
    }

    std::ofstream open(const std::string& name) {
        std::ofstream out(root_ / name, std::ios::binary);
        if (!out) throw ConfigError("config key 'output_dir': cannot write '" + (root_ / name).string() + "'");
        return out;
    }

    void write_json(const std::string& name, const json& j) {
        auto out = open(name);
        out << j.dump(2) << '\n';
    }

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

inline std::string replication_name(std::size_t r) {
    std::ostringstream os;
    os << "events_r" << std::setw(4) << std::setfill('0') << r;
    return os.str();
}

inline void finish_manifest(RunManifest& m, OutputDir& out) {
    m.end_time = wall_clock_now();
    out.write_json("manifest.json", m.to_json());
}

/// `simulate`: one event-log CSV per replication (plus optional cadlag snapshots).
inline RunManifest cmd_simulate(const ExperimentConfig& cfg) {
    if (!cfg.t_max && !cfg.n_max) throw ConfigError("config key 't_max' or 'n_max' is required for simulate");
    RunManifest m{"simulate", to_json(cfg), {}, wall_clock_now(), {}, {}};
    OutputDir out(cfg.output_dir);
    const auto law = cfg.law();
    for (std::size_t r = 0; r < cfg.replications; ++r) m.replication_seeds.push_back(replication_seed(cfg, r));

    std::vector<std::vector<std::string>> names(cfg.replications);
    dispatch_dimension(cfg.dimension, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        const auto initial = make_initial_set<D>(cfg.initial_set, law);
        const StopCondition stop{cfg.t_max, cfg.n_max};
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
            const auto seed = m.replication_seeds[r];
            auto state = init<D>(initial, law, seed);
            if (cfg.stepper == Stepper::thinning) {
                PoissonField<D> field(seed, law);
                run_until<D>(state, stop, field);
            } else {
                RngStream rng(seed);
                run_until<D>(state, stop, rng, [](const auto&, const auto&) { return true; }, cfg.target_rel_error);
            }
            const auto base = replication_name(r);
            {
                auto f = out.open(base + ".csv");
                write_event_log<D>(f, state);
            }
            names[r].push_back(base + ".csv");
            for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
                const auto name = base + "_snap" + std::to_string(k) + ".csv";
                auto f = out.open(name);
                write_event_log<D>(f, state, true, cfg.snapshot_times[k]);
                names[r].push_back(name);
            }
        });
    });
    for (auto& v : names) m.artifacts.insert(m.artifacts.end(), v.begin(), v.end());
    m.artifacts.push_back("manifest.json");
    finish_manifest(m, out);
    return m;
}

struct MuRun {
    MuEstimate estimate;
    RunManifest manifest;
};

/// `estimate-mu`: writes mu.json.
inline MuRun cmd_estimate_mu(const ExperimentConfig& cfg) {
    if (cfg.distances.size() < 3) throw ConfigError("config key 'distances' needs at least three values");
    MuRun run{{}, {"estimate-mu", to_json(cfg), {}, wall_clock_now(), {}, {}}};
    OutputDir out(cfg.output_dir);
    const auto law = cfg.law();
    MuOptions opts;
    opts.net_resolution = cfg.net_resolution.value_or(law.gamma() / 100.0);
    opts.event_cap = cfg.event_cap;
    opts.bootstrap_resamples = cfg.bootstrap_resamples;
    opts.threads = cfg.threads;
    run.estimate = dispatch_dimension(cfg.dimension, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        Point<D> dir{};
        if (cfg.direction.empty())
            dir[0] = 1.0;
        else
            for (int i = 0; i < D; ++i) dir[i] = cfg.direction[i];
        return estimate_mu<D>(dir, cfg.distances, cfg.replications, law,
                              make_initial_set<D>(cfg.initial_set, law), cfg.seed, opts);
    });
    run.manifest.replication_seeds = run.estimate.replication_seeds;
    out.write_json("mu.json", json(run.estimate));
    run.manifest.artifacts = {"mu.json", "manifest.json"};
    finish_manifest(run.manifest, out);
    return run;
}

struct ShapeSummary {
    double mu = 0.0;
    double t = 0.0;
    double epsilon = 0.0;
    std::vector<ShapeReport> reports;
    std::vector<std::size_t> events;
    double inner_pass_fraction = 0.0;
    double outer_pass_fraction = 0.0;
    double pass_fraction = 0.0;
    double mean_events = 0.0;

    json to_json() const {
        json reps = json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            json r = reports[i];
            r["events"] = events[i];
            reps.push_back(r);
        }
        return json{{"mu", mu},
                    {"t", t},
                    {"epsilon", epsilon},
                    {"reports", reps},
                    {"summary",
                     {{"replications", reports.size()},
                      {"inner_pass_fraction", inner_pass_fraction},
                      {"outer_pass_fraction", outer_pass_fraction},
                      {"pass_fraction", pass_fraction},
                      {"mean_events", mean_events}}}};
    }
};

struct ShapeRun {
    ShapeSummary summary;
    RunManifest manifest;
};

inline double resolve_mu(const ExperimentConfig& cfg) {
    if (cfg.mu) return *cfg.mu;
    if (cfg.mu_file) {
        const auto j = load_json_file(*cfg.mu_file);
        if (!j.contains("mu_hat") || !j["mu_hat"].is_number() || !(j["mu_hat"].get<double>() > 0.0))
            throw ConfigError("config key 'mu_file': '" + *cfg.mu_file + "' has no positive mu_hat");
        return j["mu_hat"].get<double>();
    }
    throw ConfigError("config key 'mu' or 'mu_file' is required for shape-test");
}

/// Mean clock after `target` events over pilot runs: an evaluation time whose
/// expected event count is about `target`.
template <int D>
double calibrate_time(const ExperimentConfig& cfg, const RadiusLaw& law, const InitialSet<D>& initial,
                      std::uint64_t target) {
    std::vector<double> clocks(cfg.pilot_replications);
    parallel_for(cfg.pilot_replications, cfg.threads, [&](std::size_t i) {
        const auto seed = derive_seed(cfg.seed, {0x70696c6f74ULL, i});
        PoissonField<D> field(seed, law);
        auto state = init<D>(initial, law, seed);
        run_until<D>(state, StopCondition::after_events(target), field);
        clocks[i] = state.clock;
    });
    return stats::mean(clocks);
}

/// `shape-test`: runs replications to t and checks the shape sandwich; writes shape.json.
inline ShapeRun cmd_shape_test(const ExperimentConfig& cfg) {
    const double mu = resolve_mu(cfg);
    if (!cfg.t_max && !cfg.target_events)
        throw ConfigError("config key 't_max' or 'target_events' is required for shape-test");
    ShapeRun run{{}, {"shape-test", to_json(cfg), {}, wall_clock_now(), {}, {}}};
    OutputDir out(cfg.output_dir);
    const auto law = cfg.law();
    const double res = cfg.shape_net_resolution.value_or(law.gamma() / 10.0);
    auto& s = run.summary;
    s.mu = mu;
    s.epsilon = cfg.epsilon;
    s.reports.resize(cfg.replications);
    s.events.resize(cfg.replications);
    for (std::size_t r = 0; r < cfg.replications; ++r) run.manifest.replication_seeds.push_back(replication_seed(cfg, r));
    dispatch_dimension(cfg.dimension, [&](auto dim) {
        constexpr int D = decltype(dim)::value;
        const auto initial = make_initial_set<D>(cfg.initial_set, law);
        s.t = cfg.t_max ? *cfg.t_max : calibrate_time<D>(cfg, law, initial, *cfg.target_events);
        parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
            const auto seed = run.manifest.replication_seeds[r];
            PoissonField<D> field(seed, law);
            auto state = init<D>(initial, law, seed);
            std::int64_t slab = 0;
            run_until<D>(state, StopCondition::at_time(s.t), field, [&](const auto& st, const auto&) {
                if (st.cursor.slab > slab + 1) {
                    slab = st.cursor.slab;
                    field.discard_before(slab);
                }
                return true;
            });
            s.reports[r] = shape_report<D>(state, mu, cfg.epsilon, res);
            s.events[r] = state.log.size();
        });
    });
    std::size_t inner = 0, outer = 0, both = 0;
    double ev = 0.0;
    for (std::size_t r = 0; r < s.reports.size(); ++r) {
        inner += s.reports[r].inner_ok;
        outer += s.reports[r].outer_ok;
        both += s.reports[r].inner_ok && s.reports[r].outer_ok;
        ev += static_cast<double>(s.events[r]);
    }
    const double n = static_cast<double>(s.reports.size());
    s.inner_pass_fraction = static_cast<double>(inner) / n;
    s.outer_pass_fraction = static_cast<double>(outer) / n;
    s.pass_fraction = static_cast<double>(both) / n;
    s.mean_events = ev / n;
    out.write_json("shape.json", s.to_json());
    run.manifest.artifacts = {"shape.json", "manifest.json"};
    finish_manifest(run.manifest, out);
    return run;
}

/// `replay-check`: validates a written event log.
inline ReplayReport cmd_replay_check(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read event log '" + path + "'");
    int d = 0;
    const auto rows = read_event_log(in, d);
    double cell = 0.0;
    for (const auto& row : rows)
        if (row.n >= 0) cell = std::max(cell, row.r);
    if (cell == 0.0) cell = 1.0;
    return dispatch_dimension(d, [&](auto dim) { return replay_check<decltype(dim)::value>(rows, cell); });
}

/// Accepts either a config document or a manifest (whose config echo is used).
inline ExperimentConfig config_from_document(const json& doc) {
    if (doc.is_object() && doc.contains("engine_version") && doc.contains("config")) return parse_config(doc["config"]);
    return parse_config(doc);
}

}  // namespace contgrowth::harness

// Command-line front end: simulate, estimate-mu, shape-test, selftest, replay-check.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "contgrowth/harness/commands.hpp"
#include "contgrowth/harness/selftest.hpp"

namespace h = contgrowth::harness;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_check = 2;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replications;
    std::optional<unsigned> threads;
    std::optional<double> t_max;
    std::optional<std::uint64_t> n_max;
    std::optional<double> mu;
    std::optional<std::string> mu_file;
    std::optional<std::string> output_dir;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "root seed");
    cmd->add_option("--replications", o.replications, "number of replications");
    cmd->add_option("--threads", o.threads, "worker threads (does not change outputs)");
    cmd->add_option("--t-max", o.t_max, "stop time");
    cmd->add_option("--n-max", o.n_max, "event budget");
    cmd->add_option("--mu", o.mu, "shape constant for shape-test");
    cmd->add_option("--mu-file", o.mu_file, "mu.json from estimate-mu");
    cmd->add_option("--output-dir", o.output_dir, "artifact directory");
}

h::ExperimentConfig load(const std::string& path, const Overrides& o) {
    h::json doc = path.empty() ? h::json::object() : h::load_json_file(path);
    if (doc.contains("engine_version") && doc.contains("config")) doc = doc["config"];
    if (!doc.contains("output_dir"))
        if (const char* env = std::getenv("CONTGROWTH_OUTPUT_DIR")) doc["output_dir"] = env;
    if (o.seed) doc["seed"] = *o.seed;
    if (o.replications) doc["replications"] = *o.replications;
    if (o.threads) doc["threads"] = *o.threads;
    if (o.t_max) doc["t_max"] = *o.t_max;
    if (o.n_max) doc["n_max"] = *o.n_max;
    if (o.mu) doc["mu"] = *o.mu;
    if (o.mu_file) doc["mu_file"] = *o.mu_file;
    if (o.output_dir) doc["output_dir"] = *o.output_dir;
    return h::parse_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuum growth model simulator and experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides o;

    auto* simulate = app.add_subcommand("simulate", "write event-log CSVs for each replication");
    auto* estimate = app.add_subcommand("estimate-mu", "estimate the shape constant along a direction");
    auto* shape = app.add_subcommand("shape-test", "check the asymptotic shape sandwich");
    for (auto* cmd : {simulate, estimate, shape}) {
        cmd->add_option("-c,--config", config_path, "JSON config or manifest");
        add_overrides(cmd, o);
    }

    auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
    std::uint64_t selftest_seed = 20021101;
    unsigned selftest_threads = 1;
    selftest->add_option("--seed", selftest_seed, "root seed");
    selftest->add_option("--threads", selftest_threads, "worker threads");

    auto* replay = app.add_subcommand("replay-check", "validate an event-log CSV");
    std::string log_path;
    replay->add_option("log", log_path, "event-log CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*simulate) {
            const auto m = h::cmd_simulate(load(config_path, o));
            std::cout << "wrote " << m.artifacts.size() << " files\n";
        } else if (*estimate) {
            const auto run = h::cmd_estimate_mu(load(config_path, o));
            const auto& e = run.estimate;
            std::cout << "mu_hat = " << e.mu_hat << "  95% CI [" << e.ci_low << ", " << e.ci_high << "]"
                      << (e.ci_degenerate ? "  (degenerate: fewer than two replications)" : "") << '\n';
        } else if (*shape) {
            const auto run = h::cmd_shape_test(load(config_path, o));
            const auto& s = run.summary;
            std::cout << "t = " << s.t << ", mu = " << s.mu << ", epsilon = " << s.epsilon << ": pass fraction "
                      << s.pass_fraction << " (inner " << s.inner_pass_fraction << ", outer "
                      << s.outer_pass_fraction << ")\n";
        } else if (*selftest) {
            const auto checks = h::run_selftest(selftest_seed, selftest_threads);
            return h::print_checks(std::cout, checks) ? exit_ok : exit_check;
        } else if (*replay) {
            const auto rep = h::cmd_replay_check(log_path);
            std::cout << rep.events << " events, " << rep.initial_balls << " initial balls; disconnected "
                      << rep.disconnected << ", non-increasing times " << rep.non_increasing << ", bad indices "
                      << rep.bad_index << '\n';
            return rep.ok() ? exit_ok : exit_check;
        }
    } catch (const h::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const contgrowth::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_config;
    } catch (const contgrowth::EstimationAborted& e) {
        std::cerr << "estimation aborted: " << e.what() << '\n';
        return exit_check;
    }
    return exit_ok;
}

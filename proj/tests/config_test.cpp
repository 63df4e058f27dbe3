#include <gtest/gtest.h>

#include <string>

#include "contgrowth/harness/config.hpp"

using namespace contgrowth;
using namespace contgrowth::harness;

namespace {

// Returns the error message, or "" if the document parsed.
std::string error_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsParse) {
    const auto c = parse_config(json::object());
    EXPECT_EQ(c.dimension, 2);
    EXPECT_EQ(c.law().gamma(), 1.0);
    EXPECT_EQ(c.stepper, Stepper::thinning);
    EXPECT_EQ(c.replications, 1u);
}

TEST(Config, FullDocumentRoundTrips) {
    const json doc = {{"dimension", 3},
                      {"radius_law", {{"kind", "uniform"}, {"a", 0.5}, {"b", 1.5}}},
                      {"initial_set", {{"kind", "box"}, {"lo", {0, 0, 0}}, {"hi", {1, 1, 1}}}},
                      {"stepper", "rate"},
                      {"seed", 77},
                      {"replications", 12},
                      {"threads", 2},
                      {"distances", {10, 20, 30}},
                      {"direction", {1, 1, 0}},
                      {"epsilon", 0.3},
                      {"t_max", 5.0},
                      {"n_max", 100},
                      {"snapshot_times", {1.0, 2.0}},
                      {"output_dir", "out"}};
    const auto c = parse_config(doc);
    EXPECT_EQ(c.dimension, 3);
    EXPECT_EQ(c.stepper, Stepper::rate);
    EXPECT_EQ(c.seed, 77u);
    EXPECT_EQ(c.law().r_max(), 1.5);
    const auto again = parse_config(to_json(c));
    EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, UnknownKeysAreNamed) {
    EXPECT_NE(error_of({{"sede", 1}}).find("'sede'"), std::string::npos);
    EXPECT_NE(error_of({{"radius_law", {{"kind", "deterministic"}, {"r", 1}, {"q", 2}}}}).find("radius_law.q"),
              std::string::npos);
    EXPECT_NE(error_of({{"initial_set", {{"kind", "ball"}, {"center", {0, 0}}, {"radius", 1}, {"x", 1}}}})
                  .find("initial_set.x"),
              std::string::npos);
}

TEST(Config, InvalidValuesAreNamed) {
    const std::pair<json, std::string> cases[] = {
        {{{"dimension", 5}}, "dimension"},
        {{{"dimension", 0}}, "dimension"},
        {{{"epsilon", -1}}, "epsilon"},
        {{{"t_max", 0}}, "t_max"},
        {{{"replications", 0}}, "replications"},
        {{{"seed", "x"}}, "seed"},
        {{{"stepper", "euler"}}, "stepper"},
        {{{"distances", {10, 5, 20}}}, "distances"},
        {{{"direction", {0, 0}}}, "direction"},
        {{{"direction", {1, 0, 0}}}, "direction"},
        {{{"radius_law", {{"kind", "deterministic"}, {"r", -1}}}}, "radius_law.r"},
        {{{"radius_law", {{"kind", "uniform"}, {"a", 2}, {"b", 1}}}}, "radius_law"},
        {{{"radius_law", {{"kind", "discrete"}, {"atoms", {{1, 0.5}}}}}}, "radius_law"},
        {{{"radius_law", {{"kind", "cauchy"}}}}, "radius_law.kind"},
        {{{"initial_set", {{"kind", "box"}, {"lo", {0, 0}}, {"hi", {1, 0}}}}}, "initial_set.hi"},
        {{{"initial_set", {{"kind", "ball"}, {"center", {0}}, {"radius", 1}}}}, "initial_set.center"},
        {{{"initial_set", {{"kind", "ball"}, {"center", {0, 0}}, {"radius", 0}}}}, "initial_set.radius"},
        {{{"initial_set", {{"kind", "ball_list"}, {"balls", json::array()}}}}, "initial_set.balls"},
        {{{"mu", 0}}, "mu"},
        {{{"output_dir", 3}}, "output_dir"},
    };
    for (const auto& [doc, key] : cases) {
        const auto msg = error_of(doc);
        EXPECT_NE(msg.find(key), std::string::npos) << doc.dump() << " -> " << msg;
    }
}

TEST(Config, MissingFileIsAConfigError) {
    EXPECT_THROW(load_json_file("/nonexistent/config.json"), ConfigError);
}

#include <doctest.h>

#include "rocba/config.hpp"

using namespace rocba;
using nlohmann::json;

namespace {

std::string error_key(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.key;
    }
    return "";
}

} // namespace

TEST_CASE("defaults") {
    const auto c = parse_config(json::object());
    CHECK(c.problem.kind == "synthetic");
    CHECK(c.procedure.name == "AR-OCBA");
    CHECK(c.procedure.n0 == 20);
    CHECK(c.experiment.replications == 4000);
    CHECK(c.output.format == "csv");
}

TEST_CASE("round trip through JSON") {
    const json doc = json::parse(R"({
        "problem": {"kind": "inventory", "s_grid": [700, 725], "S_grid": [1500], "demand_means": [40, 45],
                    "params": {"horizon": 100, "backorder_cost": 0.5}, "truth": {"reps": 500, "seed": 3, "cache": "t.csv"}},
        "procedure": {"name": "AR-OCBA-Starving", "n0": 10, "delta": 10},
        "experiment": {"c_values": [10, 40], "replications": 200, "base_seed": 9},
        "output": {"dir": "x", "format": "json", "record_wall_time": false}})");
    const auto c = parse_config(doc);
    CHECK(c.procedure.rule == "most_starving");
    CHECK(c.problem.params.horizon == 100);
    const auto again = parse_config(json::parse(to_json(c).dump()));
    CHECK(again == c);
    CHECK(config_hash(to_json(c)) == config_hash(to_json(again)));
    CHECK(config_hash(to_json(c)).size() == 16);

    const auto synthetic = parse_config(json::parse(R"({"problem": {"means": [[0, 1], [2, 3]], "variances": [[1, 1], [1, 1]]}})"));
    CHECK(parse_config(json::parse(to_json(synthetic).dump())) == synthetic);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK(error_key(json::parse(R"({"extra": 1})")) == "/extra");
    CHECK(error_key(json::parse(R"({"procedure": {"n0": 5, "gamma": 2}})")) == "/procedure/gamma");
    CHECK(error_key(json::parse(R"({"problem": {"kind": "inventory", "s_grid": [1], "S_grid": [2], "demand_means": [1],
                                    "params": {"s": 3}}})")) == "/problem/params/s");
}

TEST_CASE("invalid values name the key") {
    CHECK(error_key(json::parse(R"({"procedure": {"n0": 1}})")) == "/procedure/n0");
    CHECK(error_key(json::parse(R"({"procedure": {"delta": 0}})")) == "/procedure/delta");
    CHECK(error_key(json::parse(R"({"procedure": {"name": "AR-OCBA", "rule": "most_starving"}})")) == "/procedure/rule");
    CHECK(error_key(json::parse(R"({"experiment": {"c_values": []}})")) == "/experiment/c_values");
    CHECK(error_key(json::parse(R"({"experiment": {"procedures": ["R-UCB"]}})")) == "/experiment/procedures");
    CHECK(error_key(json::parse(R"({"problem": {"k": 1}})")) == "/problem/k");
    CHECK(error_key(json::parse(R"({"problem": {"variance": "XV"}})")) == "/problem/variance");
    CHECK(error_key(json::parse(R"({"output": {"format": "xml"}})")) == "/output/format");
    CHECK(error_key(json::parse(R"({"procedure": {"n0": "ten"}})")) == "/procedure/n0");

    try {
        parse_config(json::parse(R"({"procedure": {"n0": 1}})"));
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("≥ 2") != std::string::npos);
    }
}

TEST_CASE("procedure budget from c or N") {
    auto c = parse_config(json::parse(R"({"procedure": {"n0": 10}, "experiment": {"c": 5}})"));
    CHECK(procedure_config(c, 3, 3).total_budget == 135);
    c.experiment.N = 500;
    CHECK(procedure_config(c, 3, 3).total_budget == 500);
    c.experiment.N = 50;
    CHECK_THROWS_AS(procedure_config(c, 3, 3), ConfigError);
}

TEST_CASE("simulators from config") {
    auto c = parse_config(json::parse(R"({"problem": {"k": 4, "m": 2, "variance": "DV"}})"));
    auto sim = build_simulator(c.problem);
    CHECK(sim->k() == 4);
    CHECK(sim->m() == 2);
    CHECK(to_string(build_synthetic(c.problem).label()) == "MM-DV");

    c = parse_config(json::parse(R"({"problem": {"preset": "concentration"}})"));
    CHECK(build_synthetic(c.problem).truth().mu(1, 0) == doctest::Approx(0.4));

    c = parse_config(json::parse(R"({"problem": {"kind": "inventory", "s_grid": [700, 800], "S_grid": [1500, 1600],
                                     "demand_means": [40, 50, 60]}})"));
    CHECK(build_simulator(c.problem)->k() == 4);
    CHECK(build_inventory(c.problem)->m() == 3);
}

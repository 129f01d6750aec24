#pragma once

// JSON run configuration shared by every CLI command.
//
//   {
//     "problem":   {"kind": "synthetic", "k": 20, "m": 5, "variance": "CV"}
//                | {"kind": "synthetic", "preset": "concentration"}
//                | {"kind": "synthetic", "means": [[...]], "variances": [[...]]}
//                | {"kind": "inventory", "s_grid": [...], "S_grid": [...], "demand_means": [...],
//                   "params": {...}, "truth": {"reps": 10000, "seed": 1, "cache": "truth.csv"}},
//     "procedure":  {"name": "AR-OCBA", "n0": 20, "delta": 20, "rule": "proportional"},
//     "experiment": {"procedures": [...], "c_values": [...], "c": 50, "N": 0, "replications": 4000,
//                    "base_seed": 1, "vary": "delta", "values": [...], "total_per_scenario": 50},
//     "output":     {"dir": "out", "format": "csv", "record_wall_time": true}
//   }
//
// Unknown keys anywhere are rejected. Missing keys take the defaults below.

#include "rocba/experiments.hpp"
#include "rocba/problems.hpp"
#include "rocba/procedures.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rocba {

/// Invalid configuration; `key` is a JSON-pointer-style path to the culprit.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key(std::move(key)) {}
    std::string key;
};

struct ProblemSection {
    std::string kind = "synthetic"; // synthetic | inventory

    // synthetic
    std::size_t k = 20;
    std::size_t m = 5;
    std::string variance = "CV"; // CV | IV | DV
    std::string preset;          // "" | concentration
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> variances;

    // inventory
    std::vector<double> s_grid;
    std::vector<double> S_grid;
    std::vector<double> demand_means;
    InventoryParams params;
    std::int64_t truth_reps = 10000;
    std::uint64_t truth_seed = 1;
    std::string truth_cache;

    friend bool operator==(const ProblemSection&, const ProblemSection&) = default;
};

struct ProcedureSection {
    std::string name = "AR-OCBA";
    std::int64_t n0 = 20;
    std::int64_t delta = 20;
    std::string rule = "proportional"; // proportional | most_starving

    friend bool operator==(const ProcedureSection&, const ProcedureSection&) = default;
};

struct ExperimentSection {
    std::vector<std::string> procedures{"AR-OCBA", "EA", "AR-OCBA-Starving"};
    std::vector<std::int64_t> c_values{10, 20, 30, 40, 50};
    std::int64_t c = 50;  // single-run budget level, N = (n0 + c) k m
    std::int64_t N = 0;   // explicit single-run budget; overrides c when > 0
    std::int64_t replications = 4000;
    std::uint64_t base_seed = 1;
    std::string vary = "delta"; // n0 | delta
    std::vector<std::int64_t> values{2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
    std::int64_t total_per_scenario = 50;

    friend bool operator==(const ExperimentSection&, const ExperimentSection&) = default;
};

struct OutputSection {
    std::string dir = "out";
    std::string format = "csv"; // csv | json
    bool record_wall_time = true;

    friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct RunConfig {
    ProblemSection problem;
    ProcedureSection procedure;
    ExperimentSection experiment;
    OutputSection output;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates; throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& config);

/// Stable 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::ordered_json& j);

ProcedureKind procedure_kind(const ProcedureSection& p);
ProcedureConfig procedure_config(const RunConfig& config, std::size_t k, std::size_t m);

/// Builds the simulator. Inventory problems come without an oracle here.
std::shared_ptr<const Simulator> build_simulator(const ProblemSection& problem);
std::shared_ptr<const InventoryProblem> build_inventory(const ProblemSection& problem);
SyntheticProblem build_synthetic(const ProblemSection& problem);

} // namespace rocba

#pragma once

// PCS estimation over macro replications, budget and sensitivity sweeps, and
// per-round allocation profiles.
//
// Replication r of an estimate always uses seed base_seed + r, and results are
// aggregated by index, so the numbers do not depend on the worker count.

#include "rocba/problems.hpp"
#include "rocba/procedures.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rocba {

/// A simulator together with the alternative that counts as a correct selection.
struct Benchmark {
    std::shared_ptr<const Simulator> sim;
    std::size_t oracle_best = 0;
    bool ambiguous = false;
    std::string label;
};

Benchmark make_benchmark(const SyntheticProblem& problem);
Benchmark make_benchmark(std::shared_ptr<const InventoryProblem> problem, const TruthEstimate& truth);

struct PcsResult {
    double pcs = 0.0;
    double std_error = 0.0;
    std::int64_t correct = 0;
    std::int64_t replications = 0;
};

inline double binomial_stderr(double p, std::int64_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

/// Pooled standard error of a PCS difference, sqrt(se_a^2 + se_b^2).
inline double pooled_stderr(const PcsResult& a, const PcsResult& b) { return std::hypot(a.std_error, b.std_error); }

class Interrupted : public std::runtime_error {
public:
    Interrupted() : std::runtime_error("interrupted") {}
};

/// Throws InvalidInput on an ambiguous oracle, Interrupted if `stop` is raised
/// before all replications finish.
PcsResult estimate_pcs(const Benchmark& bench, ProcedureKind procedure, const ProcedureConfig& config,
                       std::int64_t replications, std::uint64_t base_seed, unsigned jobs = 1,
                       const std::atomic<bool>* stop = nullptr);

struct ReportRow {
    std::string config_label;
    std::string procedure;
    std::size_t k = 0;
    std::size_t m = 0;
    std::int64_t c = 0;
    std::int64_t N = 0;
    std::int64_t replications = 0;
    double pcs = 0.0;
    double std_error = 0.0;
    double wall_time_s = 0.0;
    std::string error; // nonempty when the cell failed
    // Varied parameter in sensitivity sweeps.
    std::int64_t n0 = 0;
    std::int64_t delta = 0;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
};

struct SweepSpec {
    Benchmark bench;
    std::vector<ProcedureKind> procedures;
    std::vector<std::int64_t> c_values;
    std::int64_t n0 = 20;
    std::int64_t delta = 20;
    std::int64_t replications = 1000;
    std::uint64_t base_seed = 1;

    void validate() const;
};

struct SweepHooks {
    unsigned jobs = 1;
    /// Called after each completed cell, in report order.
    std::function<void(const ReportRow&)> on_row;
    /// When raised, the sweep abandons the running cell and returns the rows
    /// finished so far.
    const std::atomic<bool>* stop = nullptr;
};

/// Every (procedure, c) cell with N = (n0 + c) k m; rows come out in
/// (procedure, c) order as listed. A failing cell is recorded and the sweep
/// continues.
ExperimentReport budget_sweep(const SweepSpec& spec, const SweepHooks& hooks = {});

enum class SensitivityParam { N0, Delta };

/// One AR-OCBA row per value of the varied parameter with N pinned at
/// total_per_scenario * k * m; the other parameter comes from `fixed`.
ExperimentReport sensitivity_sweep(const Benchmark& bench, SensitivityParam vary, const std::vector<std::int64_t>& values,
                                   const ProcedureConfig& fixed, std::int64_t total_per_scenario,
                                   std::int64_t replications, std::uint64_t base_seed, const SweepHooks& hooks = {});

/// Cumulative per-scenario counts: row 0 is the state after initialization,
/// row t after round t. Columns are scenarios in row-major (i, j) order.
struct AllocationProfile {
    Counts per_round;
    Counts final_counts;
    RunTrace trace;
};

AllocationProfile allocation_profile(const Simulator& sim, ProcedureKind procedure, ProcedureConfig config,
                                     std::uint64_t seed);

/// Header: config,procedure,k,m,c,N,replications,pcs,stderr,wall_time_s
void write_report_header(std::ostream& out);
void write_report_row(std::ostream& out, const ReportRow& row, bool with_wall_time = true);
void write_report_csv(std::ostream& out, const ExperimentReport& report, bool with_wall_time = true);

/// Per-round cumulative counts as CSV: round,n_used,(i,j) columns...
void write_profile_csv(std::ostream& out, const AllocationProfile& profile);

} // namespace rocba

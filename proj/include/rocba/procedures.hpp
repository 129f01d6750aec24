#pragma once

// Sequential meta-OCBA engine, its stage-wise split rules, and the
// equal-allocation baseline.

#include "rocba/allocator.hpp"
#include "rocba/core.hpp"
#include "rocba/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rocba {

enum class SplitRule { Proportional, MostStarving };

enum class ProcedureKind { ArOcba, ArOcbaStarving, EqualAllocation };

std::string to_string(ProcedureKind kind);
ProcedureKind parse_procedure(const std::string& name); // throws InvalidInput

struct ProcedureConfig {
    std::int64_t n0 = 20;
    std::int64_t delta = 20;
    std::int64_t total_budget = 0;
    SplitRule rule = SplitRule::Proportional;
    bool record_rounds = true;

    /// Throws InvalidInput naming the offending field.
    void validate(std::size_t k, std::size_t m) const;
};

using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct RoundRecord {
    std::int64_t t = 0;
    std::int64_t n_used = 0; // after booking this round's grants
    std::vector<ScenarioId> slots;
    std::vector<double> targets;
    std::vector<std::int64_t> grants;
};

struct RunTrace {
    std::size_t k = 0;
    std::size_t m = 0;
    std::int64_t n0 = 0;
    std::int64_t total_budget = 0;
    std::vector<RoundRecord> rounds;
    std::int64_t rounds_run = 0;
    Counts final_counts;
    std::int64_t n_used = 0;
    std::size_t selection = 0;

    std::int64_t unspent() const noexcept { return total_budget - n_used; }
};

/// ceil(gap_r * delta / sum(gaps)) for positive gaps, 0 otherwise. The total
/// can exceed delta by up to (number of positive gaps - 1).
std::vector<std::int64_t> proportional_split(const std::vector<std::int64_t>& gaps, std::int64_t delta);

/// The whole batch to the largest positive gap (first slot on ties); slot 0
/// when no gap is positive.
std::vector<std::int64_t> most_starving_split(const std::vector<std::int64_t>& gaps, std::int64_t delta);

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Phase 1 takes n0 observations per scenario. Then, while
/// N_used + delta < N: rebuild the index set from the current means, solve the
/// closed-form targets for budget N_used + delta, form integer gaps
/// max(0, round(target) - n), split delta by the configured rule, draw, and
/// book the realized grant total. Finally select on all k*m sample means.
///
/// Draw order is scenario-major within each phase and round, so a trace is a
/// pure function of (simulator, config, seed).
RunTrace run_meta_ocba(const Simulator& sim, const ProcedureConfig& config, std::uint64_t seed);

/// floor(N / km) observations per scenario, remainder unspent, then select.
RunTrace run_equal_allocation(const Simulator& sim, std::int64_t total_budget, std::uint64_t seed);

RunTrace run_procedure(const Simulator& sim, ProcedureKind kind, ProcedureConfig config, std::uint64_t seed);

/// One JSON object per round: {"t","n_used","slots":[[i,j],...],"targets","grants"}
/// with 1-based scenario indices.
void write_trace(std::ostream& out, const RunTrace& trace);

} // namespace rocba

#include "rocba/procedures.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace rocba {

std::string to_string(ProcedureKind kind) {
    switch (kind) {
    case ProcedureKind::ArOcba: return "AR-OCBA";
    case ProcedureKind::ArOcbaStarving: return "AR-OCBA-Starving";
    case ProcedureKind::EqualAllocation: return "EA";
    }
    return "?";
}

ProcedureKind parse_procedure(const std::string& name) {
    if (name == "AR-OCBA") return ProcedureKind::ArOcba;
    if (name == "AR-OCBA-Starving") return ProcedureKind::ArOcbaStarving;
    if (name == "EA") return ProcedureKind::EqualAllocation;
    throw InvalidInput("unknown procedure '" + name + "' (expected AR-OCBA, AR-OCBA-Starving or EA)");
}

void ProcedureConfig::validate(std::size_t k, std::size_t m) const {
    if (n0 < 2) throw InvalidInput("n0 must be ≥ 2 (got " + std::to_string(n0) + ")");
    if (delta < 1) throw InvalidInput("delta must be >= 1 (got " + std::to_string(delta) + ")");
    const auto floor_budget = static_cast<std::int64_t>(k * m) * n0;
    if (total_budget < floor_budget)
        throw InvalidInput("total_budget must be >= k*m*n0 = " + std::to_string(floor_budget) + " (got " +
                           std::to_string(total_budget) + ")");
}

std::vector<std::int64_t> proportional_split(const std::vector<std::int64_t>& gaps, std::int64_t delta) {
    if (delta < 1) throw InvalidInput("proportional_split: delta must be >= 1");
    std::int64_t total = 0;
    for (auto g : gaps) total += std::max<std::int64_t>(g, 0);
    if (total <= 0) throw InvalidInput("proportional_split: no positive gap");
    std::vector<std::int64_t> out(gaps.size(), 0);
    for (std::size_t r = 0; r < gaps.size(); ++r) {
        if (gaps[r] > 0) out[r] = (gaps[r] * delta + total - 1) / total; // exact integer ceiling
    }
    return out;
}

std::vector<std::int64_t> most_starving_split(const std::vector<std::int64_t>& gaps, std::int64_t delta) {
    if (delta < 1) throw InvalidInput("most_starving_split: delta must be >= 1");
    if (gaps.empty()) throw InvalidInput("most_starving_split: empty gap vector");
    std::size_t pick = 0;
    std::int64_t best = 0;
    for (std::size_t r = 0; r < gaps.size(); ++r) {
        if (gaps[r] > best) {
            best = gaps[r];
            pick = r;
        }
    }
    std::vector<std::int64_t> out(gaps.size(), 0);
    out[pick] = delta;
    return out;
}

namespace {

void sample(const Simulator& sim, ScenarioGrid& grid, ScenarioId id, std::int64_t count, Rng& rng, std::int64_t round) {
    for (std::int64_t n = 0; n < count; ++n) {
        double x;
        try {
            x = sim.draw(id, rng);
        } catch (const std::exception& e) {
            throw SimulationError("round " + std::to_string(round) + ", scenario " + to_string(id) + ": " + e.what());
        }
        grid.record(id, x);
    }
}

void initialize(const Simulator& sim, ScenarioGrid& grid, std::int64_t n0, Rng& rng) {
    for (std::size_t i = 0; i < sim.k(); ++i)
        for (std::size_t j = 0; j < sim.m(); ++j) sample(sim, grid, {i, j}, n0, rng, 0);
}

} // namespace

RunTrace run_meta_ocba(const Simulator& sim, const ProcedureConfig& config, std::uint64_t seed) {
    const std::size_t k = sim.k(), m = sim.m();
    config.validate(k, m);

    Rng rng = make_rng(seed);
    ScenarioGrid grid(k, m);
    initialize(sim, grid, config.n0, rng);

    RunTrace trace;
    trace.k = k;
    trace.m = m;
    trace.n0 = config.n0;
    trace.total_budget = config.total_budget;

    std::int64_t t = 0;
    std::vector<std::int64_t> gaps;
    while (grid.total_used() + config.delta < config.total_budget) {
        ++t;
        const IndexSet set = build_index_set(grid);
        const auto target =
            solve_asymptotic_allocation(set, grid, static_cast<double>(grid.total_used() + config.delta));

        gaps.assign(set.size(), 0);
        std::int64_t positive = 0;
        for (std::size_t r = 0; r < set.size(); ++r) {
            const auto want = static_cast<std::int64_t>(std::floor(target.n_target(static_cast<Eigen::Index>(r)) + 0.5));
            gaps[r] = std::max<std::int64_t>(0, want - grid.at(set[r]).count);
            positive += gaps[r];
        }

        std::vector<std::int64_t> grants;
        if (config.rule == SplitRule::MostStarving) {
            grants = most_starving_split(gaps, config.delta);
        } else if (positive > 0) {
            grants = proportional_split(gaps, config.delta);
        } else {
            grants.assign(set.size(), 0);
            grants[0] = config.delta;
        }

        for (std::size_t r = 0; r < set.size(); ++r) sample(sim, grid, set[r], grants[r], rng, t);

        if (config.record_rounds) {
            RoundRecord rec;
            rec.t = t;
            rec.n_used = grid.total_used();
            rec.slots = set.entries;
            rec.targets.assign(target.n_target.data(), target.n_target.data() + target.n_target.size());
            rec.grants = std::move(grants);
            trace.rounds.push_back(std::move(rec));
        }
    }

    trace.rounds_run = t;
    trace.final_counts = grid.counts();
    trace.n_used = grid.total_used();
    trace.selection = select_best(grid.means());
    return trace;
}

RunTrace run_equal_allocation(const Simulator& sim, std::int64_t total_budget, std::uint64_t seed) {
    const std::size_t k = sim.k(), m = sim.m();
    const auto km = static_cast<std::int64_t>(k * m);
    if (total_budget < km) throw InvalidInput("total_budget must be >= k*m for equal allocation");
    const std::int64_t each = total_budget / km;

    Rng rng = make_rng(seed);
    ScenarioGrid grid(k, m);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m; ++j) sample(sim, grid, {i, j}, each, rng, 0);

    RunTrace trace;
    trace.k = k;
    trace.m = m;
    trace.n0 = each;
    trace.total_budget = total_budget;
    trace.final_counts = grid.counts();
    trace.n_used = grid.total_used();
    trace.selection = select_best(grid.means());
    return trace;
}

RunTrace run_procedure(const Simulator& sim, ProcedureKind kind, ProcedureConfig config, std::uint64_t seed) {
    switch (kind) {
    case ProcedureKind::EqualAllocation: return run_equal_allocation(sim, config.total_budget, seed);
    case ProcedureKind::ArOcbaStarving: config.rule = SplitRule::MostStarving; break;
    case ProcedureKind::ArOcba: config.rule = SplitRule::Proportional; break;
    }
    return run_meta_ocba(sim, config, seed);
}

void write_trace(std::ostream& out, const RunTrace& trace) {
    for (const auto& rec : trace.rounds) {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& s : rec.slots) slots.push_back({s.i + 1, s.j + 1});
        nlohmann::ordered_json line;
        line["t"] = rec.t;
        line["n_used"] = rec.n_used;
        line["slots"] = slots;
        line["targets"] = rec.targets;
        line["grants"] = rec.grants;
        out << line.dump() << '\n';
    }
}

} // namespace rocba

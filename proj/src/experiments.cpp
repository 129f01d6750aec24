#include "rocba/experiments.hpp"

#include "rocba/format.hpp"
#include "rocba/parallel.hpp"

#include <chrono>
#include <exception>
#include <ostream>

namespace rocba {

Benchmark make_benchmark(const SyntheticProblem& problem) {
    return {std::make_shared<SyntheticProblem>(problem), problem.truth().best, !problem.truth().unique_best,
            to_string(problem.label())};
}

Benchmark make_benchmark(std::shared_ptr<const InventoryProblem> problem, const TruthEstimate& truth) {
    return {std::move(problem), truth.truth.best, truth.ambiguous, "inventory"};
}

PcsResult estimate_pcs(const Benchmark& bench, ProcedureKind procedure, const ProcedureConfig& config,
                       std::int64_t replications, std::uint64_t base_seed, unsigned jobs,
                       const std::atomic<bool>* stop) {
    if (!bench.sim) throw InvalidInput("estimate_pcs: benchmark has no simulator");
    if (bench.ambiguous) throw InvalidInput("estimate_pcs: the oracle best alternative is ambiguous");
    if (replications < 1) throw InvalidInput("estimate_pcs: replications must be >= 1");

    ProcedureConfig quiet = config;
    quiet.record_rounds = false;
    std::vector<unsigned char> hit(static_cast<std::size_t>(replications), 0);
    parallel_for(hit.size(), jobs, [&](std::size_t r) {
        if (stop && stop->load()) throw Interrupted();
        const auto trace = run_procedure(*bench.sim, procedure, quiet, base_seed + r);
        hit[r] = trace.selection == bench.oracle_best;
    });

    PcsResult out;
    out.replications = replications;
    for (auto h : hit) out.correct += h;
    out.pcs = static_cast<double>(out.correct) / static_cast<double>(replications);
    out.std_error = binomial_stderr(out.pcs, replications);
    return out;
}

void SweepSpec::validate() const {
    if (replications < 1) throw InvalidInput("replications must be >= 1");
    if (c_values.empty()) throw InvalidInput("c_values must be nonempty");
    for (auto c : c_values)
        if (c < 1) throw InvalidInput("c_values must be positive");
    if (procedures.empty()) throw InvalidInput("procedures must be nonempty");
    if (n0 < 2) throw InvalidInput("n0 must be >= 2");
    if (delta < 1) throw InvalidInput("delta must be >= 1");
}

namespace {

ReportRow run_cell(const Benchmark& bench, ProcedureKind proc, const ProcedureConfig& cfg, std::int64_t c,
                   std::int64_t reps, std::uint64_t seed, const SweepHooks& hooks) {
    ReportRow row;
    row.config_label = bench.label;
    row.procedure = to_string(proc);
    row.k = bench.sim->k();
    row.m = bench.sim->m();
    row.c = c;
    row.N = cfg.total_budget;
    row.replications = reps;
    row.n0 = cfg.n0;
    row.delta = cfg.delta;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto r = estimate_pcs(bench, proc, cfg, reps, seed, hooks.jobs, hooks.stop);
        row.pcs = r.pcs;
        row.std_error = r.std_error;
    } catch (const Interrupted&) {
        throw;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

bool stopped(const SweepHooks& hooks) { return hooks.stop && hooks.stop->load(); }

} // namespace

ExperimentReport budget_sweep(const SweepSpec& spec, const SweepHooks& hooks) {
    spec.validate();
    const auto km = static_cast<std::int64_t>(spec.bench.sim->k() * spec.bench.sim->m());
    ExperimentReport report;
    for (auto proc : spec.procedures) {
        for (auto c : spec.c_values) {
            if (stopped(hooks)) return report;
            ProcedureConfig cfg;
            cfg.n0 = spec.n0;
            cfg.delta = spec.delta;
            cfg.total_budget = (spec.n0 + c) * km;
            try {
                report.rows.push_back(run_cell(spec.bench, proc, cfg, c, spec.replications, spec.base_seed, hooks));
            } catch (const Interrupted&) {
                return report;
            }
            if (hooks.on_row) hooks.on_row(report.rows.back());
        }
    }
    return report;
}

ExperimentReport sensitivity_sweep(const Benchmark& bench, SensitivityParam vary, const std::vector<std::int64_t>& values,
                                   const ProcedureConfig& fixed, std::int64_t total_per_scenario,
                                   std::int64_t replications, std::uint64_t base_seed, const SweepHooks& hooks) {
    if (values.empty()) throw InvalidInput("sensitivity_sweep: values must be nonempty");
    if (replications < 1) throw InvalidInput("sensitivity_sweep: replications must be >= 1");
    const auto km = static_cast<std::int64_t>(bench.sim->k() * bench.sim->m());
    ExperimentReport report;
    for (auto v : values) {
        if (stopped(hooks)) return report;
        ProcedureConfig cfg = fixed;
        (vary == SensitivityParam::N0 ? cfg.n0 : cfg.delta) = v;
        cfg.total_budget = total_per_scenario * km;
        cfg.validate(bench.sim->k(), bench.sim->m());
        try {
            report.rows.push_back(run_cell(bench, ProcedureKind::ArOcba, cfg, total_per_scenario - cfg.n0, replications,
                                           base_seed, hooks));
        } catch (const Interrupted&) {
            return report;
        }
        if (hooks.on_row) hooks.on_row(report.rows.back());
    }
    return report;
}

AllocationProfile allocation_profile(const Simulator& sim, ProcedureKind procedure, ProcedureConfig config,
                                     std::uint64_t seed) {
    config.record_rounds = true;
    AllocationProfile p;
    p.trace = run_procedure(sim, procedure, config, seed);
    const std::size_t m = sim.m();
    const auto km = static_cast<Eigen::Index>(sim.k() * m);
    p.per_round = Counts::Constant(static_cast<Eigen::Index>(p.trace.rounds.size()) + 1, km, p.trace.n0);
    for (std::size_t t = 0; t < p.trace.rounds.size(); ++t) {
        const auto row = static_cast<Eigen::Index>(t) + 1;
        p.per_round.row(row) = p.per_round.row(row - 1);
        const auto& rec = p.trace.rounds[t];
        for (std::size_t r = 0; r < rec.slots.size(); ++r)
            p.per_round(row, static_cast<Eigen::Index>(rec.slots[r].i * m + rec.slots[r].j)) += rec.grants[r];
    }
    p.final_counts = p.trace.final_counts;
    return p;
}

void write_report_header(std::ostream& out) { out << "config,procedure,k,m,c,N,replications,pcs,stderr,wall_time_s\n"; }

void write_report_row(std::ostream& out, const ReportRow& row, bool with_wall_time) {
    out << row.config_label << ',' << row.procedure << ',' << row.k << ',' << row.m << ',' << row.c << ',' << row.N << ','
        << row.replications << ',';
    if (row.error.empty()) {
        out << format_double(row.pcs) << ',' << format_double(row.std_error);
    } else {
        out << "nan,nan";
    }
    out << ',' << format_double(with_wall_time ? row.wall_time_s : 0.0) << '\n';
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, bool with_wall_time) {
    write_report_header(out);
    for (const auto& row : report.rows) write_report_row(out, row, with_wall_time);
}

void write_profile_csv(std::ostream& out, const AllocationProfile& profile) {
    const std::size_t m = profile.trace.m;
    out << "round,n_used";
    for (std::size_t i = 0; i < profile.trace.k; ++i)
        for (std::size_t j = 0; j < m; ++j) out << ",n_" << i + 1 << '_' << j + 1;
    out << '\n';
    for (Eigen::Index t = 0; t < profile.per_round.rows(); ++t) {
        out << t << ',' << profile.per_round.row(t).sum();
        for (Eigen::Index c = 0; c < profile.per_round.cols(); ++c) out << ',' << profile.per_round(t, c);
        out << '\n';
    }
}

} // namespace rocba

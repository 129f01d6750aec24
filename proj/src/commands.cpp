#include "rocba/commands.hpp"

#include "rocba/format.hpp"
#include "rocba/parallel.hpp"
#include "rocba/validation.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace rocba {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned jobs_of(const CommonOptions& o) { return o.jobs.value_or(default_jobs()); }

fs::path output_dir(const RunConfig& config) {
    fs::path dir(config.output.dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

// Where the outputs go is not part of what produced them.
std::string run_hash(const RunConfig& config) {
    ordered_json j = to_json(config);
    j["output"].erase("dir");
    return config_hash(j);
}

void write_meta(const fs::path& artifact, const RunConfig& config, const std::string& command) {
    ordered_json meta;
    meta["command"] = command;
    meta["config_hash"] = run_hash(config);
    meta["seed"] = config.experiment.base_seed;
    meta["version"] = version_string;
    auto out = open_out(artifact.string() + ".meta.json");
    out << meta.dump(2) << '\n';
}

std::string describe_alternative(const Simulator& sim, std::size_t i) {
    std::ostringstream os;
    os << i + 1;
    if (const auto* inv = dynamic_cast<const InventoryProblem*>(&sim))
        os << " (s=" << format_double(inv->policies()[i].s) << ", S=" << format_double(inv->policies()[i].S) << ')';
    return os.str();
}

std::string format_seconds(double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(s < 10 ? 2 : 0) << s << " s";
    return os.str();
}

// Identity of the oracle: everything in the problem section except where the
// cache lives.
std::string truth_key(const RunConfig& config) {
    ordered_json problem = to_json(config)["problem"];
    if (problem.contains("truth")) problem["truth"].erase("cache");
    return config_hash(problem);
}

fs::path truth_cache_path(const RunConfig& config) {
    if (!config.problem.truth_cache.empty()) return config.problem.truth_cache;
    return output_dir(config) / "truth.csv";
}

struct TruthLoad {
    TruthEstimate estimate;
    fs::path path;
    bool reused = false;
};

TruthLoad load_or_build_truth(const RunConfig& config, const InventoryProblem& problem, unsigned jobs, CommandIo io) {
    TruthLoad result;
    result.path = truth_cache_path(config);
    const fs::path meta_path = result.path.string() + ".meta.json";
    const std::string key = truth_key(config);

    if (fs::exists(result.path) && fs::exists(meta_path)) {
        std::ifstream meta_in(meta_path);
        const auto meta = nlohmann::json::parse(meta_in, nullptr, false);
        if (!meta.is_discarded() && meta.value("problem_hash", "") == key) {
            std::ifstream in(result.path);
            result.estimate = read_truth_cache(in, problem);
            result.reused = true;
            return result;
        }
    }

    // One pilot draw per scenario sizes the estimate.
    const auto pilot_start = Clock::now();
    Rng pilot = make_rng(config.problem.truth_seed, ~std::uint64_t{0});
    for (std::size_t i = 0; i < problem.k(); ++i)
        for (std::size_t j = 0; j < problem.m(); ++j) problem.draw({i, j}, pilot);
    const double estimate = seconds_since(pilot_start) * static_cast<double>(config.problem.truth_reps) / jobs;
    io.err << "truth: " << config.problem.truth_reps << " reps x " << problem.k() * problem.m()
           << " scenarios, estimated " << format_seconds(estimate) << " on " << jobs << " job(s)\n";

    result.estimate = estimate_truth(problem, config.problem.truth_reps, config.problem.truth_seed, jobs);
    if (result.path.has_parent_path()) fs::create_directories(result.path.parent_path());
    {
        auto out = open_out(result.path);
        write_truth_cache(out, problem, result.estimate);
    }
    ordered_json meta;
    meta["problem_hash"] = key;
    meta["seed"] = config.problem.truth_seed;
    meta["reps"] = config.problem.truth_reps;
    meta["version"] = version_string;
    auto out = open_out(meta_path);
    out << meta.dump(2) << '\n';
    return result;
}

Benchmark build_benchmark(const RunConfig& config, unsigned jobs, CommandIo io) {
    if (config.problem.kind == "inventory") {
        auto problem = build_inventory(config.problem);
        const auto truth = load_or_build_truth(config, *problem, jobs, io);
        if (truth.estimate.ambiguous)
            throw std::runtime_error("the estimated best alternative is ambiguous; raise /problem/truth/reps");
        return make_benchmark(std::move(problem), truth.estimate);
    }
    return make_benchmark(build_synthetic(config.problem));
}

ordered_json row_json(const ReportRow& row, bool with_wall_time) {
    ordered_json j;
    j["config"] = row.config_label;
    j["procedure"] = row.procedure;
    j["k"] = row.k;
    j["m"] = row.m;
    j["c"] = row.c;
    j["N"] = row.N;
    j["n0"] = row.n0;
    j["delta"] = row.delta;
    j["replications"] = row.replications;
    if (row.error.empty()) {
        j["pcs"] = row.pcs;
        j["stderr"] = row.std_error;
    } else {
        j["pcs"] = nullptr;
        j["stderr"] = nullptr;
        j["error"] = row.error;
    }
    j["wall_time_s"] = with_wall_time ? row.wall_time_s : 0.0;
    return j;
}

// Streams report rows to disk as they complete so an interrupted sweep leaves
// every finished row behind.
class RowSink {
public:
    RowSink(const fs::path& path, bool json, bool with_wall_time, bool sensitivity)
        : out_(open_out(path)), json_(json), wall_(with_wall_time), sensitivity_(sensitivity) {
        if (json_) return;
        if (sensitivity_) {
            std::ostringstream header;
            write_report_header(header);
            std::string h = header.str();
            h.pop_back();
            out_ << h << ",n0,delta\n";
        } else {
            write_report_header(out_);
        }
        out_.flush();
    }

    void write(const ReportRow& row) {
        if (json_) {
            out_ << row_json(row, wall_).dump() << '\n';
        } else if (sensitivity_) {
            std::ostringstream line;
            write_report_row(line, row, wall_);
            std::string l = line.str();
            l.pop_back();
            out_ << l << ',' << row.n0 << ',' << row.delta << '\n';
        } else {
            write_report_row(out_, row, wall_);
        }
        out_.flush();
        ++rows_;
    }

    std::size_t rows() const noexcept { return rows_; }

private:
    std::ofstream out_;
    bool json_;
    bool wall_;
    bool sensitivity_;
    std::size_t rows_ = 0;
};

// Times one replication per probe and scales by the replication count.
double estimate_sweep_seconds(const Benchmark& bench, const std::vector<std::pair<ProcedureKind, ProcedureConfig>>& cells,
                              std::int64_t replications, std::uint64_t seed, unsigned jobs) {
    double total = 0.0;
    for (const auto& [kind, cfg] : cells) {
        const auto start = Clock::now();
        ProcedureConfig quiet = cfg;
        quiet.record_rounds = false;
        run_procedure(*bench.sim, kind, quiet, seed);
        total += seconds_since(start);
    }
    return total * static_cast<double>(replications) / jobs;
}

template <class Fn>
int guarded(CommandIo io, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        io.err << "config error at " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        io.err << "error: " << e.what() << '\n';
        return 1;
    }
}

void progress(CommandIo io, std::size_t done, std::size_t total, const ReportRow& row, double elapsed) {
    io.err << '[' << done << '/' << total << "] " << row.procedure << " c=" << row.c << " n0=" << row.n0
           << " delta=" << row.delta << ' ';
    if (row.error.empty())
        io.err << "pcs=" << format_double(row.pcs) << " se=" << format_double(row.std_error);
    else
        io.err << "failed: " << row.error;
    if (done < total) io.err << " (eta " << format_seconds(elapsed / done * (total - done)) << ')';
    io.err << '\n';
}

} // namespace

RunConfig resolve_config(const CommonOptions& options) {
    RunConfig config = options.config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(options.config_path);
    if (options.seed) config.experiment.base_seed = *options.seed;
    if (options.out_dir) {
        if (options.out_dir->empty()) throw ConfigError("--out", "must be nonempty");
        config.output.dir = *options.out_dir;
    }
    if (options.format) {
        if (*options.format != "csv" && *options.format != "json")
            throw ConfigError("--format", "must be \"csv\" or \"json\"");
        config.output.format = *options.format;
    }
    if (options.jobs && *options.jobs == 0) throw ConfigError("--jobs", "must be >= 1");
    return config;
}

int cmd_run(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const RunConfig config = resolve_config(options);
        const auto sim = build_simulator(config.problem);
        const ProcedureKind kind = procedure_kind(config.procedure);
        const ProcedureConfig pc = procedure_config(config, sim->k(), sim->m());

        const auto start = Clock::now();
        const RunTrace trace = run_procedure(*sim, kind, pc, config.experiment.base_seed);
        const double wall = seconds_since(start);

        const fs::path path = output_dir(config) / "trace.jsonl";
        {
            auto out = open_out(path);
            write_trace(out, trace);
        }
        write_meta(path, config, "run");
        io.out << to_string(kind) << ": selected alternative " << describe_alternative(*sim, trace.selection)
               << ", N_used=" << trace.n_used << " of " << trace.total_budget << ", rounds=" << trace.rounds_run
               << ", wall time " << format_seconds(wall) << '\n';
        return 0;
    });
}

int cmd_pcs(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const RunConfig config = resolve_config(options);
        const unsigned jobs = jobs_of(options);
        SweepSpec spec;
        spec.bench = build_benchmark(config, jobs, io);
        for (const auto& name : config.experiment.procedures) spec.procedures.push_back(parse_procedure(name));
        spec.c_values = config.experiment.c_values;
        spec.n0 = config.procedure.n0;
        spec.delta = config.procedure.delta;
        spec.replications = config.experiment.replications;
        spec.base_seed = config.experiment.base_seed;
        try {
            spec.validate();
        } catch (const InvalidInput& e) {
            throw ConfigError("/experiment", e.what());
        }

        const auto km = static_cast<std::int64_t>(spec.bench.sim->k() * spec.bench.sim->m());
        const std::int64_t c_max = *std::max_element(spec.c_values.begin(), spec.c_values.end());
        std::vector<std::pair<ProcedureKind, ProcedureConfig>> probes;
        for (auto kind : spec.procedures) {
            ProcedureConfig cfg;
            cfg.n0 = spec.n0;
            cfg.delta = spec.delta;
            cfg.rule = kind == ProcedureKind::ArOcbaStarving ? SplitRule::MostStarving : SplitRule::Proportional;
            cfg.total_budget = (spec.n0 + c_max) * km;
            probes.emplace_back(kind, cfg);
        }
        const std::size_t cells = spec.procedures.size() * spec.c_values.size();
        io.err << "pcs: " << cells << " cells x " << spec.replications << " replications, estimated at most "
               << format_seconds(estimate_sweep_seconds(spec.bench, probes, spec.replications, spec.base_seed, jobs) *
                                 static_cast<double>(spec.c_values.size()))
               << " on " << jobs << " job(s)\n";

        const bool json = config.output.format == "json";
        const fs::path path = output_dir(config) / (json ? "pcs.jsonl" : "pcs.csv");
        RowSink sink(path, json, config.output.record_wall_time, false);
        write_meta(path, config, "pcs");
        const auto start = Clock::now();
        SweepHooks hooks;
        hooks.jobs = jobs;
        hooks.stop = io.stop;
        hooks.on_row = [&](const ReportRow& row) {
            sink.write(row);
            progress(io, sink.rows(), cells, row, seconds_since(start));
        };
        const auto report = budget_sweep(spec, hooks);
        if (report.rows.size() < cells) {
            io.err << "interrupted: " << report.rows.size() << " of " << cells << " rows written to " << path.string()
                   << '\n';
            return 1;
        }
        io.out << "wrote " << report.rows.size() << " rows to " << path.string() << '\n';
        for (const auto& row : report.rows)
            if (!row.error.empty()) return 1;
        return 0;
    });
}

int cmd_sweep_sensitivity(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const RunConfig config = resolve_config(options);
        const unsigned jobs = jobs_of(options);
        const Benchmark bench = build_benchmark(config, jobs, io);
        const auto k = bench.sim->k(), m = bench.sim->m();
        const auto vary = config.experiment.vary == "n0" ? SensitivityParam::N0 : SensitivityParam::Delta;

        ProcedureConfig fixed;
        fixed.n0 = config.procedure.n0;
        fixed.delta = config.procedure.delta;
        fixed.rule = SplitRule::Proportional;
        fixed.total_budget = config.experiment.total_per_scenario * static_cast<std::int64_t>(k * m);
        std::vector<std::pair<ProcedureKind, ProcedureConfig>> probes;
        for (auto v : config.experiment.values) {
            ProcedureConfig cfg = fixed;
            (vary == SensitivityParam::N0 ? cfg.n0 : cfg.delta) = v;
            try {
                cfg.validate(k, m);
            } catch (const InvalidInput& e) {
                throw ConfigError("/experiment/values", e.what());
            }
            probes.emplace_back(ProcedureKind::ArOcba, cfg);
        }
        const std::size_t cells = probes.size();
        io.err << "sweep-sensitivity: " << cells << " values of " << config.experiment.vary << " x "
               << config.experiment.replications << " replications, estimated "
               << format_seconds(estimate_sweep_seconds(bench, probes, config.experiment.replications,
                                                        config.experiment.base_seed, jobs))
               << " on " << jobs << " job(s)\n";

        const bool json = config.output.format == "json";
        const fs::path path = output_dir(config) / (json ? "sensitivity.jsonl" : "sensitivity.csv");
        RowSink sink(path, json, config.output.record_wall_time, true);
        write_meta(path, config, "sweep-sensitivity");
        const auto start = Clock::now();
        SweepHooks hooks;
        hooks.jobs = jobs;
        hooks.stop = io.stop;
        hooks.on_row = [&](const ReportRow& row) {
            sink.write(row);
            progress(io, sink.rows(), cells, row, seconds_since(start));
        };
        const auto report = sensitivity_sweep(bench, vary, config.experiment.values, fixed,
                                              config.experiment.total_per_scenario, config.experiment.replications,
                                              config.experiment.base_seed, hooks);
        if (report.rows.size() < cells) {
            io.err << "interrupted: " << report.rows.size() << " of " << cells << " rows written to " << path.string()
                   << '\n';
            return 1;
        }
        io.out << "wrote " << report.rows.size() << " rows to " << path.string() << '\n';
        for (const auto& row : report.rows)
            if (!row.error.empty()) return 1;
        return 0;
    });
}

int cmd_trace(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const RunConfig config = resolve_config(options);
        const auto sim = build_simulator(config.problem);
        const ProcedureKind kind = procedure_kind(config.procedure);
        const ProcedureConfig pc = procedure_config(config, sim->k(), sim->m());
        const auto profile = allocation_profile(*sim, kind, pc, config.experiment.base_seed);
        const fs::path dir = output_dir(config);

        std::vector<fs::path> written;
        if (config.output.format == "json") {
            ordered_json j;
            j["k"] = sim->k();
            j["m"] = sim->m();
            j["selection"] = profile.trace.selection + 1;
            j["n_used"] = profile.trace.n_used;
            j["per_round"] = ordered_json::array();
            for (Eigen::Index t = 0; t < profile.per_round.rows(); ++t) {
                std::vector<std::int64_t> row(profile.per_round.cols());
                for (Eigen::Index c = 0; c < profile.per_round.cols(); ++c) row[c] = profile.per_round(t, c);
                j["per_round"].push_back(row);
            }
            j["final_counts"] = ordered_json::array();
            for (Eigen::Index i = 0; i < profile.final_counts.rows(); ++i) {
                std::vector<std::int64_t> row(profile.final_counts.cols());
                for (Eigen::Index c = 0; c < profile.final_counts.cols(); ++c) row[c] = profile.final_counts(i, c);
                j["final_counts"].push_back(row);
            }
            written.push_back(dir / "profile.json");
            auto out = open_out(written.back());
            out << j.dump(2) << '\n';
        } else {
            written.push_back(dir / "profile.csv");
            {
                auto out = open_out(written.back());
                write_profile_csv(out, profile);
            }
            written.push_back(dir / "final_counts.csv");
            auto out = open_out(written.back());
            out << "alternative";
            for (Eigen::Index j = 0; j < profile.final_counts.cols(); ++j) out << ",j" << j + 1;
            out << '\n';
            for (Eigen::Index i = 0; i < profile.final_counts.rows(); ++i) {
                out << i + 1;
                for (Eigen::Index j = 0; j < profile.final_counts.cols(); ++j) out << ',' << profile.final_counts(i, j);
                out << '\n';
            }
        }
        for (const auto& p : written) write_meta(p, config, "trace");
        io.out << to_string(kind) << ": " << profile.per_round.rows() - 1 << " rounds, selected alternative "
               << describe_alternative(*sim, profile.trace.selection) << "; wrote";
        for (const auto& p : written) io.out << ' ' << p.string();
        io.out << '\n';
        return 0;
    });
}

int cmd_validate(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const auto start = Clock::now();
        const auto checks = run_validation_suite(options.quick, options.seed.value_or(1));
        bool ok = true;
        for (const auto& c : checks) {
            const char* tag = c.pass ? "PASS" : (c.gating ? "FAIL" : "INFO");
            io.out << tag << "  " << c.name << ": " << c.detail << " (tolerance " << format_double(c.tolerance) << ")\n";
            if (c.gating && !c.pass) ok = false;
        }
        io.out << (ok ? "all gating checks passed" : "validation failed") << " in "
               << format_seconds(seconds_since(start)) << '\n';
        return ok ? 0 : 1;
    });
}

int cmd_truth(const CommonOptions& options, CommandIo io) {
    return guarded(io, [&] {
        const RunConfig config = resolve_config(options);
        if (config.problem.kind != "inventory")
            throw ConfigError("/problem/kind", "truth needs an inventory problem");
        const auto problem = build_inventory(config.problem);
        const auto loaded = load_or_build_truth(config, *problem, jobs_of(options), io);
        const auto& est = loaded.estimate;
        const auto& t = est.truth;
        auto worst = [&](std::size_t i) {
            const auto j = t.worst_of[i];
            return format_double(t.mu(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + " +/- " +
                   format_double(est.std_error(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        };
        io.out << (loaded.reused ? "reused " : "wrote ") << loaded.path.string() << '\n';
        io.out << "best alternative " << describe_alternative(*problem, t.best) << ", worst-case cost " << worst(t.best)
               << '\n';
        if (t.k() > 1)
            io.out << "runner-up " << describe_alternative(*problem, est.runner_up) << ", worst-case cost "
                   << worst(est.runner_up) << '\n';
        io.out << "ambiguous: " << (est.ambiguous ? "yes" : "no") << '\n';
        return est.ambiguous ? 1 : 0;
    });
}

} // namespace rocba

#include "rocba/commands.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <functional>
#include <iostream>
#include <map>

namespace {

std::atomic<bool> stop_requested{false};

extern "C" void on_sigint(int) { stop_requested.store(true); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust ranking and selection with additive OCBA procedures"};
    app.set_version_flag("--version", rocba::version_string);
    app.require_subcommand(1);

    rocba::CommonOptions options;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    std::string out_dir;
    std::string format;

    using Command = std::function<int(const rocba::CommonOptions&, rocba::CommandIo)>;
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"run", "Run one procedure and write its trace", rocba::cmd_run},
        {"pcs", "Estimate PCS over the budget grid", rocba::cmd_pcs},
        {"sweep-sensitivity", "Estimate PCS while varying n0 or delta", rocba::cmd_sweep_sensitivity},
        {"trace", "Write the per-round allocation profile of one run", rocba::cmd_trace},
        {"validate", "Run the oracle checks", rocba::cmd_validate},
        {"truth", "Build or reuse the inventory ground-truth cache", rocba::cmd_truth},
    };

    std::map<CLI::App*, Command> handlers;
    for (const auto& [name, help, fn] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", options.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Base seed (overrides experiment.base_seed)");
        sub->add_option("--jobs", jobs, "Worker threads (default: hardware concurrency)");
        sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
        if (name == "validate") sub->add_flag("--quick", options.quick, "Reduced-repetition variant");
        handlers[sub] = fn;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--jobs")) options.jobs = jobs;
    if (sub->count("--out")) options.out_dir = out_dir;
    if (sub->count("--format")) options.format = format;

    std::signal(SIGINT, on_sigint);
    return handlers.at(sub)(options, {std::cout, std::cerr, &stop_requested});
}

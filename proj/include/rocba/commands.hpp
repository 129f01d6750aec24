#pragma once

// Command implementations behind the `rocba` executable. Each returns the
// process exit status: 0 success, 1 runtime failure, 2 configuration error.

#include "rocba/config.hpp"

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace rocba {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    bool quick = false; // validate only
};

struct CommandIo {
    std::ostream& out;
    std::ostream& err;
    const std::atomic<bool>* stop = nullptr;
};

inline constexpr const char* version_string = "0.1.0";

/// Loads the config file and applies flag overrides. Throws ConfigError.
RunConfig resolve_config(const CommonOptions& options);

int cmd_run(const CommonOptions& options, CommandIo io);
int cmd_pcs(const CommonOptions& options, CommandIo io);
int cmd_sweep_sensitivity(const CommonOptions& options, CommandIo io);
int cmd_trace(const CommonOptions& options, CommandIo io);
int cmd_validate(const CommonOptions& options, CommandIo io);
int cmd_truth(const CommonOptions& options, CommandIo io);

} // namespace rocba

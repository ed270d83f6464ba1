#pragma once

#include "multiwell/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mw {

struct CliOverrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

// Subcommand pipeline. Returns the process exit code:
//   0  success (assumption-flag failures are data, not errors)
//   2  configuration/validation failure
//   3  hard numerical error (resolution guard, solver stagnation, ...)
int run_subcommand(const std::string& subcommand, const std::string& config_path,
                   const CliOverrides& overrides = {});

}  // namespace mw

#pragma once

#include "glsync/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace glsync {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_diverged = 3,
    exit_io = 4,
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// "<command>-<16 hex digits>", hashed over the command and canonical config.
std::string run_dir_name(std::string_view command, const RunConfig& config);

/// Entry point of the glsync executable. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace glsync

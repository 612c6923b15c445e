#pragma once

#include <string>
#include <vector>

#include "s3conf/config.hpp"

namespace s3conf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFeasibility = 3;
inline constexpr int kExitNotConverged = 4;

const std::vector<std::string>& subcommands();

// Field used when none is configured.
std::string default_field(const std::string& subcommand);

// Runs one subcommand with a fully resolved config; writes artifacts into
// <out>/<subcommand>-<hash>/ and returns the exit code. Library errors
// propagate to the caller.
int run(const std::string& subcommand, RunConfig config);

}  // namespace s3conf::cli

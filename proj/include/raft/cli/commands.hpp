#pragma once

#include <string>
#include <vector>

namespace raft {

/// Parses and executes one CLI invocation. Returns the process exit
/// status: 0 on success, 2 on usage/config/validation errors, 1 on
/// runtime failures.
int run_cli(const std::vector<std::string>& args);

}  // namespace raft

#pragma once

#include <string>

#include <json.hpp>

#include "hyperlip/config.hpp"

namespace hyperlip {

struct CommandResult {
    int exit_code = 0; // 0 ok, 2 inconclusive/infeasible, 1 error
    nlohmann::ordered_json report;
};

// Dispatches one CLI command. Errors surface as exit code 1 with an
// {"error": {code, message}} report; inconclusive or infeasible verdicts
// exit 2.
CommandResult run_command(const std::string& command, const JobConfig& config);

const std::vector<std::string>& command_names();

} // namespace hyperlip

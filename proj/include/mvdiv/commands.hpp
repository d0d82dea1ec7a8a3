#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mvdiv/config.hpp"
#include "mvdiv/error.hpp"
#include "mvdiv/table.hpp"

namespace mvdiv {

enum ExitCode : int {
    ExitOk = 0,
    ExitConfig = 1,
    ExitSolver = 2,
    ExitVerification = 3,
};

/// Result of one subcommand: the table to print and the exit status.
struct CommandResult {
    Table table;
    int exit_code = ExitOk;
};

CommandResult cmd_solve(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_sweep(const RunConfig& cfg);
CommandResult cmd_gamma_bar(const RunConfig& cfg);

/// Runs `command` ("solve", "verify", ...) and writes its table to cfg.output or
/// `out`. Library errors are reported on `err` and mapped to exit codes.
int run_command(std::string_view command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

int exit_code_for(ErrorCode code) noexcept;

}  // namespace mvdiv

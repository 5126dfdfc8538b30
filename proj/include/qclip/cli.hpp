#pragma once

#include <string>
#include <vector>

namespace qclip::cli {

// Entry point behind main(): parses one subcommand out of
// {qlip, netlip, hyblip, train, experiment, plot}, runs it, and returns the
// process exit code (0 ok, 1 validation/usage, 2 internal numeric failure).
// `args` excludes the program name.
int run_command(std::vector<std::string> args);

}  // namespace qclip::cli

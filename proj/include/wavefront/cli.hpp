#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavefront {

enum ExitCode : int { exit_ok = 0, exit_parse = 1, exit_numeric = 2, exit_inconclusive = 3 };

/// Runs the command line `args` (without the program name): classify, scan, zigzag, fixture, selfcheck.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wavefront

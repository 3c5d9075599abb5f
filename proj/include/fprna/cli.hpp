#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fprna {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

/// Entry point behind the `fprna` executable. Subcommands: analytic,
/// cv-sweep, solve, mc, check. `--config PATH` reads key=value lines whose
/// keys are flag names; flags given on the command line win.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace fprna

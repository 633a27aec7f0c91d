#pragma once

namespace arq::app {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

/// Subcommands solve, transient, simulate, sweep, correlations and validate.
/// Results go to --out (or stdout); diagnostics go to stderr as JSON lines.
int cli_dispatch(int argc, char** argv);

}  // namespace arq::app

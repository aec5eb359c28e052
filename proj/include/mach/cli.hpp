#pragma once

#include <string>
#include <vector>

namespace mach {

/// Runs the command-line tool on `args` (excluding the program name) and
/// returns the process exit code: 0 on success, 2 for usage errors, 3 for
/// data errors (unreadable, malformed, or incompatible files), 4 when an
/// iterative solver fails to converge. Every failure prints a one-line
/// diagnostic to stderr. The MACH_THREADS environment variable, when set,
/// caps the dense-kernel thread count for the whole invocation.
int run_cli(const std::vector<std::string>& args);

}  // namespace mach

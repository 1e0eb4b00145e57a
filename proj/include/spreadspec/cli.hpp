#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spreadspec::cli {

/// Exit codes returned by run().
enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInvalidConfig = 2 };

/// Entry point behind the `spreadspec` executable. args excludes the
/// program name. The one-line summary goes to out; usage text and
/// diagnostics go to err.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Replaces `--config <file>` with the flags stored in the JSON object in
/// that file. Keys are long flag names without dashes ("n", "wbar", ...);
/// arrays become comma lists. An optional "command" key supplies the
/// subcommand. Flags already present on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string> &args);

}  // namespace spreadspec::cli

#pragma once

#include <iosfwd>

namespace ibt::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     // numerical failure during a run
  kValidation = 2,  // bad arguments, bad config, unknown subcommand
  kUnwritable = 3,  // output path cannot be opened
};

/// Entry point of the `ibt` tool.  Diagnostics go to `err`; results without
/// an --out path go to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibt::cli

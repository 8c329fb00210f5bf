#pragma once

namespace creditnn {

// Entry point behind main(). Subcommands: synth, ratios, run, stats, report.
// Returns the process exit status; pipeline errors print "error: ..." to
// stderr and return 1.
int cli_main(int argc, const char* const* argv);

}  // namespace creditnn

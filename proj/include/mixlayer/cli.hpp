// Command-line front end: solver, coefficient tables, flow-field export,
// phase-plane runs, and blow-up classification.
//
//   mixlayer <solve|table|flow|phase|blowup> [flags]
//
// Output files land in --out (default ./out; the MIXLAYER_OUT environment
// variable overrides the default) as CSV or JSON per --format. A simple
// key=value config file can preload the global flags via --config. Every
// command is deterministic: rerunning with the same flags produces
// byte-identical files.
#pragma once

namespace mixlayer::cli {

// Parses argv and runs the selected command. Returns the process exit code:
// 0 success, 2 domain/regime misuse (including bad flags), 3 convergence
// failure, 4 file I/O failure.
int run_cli(int argc, const char* const* argv);

}  // namespace mixlayer::cli

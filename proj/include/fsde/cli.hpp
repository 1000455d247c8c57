#pragma once

namespace fsde {

// Full command-line entry point (subcommand dispatch); returns the process
// exit code: 0 success, 1 error/usage, 2 assertion verdict failure.
int run_cli(int argc, const char* const* argv);

} // namespace fsde

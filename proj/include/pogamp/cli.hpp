#ifndef POGAMP_CLI_HPP
#define POGAMP_CLI_HPP

namespace pogamp {

// Subcommand dispatch for the batch front door. Returns the process exit
// status: 0 success, 2 configuration error, 3 runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace pogamp

#endif

#ifndef ALSSM_CLI_HPP
#define ALSSM_CLI_HPP

#include <string>
#include <vector>

namespace alssm {

// Full CLI entry point (argv without the program name). Returns the process
// exit status: 0 success, 2 configuration/usage error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace alssm

#endif  // ALSSM_CLI_HPP

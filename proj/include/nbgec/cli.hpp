#ifndef NBGEC_CLI_HPP
#define NBGEC_CLI_HPP

#include <string>
#include <vector>

namespace nbgec {

// Entry point behind the `nbgec` binary; also callable in-process for tests.
// Returns the process exit status.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // without argv[0]

}  // namespace nbgec

#endif  // NBGEC_CLI_HPP

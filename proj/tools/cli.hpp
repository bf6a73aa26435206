#ifndef LLSVM_TOOLS_CLI_HPP
#define LLSVM_TOOLS_CLI_HPP

#include <string>
#include <vector>

namespace llsvm::cli {

// Entry point shared by the binary and the end-to-end tests. args excludes
// the program name. Exit codes: 0 ok, 1 usage, 2 data/config error,
// 3 check failure.
int run(std::vector<std::string> args);

} // namespace llsvm::cli

#endif

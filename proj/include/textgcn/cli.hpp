#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace textgcn {

/// Entry point for the `textgcn` tool. Returns 0 on success, 2 for usage
/// errors (unknown subcommand or flag) and 1 for I/O or validation failures.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, with the arguments after the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textgcn

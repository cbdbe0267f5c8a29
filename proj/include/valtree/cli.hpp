#ifndef VALTREE_CLI_HPP
#define VALTREE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace valtree {

// Runs the command line (without the program name). Returns 0 on success,
// 1 on a domain error, 2 on a usage error.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace valtree

#endif

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crashsched {

// Command-line front end over explicit streams so tests can drive it
// in-process. args excludes the program name. Exit codes: 0 success or bound
// holds or TRUE, 1 violation or FALSE, 2 usage or validation or precondition
// error, 3 search budget exceeded.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace crashsched

#pragma once

// Command-line front end: sample, eppf, cs, findim, verify, suite.

#include <iosfwd>
#include <string>
#include <vector>

namespace coagfrag {

/// args excludes the program name. Returns 0 on success or pass, 1 on a
/// failed verification or evaluation error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace coagfrag

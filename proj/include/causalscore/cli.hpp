#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace causalscore::cli {

// Runs the command-line interface. Data goes to `out`, diagnostics and the
// machine-readable error object to `err`. Returns 0 on success, 1 on a
// runtime error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace causalscore::cli

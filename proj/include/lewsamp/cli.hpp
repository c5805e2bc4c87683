#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lewsamp::cli {

// Runs the command-line tool. Exit codes: 0 success, 1 usage error, 2 data
// or input-contract error, 3 numerical failure. All primary outputs are
// byte-identical across reruns with identical inputs and seeds.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

// Test-friendly overload; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lewsamp::cli

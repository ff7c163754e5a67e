#pragma once

// Command-line front end. Exit codes: 0 success, 1 certification failure, 2 usage or config error.

#include <iosfwd>
#include <string>
#include <vector>

namespace solenoid::cli {

constexpr int kExitOk = 0;
constexpr int kExitCertificationFailed = 1;
constexpr int kExitUsage = 2;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace solenoid::cli

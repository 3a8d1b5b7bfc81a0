#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forceknn::cli {

enum ExitCode : int {
    kSuccess = 0,
    kBadArguments = 2,
    kDataError = 3,
    kInfeasibleConfig = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forceknn::cli

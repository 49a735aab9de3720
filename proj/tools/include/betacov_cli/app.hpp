#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace betacov::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitUsage = 2,
    kExitAssertion = 3,
    kExitDegenerate = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace betacov::cli

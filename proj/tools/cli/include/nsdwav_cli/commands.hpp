#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nsdwav::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

// Entry point shared by the executable and the tests. `args` excludes the
// program name. Never throws; errors are reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nsdwav::cli

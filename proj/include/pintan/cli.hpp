#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pintan {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitScenarioInvalid = 2, kExitInternal = 3 };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pintan

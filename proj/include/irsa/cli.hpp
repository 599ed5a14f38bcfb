#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace irsa {

/// Entry point of the `irsa` tool. `args` excludes the program name. CSV goes
/// to --out when given, else to `out`; diagnostics and timing go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irsa

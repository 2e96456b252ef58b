#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace modelopt {

/// Exit codes: 0 all bound assertions pass, 1 a bound assertion failed,
/// 2 usage error, 3 solver or evaluation error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace modelopt

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pss {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitFailed = 2, kExitNoImmersion = 3 };

// args excludes the program name. Reports without --report go to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace pss

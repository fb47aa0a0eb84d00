#pragma once

#include <iosfwd>

namespace ats::cli {

// Parses and executes one command line. Exit codes: 0 pass, 1 validation
// fail, 2 usage/config error, 3 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ats::cli

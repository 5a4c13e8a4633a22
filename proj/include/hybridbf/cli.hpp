#pragma once

#include <iosfwd>

namespace hbf {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or invalid configuration.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hbf

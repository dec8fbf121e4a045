#pragma once

#include <iosfwd>

namespace mirate {

/// Entry point of the `mirate` tool. Exit codes: 0 success, 1 runtime failure,
/// 2 usage or configuration error.
int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mirate

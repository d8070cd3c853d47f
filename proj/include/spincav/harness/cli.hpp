#pragma once

#include <iosfwd>

namespace spincav::harness {

// Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure.
int cli_main(int argc, const char* const* argv);
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spincav::harness

#pragma once

#include <iosfwd>

namespace convshield::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage error (bad flags,
/// unknown preset, malformed architecture JSON, out-of-range numbers).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace convshield::cli

#pragma once

#include <iosfwd>

namespace hsm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // experiment assertion failed or note rejected
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Parses argv and dispatches; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsm::cli

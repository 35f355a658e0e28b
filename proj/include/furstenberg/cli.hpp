#pragma once

#include <ostream>

namespace furstenberg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUser = 1;
inline constexpr int kExitResource = 2;
inline constexpr int kExitUnsound = 3;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace furstenberg::cli

#pragma once

// Exit codes of the lqshrink command line tool.
namespace lqshrink::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitIo = 4;

int run(int argc, const char* const* argv);

}  // namespace lqshrink::cli

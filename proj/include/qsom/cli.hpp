#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

/// Runs `qsom <command> ...`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace qsom::cli

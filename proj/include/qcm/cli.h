#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qcm::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kReducible = 2;     // also: bound violated
inline constexpr int kInconclusive = 3;  // also: no finite bound
inline constexpr int kPrecondition = 4;
inline constexpr int kUsage = 64;
inline constexpr int kResourceCap = 65;

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcm::cli

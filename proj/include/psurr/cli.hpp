#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psurr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point shared by the executable, the tests and the Python module.
/// `args` excludes the program name, e.g. {"train", "--config", "c.json"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Output root used when --out is not given: $PSURR_OUT_DIR or "psurr_out".
std::string default_out_root();

}  // namespace psurr::cli

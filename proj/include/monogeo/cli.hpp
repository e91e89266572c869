#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace monogeo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming a KITTI `training/` directory; supplies the
// default --labels (label_2/) and --calib (calib/) paths.
inline constexpr const char* kKittiRootEnv = "MONOGEO_KITTI_ROOT";

/// Entry point of the `monogeo` tool. `argv[0]` is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monogeo::cli

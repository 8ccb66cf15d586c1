#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include <mmr/core.hpp>

namespace mmr::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,          ///< bad flags or flag values
  kIo = 2,             ///< file cannot be opened or written
  kParse = 3,          ///< malformed or unsupported file content
  kDegenerate = 4,     ///< target geometry cannot support the kernel basis
  kNumerical = 5,      ///< optimizer hit a non-finite loss or gradient
  kNotConverged = 6,   ///< register finished without meeting a stopping tolerance
  kInvalidInput = 7,   ///< any other rejected argument
};

/// "yaw,pitch,roll,tx,ty,tz" with angles in degrees and translation in meters.
/// Throws mmr::InvalidInput on anything else.
Pose parse_pose6(std::string_view text);

/// Comma-separated list of finite numbers, at least one entry.
std::vector<double> parse_number_list(std::string_view text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmr::cli

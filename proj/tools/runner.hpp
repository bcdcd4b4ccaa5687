#pragma once

#include <ostream>
#include <string>

#include "config.hpp"

namespace steklov::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

struct RunOptions {
  std::string out_dir = ".";
  int jobs = 1;
};

/// Executes the configured command, writes <out_dir>/<prefix>.{csv,json}
/// and returns the exit status. Run failures are reported on `log` and
/// mapped to kExitError; configuration problems are thrown by the parser.
int run(RunConfig cfg, const RunOptions& opt, std::ostream& log);

}  // namespace steklov::cli

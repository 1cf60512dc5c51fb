#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fgvi/cli/run_config.hpp"
#include "fgvi/gaussian_core.hpp"

namespace fgvi::cli {

inline constexpr const char* kToolName = "fgvi";
inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailedCheck = 1;  // a validity flag is false, or an unexpected error
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitDivergence = 4;

/// The Gaussian target named by the config. The mixture family yields its
/// moment-matched Gaussian.
GaussianTarget build_target(const RunConfig& config);

/// Each writes its tables to `out` and returns an exit code; library errors
/// propagate as exceptions.
int run_analyze(const RunConfig& config, std::ostream& out);
int run_sweep(const RunConfig& config, std::ostream& out);
int run_bounds(const RunConfig& config, std::ostream& out);
int run_mixture(const RunConfig& config, std::ostream& out);

int run(const RunConfig& config, std::ostream& out);

/// Full command-line entry point. Output goes to `out` unless --out names a
/// file; diagnostics go to `err`. Nothing is written to the destination when a
/// run fails with an error.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgvi::cli

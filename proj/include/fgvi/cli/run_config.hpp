#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgvi/linalg.hpp"
#include "fgvi/vi_engine.hpp"

namespace fgvi::cli {

enum class Subcommand { analyze, sweep, bounds, mixture };
enum class Family { none, kernel, constant_offdiag, matrix_file, mixture };
enum class OutputFormat { csv, json_lines };

const char* to_string(Subcommand s);
const char* to_string(Family f);
const char* to_string(OutputFormat f);

struct RunConfig {
  Subcommand subcommand = Subcommand::analyze;
  /// Target family. `none` is only valid for `bounds`, which then emits the
  /// envelope table alone.
  Family family = Family::constant_offdiag;

  Index n = 10;
  double eps = 0.5;
  double rho = 1.0;
  double domain_upper = 200.0;
  double jitter = 1e-8;
  std::string matrix_file;

  double separation = 10.0;
  double sigma = 1.0;
  std::vector<double> weights{0.5, 0.5};

  std::vector<double> R_grid;
  std::vector<double> eps_grid;
  std::vector<double> rho_grid;

  std::uint64_t seed = 0;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::csv;

  OptimizerConfig optimizer;

  /// Throws DomainError on an inconsistent or out-of-range config.
  void validate() const;
};

/// Effective config as echoed into output metadata. The output path is left
/// out so that the same run written to two places produces the same bytes.
nlohmann::json to_json(const RunConfig& config);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Default grids used when a sweep axis is not given.
std::vector<double> default_eps_grid();
std::vector<double> default_rho_grid();
std::vector<double> default_R_grid();

/// n points from lo to hi, evenly spaced in log.
std::vector<double> log_grid(double lo, double hi, int count);

struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = 0;  // meaningful when `config` is empty
};

/// Parses `args` (args[0] is the program name). Flags override config-file
/// values, which override defaults. Help requests and parse errors are
/// reported on `out`/`err` and returned as an exit code.
ParseResult parse_command_line(const std::vector<std::string>& args, std::ostream& out,
                               std::ostream& err);

}  // namespace fgvi::cli

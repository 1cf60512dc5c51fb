#include "fgvi/cli/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "fgvi/errors.hpp"

namespace fgvi::cli {

const char* to_string(Subcommand s) {
  switch (s) {
    case Subcommand::analyze: return "analyze";
    case Subcommand::sweep: return "sweep";
    case Subcommand::bounds: return "bounds";
    case Subcommand::mixture: return "mixture";
  }
  return "?";
}

const char* to_string(Family f) {
  switch (f) {
    case Family::none: return "none";
    case Family::kernel: return "kernel";
    case Family::constant_offdiag: return "constant-offdiag";
    case Family::matrix_file: return "matrix-file";
    case Family::mixture: return "mixture";
  }
  return "?";
}

const char* to_string(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json-lines";
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

void check_grid(const std::vector<double>& grid, const char* name, double lo, bool lo_inclusive,
                double hi, bool hi_inclusive) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    require(std::isfinite(v), std::string(name) + " values must be finite");
    require(lo_inclusive ? v >= lo : v > lo, std::string(name) + " value out of range");
    require(hi_inclusive ? v <= hi : v < hi, std::string(name) + " value out of range");
    require(i == 0 || v > grid[i - 1], std::string(name) + " must be strictly ascending");
  }
}

}  // namespace

void RunConfig::validate() const {
  const double inf = std::numeric_limits<double>::infinity();
  require(n >= 1, "--n must be at least 1");
  if (subcommand == Subcommand::bounds) require(n >= 2, "bounds need --n >= 2");
  require(subcommand == Subcommand::bounds || family != Family::none,
          "a target family is required for " + std::string(to_string(subcommand)));
  if (subcommand == Subcommand::mixture) {
    require(family == Family::mixture, "the mixture subcommand only accepts the mixture family");
  }
  if (subcommand == Subcommand::sweep) {
    require(family == Family::kernel || family == Family::constant_offdiag,
            "sweeps run over the kernel (rho) or constant-offdiag (eps) family");
  }
  require(eps >= 0.0 && eps < 1.0, "--eps must lie in [0, 1)");
  require(rho > 0.0 && std::isfinite(rho), "--rho must be positive");
  require(domain_upper > 0.0 && std::isfinite(domain_upper), "--domain-upper must be positive");
  require(jitter >= 0.0 && std::isfinite(jitter), "--jitter must be non-negative");
  require(family != Family::matrix_file || !matrix_file.empty(),
          "the matrix-file family needs --matrix-file");
  require(sigma > 0.0 && std::isfinite(sigma), "--sigma must be positive");
  require(std::isfinite(separation), "--separation must be finite");
  require(!weights.empty(), "--weights must name at least one component");
  check_grid(R_grid, "--R-grid", 1.0, true, inf, false);
  check_grid(eps_grid, "--eps-grid", 0.0, true, 1.0, false);
  check_grid(rho_grid, "--rho-grid", 0.0, false, inf, false);
  optimizer.validate();
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["subcommand"] = to_string(c.subcommand);
  j["family"] = to_string(c.family);
  j["n"] = c.n;
  j["seed"] = c.seed;
  j["format"] = to_string(c.format);
  switch (c.family) {
    case Family::kernel:
      j["rho"] = c.rho;
      j["domain_upper"] = c.domain_upper;
      j["jitter"] = c.jitter;
      break;
    case Family::constant_offdiag:
      j["eps"] = c.eps;
      break;
    case Family::matrix_file:
      j["matrix_file"] = c.matrix_file;
      break;
    case Family::mixture:
      j["separation"] = c.separation;
      j["sigma"] = c.sigma;
      j["weights"] = c.weights;
      break;
    case Family::none:
      break;
  }
  if (c.subcommand == Subcommand::sweep) {
    if (c.family == Family::kernel) j["rho_grid"] = c.rho_grid;
    if (c.family == Family::constant_offdiag) j["eps_grid"] = c.eps_grid;
  }
  if (c.subcommand == Subcommand::bounds) {
    j["R_grid"] = c.R_grid;
    if (!c.eps_grid.empty()) j["eps_grid"] = c.eps_grid;
    if (!c.rho_grid.empty()) j["rho_grid"] = c.rho_grid;
  }
  if (c.subcommand == Subcommand::mixture) {
    const OptimizerConfig& o = c.optimizer;
    j["optimizer"] = {{"step_size", o.step_size},       {"beta1", o.beta1},
                      {"beta2", o.beta2},               {"epsilon", o.epsilon},
                      {"mc_samples", o.mc_samples},     {"max_steps", o.max_steps},
                      {"tolerance", o.tolerance},       {"window", o.window},
                      {"min_steps", o.min_steps},       {"warmup_steps", o.warmup_steps},
                      {"init_scale", o.init_scale},     {"init_log_std", o.init_log_std},
                      {"average_final_window", o.average_final_window},
                      {"average_steps", o.average_steps}};
  }
  return j;
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid;
  if (count < 1) return grid;
  if (count == 1) return {lo};
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    grid.push_back(i == count - 1 ? hi : std::exp(a + (b - a) * i / (count - 1)));
  }
  grid.front() = lo;
  return grid;
}

std::vector<double> default_eps_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<double> default_rho_grid() { return log_grid(1.0, 200.0, 20); }

std::vector<double> default_R_grid() { return log_grid(1.0, 100.0, 25); }

ParseResult parse_command_line(const std::vector<std::string>& args, std::ostream& out,
                               std::ostream& err) {
  RunConfig cfg;
  std::string family_name;
  std::string format_name = "csv";

  CLI::App app{"Shrinkage, delinkage and bounds for factorized Gaussian VI", "fgvi"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");

  const std::map<std::string, Family> families{{"kernel", Family::kernel},
                                               {"constant-offdiag", Family::constant_offdiag},
                                               {"matrix-file", Family::matrix_file},
                                               {"mixture", Family::mixture}};
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv},
                                                    {"json-lines", OutputFormat::json_lines}};

  app.add_option("--family", family_name, "Target family")
      ->check(CLI::IsMember({"kernel", "constant-offdiag", "matrix-file", "mixture"}));
  app.add_option("--n", cfg.n, "Dimension");
  app.add_option("--eps", cfg.eps, "Constant off-diagonal correlation");
  app.add_option("--rho", cfg.rho, "Squared-exponential length-scale");
  app.add_option("--domain-upper", cfg.domain_upper, "Kernel inputs are drawn from U(0, this)");
  app.add_option("--jitter", cfg.jitter, "Diagonal jitter added to the kernel matrix");
  app.add_option("--matrix-file", cfg.matrix_file, "Covariance matrix file");
  app.add_option("--R-grid", cfg.R_grid, "Condition-number grid")->delimiter(',');
  app.add_option("--eps-grid", cfg.eps_grid, "Correlation grid")->delimiter(',');
  app.add_option("--rho-grid", cfg.rho_grid, "Length-scale grid")->delimiter(',');
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--separation", cfg.separation, "Distance between mixture components");
  app.add_option("--sigma", cfg.sigma, "Mixture component standard deviation");
  app.add_option("--weights", cfg.weights, "Mixture weights")->delimiter(',');
  app.add_option("--out", cfg.output_path, "Output file (default: standard output)");
  app.add_option("--format", format_name, "Output format")
      ->check(CLI::IsMember({"csv", "json-lines"}));

  OptimizerConfig& opt = cfg.optimizer;
  app.add_option("--step-size", opt.step_size, "Adam step size");
  app.add_option("--mc-samples", opt.mc_samples, "Monte Carlo samples per gradient");
  app.add_option("--max-steps", opt.max_steps, "Maximum optimizer steps");
  app.add_option("--tolerance", opt.tolerance, "Relative ELBO change that ends the fit");
  app.add_option("--window", opt.window, "ELBO averaging window");
  app.add_option("--min-steps", opt.min_steps, "Steps before the convergence check");
  app.add_option("--init-scale", opt.init_scale, "Spread of the initial mean");
  app.add_option("--init-log-std", opt.init_log_std, "Initial log standard deviation");
  app.add_option("--average-steps", opt.average_steps, "Trailing steps averaged into the result");

  CLI::App* analyze = app.add_subcommand("analyze", "Decompose the gap for one target");
  CLI::App* sweep = app.add_subcommand("sweep", "Decomposition over an eps or rho grid");
  CLI::App* bounds = app.add_subcommand("bounds", "Bound envelopes over a condition-number grid");
  CLI::App* mixture = app.add_subcommand("mixture", "Fit FG-VI to a Gaussian mixture");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return {std::nullopt, code == 0 ? 0 : 2};
  }

  if (analyze->parsed()) cfg.subcommand = Subcommand::analyze;
  if (sweep->parsed()) cfg.subcommand = Subcommand::sweep;
  if (bounds->parsed()) cfg.subcommand = Subcommand::bounds;
  if (mixture->parsed()) cfg.subcommand = Subcommand::mixture;

  cfg.format = formats.at(format_name);
  if (cfg.subcommand == Subcommand::mixture && app.count("--n") == 0) cfg.n = 2;

  if (!family_name.empty()) {
    cfg.family = families.at(family_name);
  } else if (!cfg.matrix_file.empty()) {
    cfg.family = Family::matrix_file;
  } else if (cfg.subcommand == Subcommand::mixture) {
    cfg.family = Family::mixture;
  } else if (app.count("--rho") > 0 || app.count("--rho-grid") > 0) {
    cfg.family = Family::kernel;
  } else if (cfg.subcommand == Subcommand::bounds && app.count("--eps") == 0 &&
             app.count("--eps-grid") == 0) {
    cfg.family = Family::none;
  } else {
    cfg.family = Family::constant_offdiag;
  }

  if (cfg.subcommand == Subcommand::sweep) {
    if (cfg.family == Family::constant_offdiag && cfg.eps_grid.empty()) {
      cfg.eps_grid = default_eps_grid();
    }
    if (cfg.family == Family::kernel && cfg.rho_grid.empty()) cfg.rho_grid = default_rho_grid();
  }
  if (cfg.subcommand == Subcommand::bounds && cfg.R_grid.empty()) cfg.R_grid = default_R_grid();

  return {std::move(cfg), 0};
}

}  // namespace fgvi::cli

#include "fgvi/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "fgvi/bounds.hpp"
#include "fgvi/cli/matrix_io.hpp"
#include "fgvi/cli/table_writer.hpp"
#include "fgvi/errors.hpp"
#include "fgvi/generators.hpp"
#include "fgvi/random.hpp"
#include "fgvi/vi_engine.hpp"

namespace fgvi::cli {

namespace {

/// Evaluates fn(0..count-1) on a small thread pool. Results keep grid order;
/// the lowest-index failure is rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t count, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min(hw, count);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

nlohmann::json metadata_record(const RunConfig& config) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"rng", Rng::kName},
          {"seed", config.seed},
          {"config_hash", config_hash(config)},
          {"config", to_json(config)}};
}

GaussianTarget kernel_target(const RunConfig& config, double rho) {
  KernelConfig k;
  k.n = config.n;
  k.rho = rho;
  k.domain_upper = config.domain_upper;
  k.seed = config.seed;
  k.jitter = config.jitter;
  return squared_exponential_target(k);
}

GaussianTarget constant_target(const RunConfig& config, double eps) {
  return constant_offdiag_target({config.n, eps});
}

MixtureTarget mixture_target(const RunConfig& config) {
  return axis_aligned_mixture(config.n, config.weights, config.separation, config.sigma);
}

std::vector<Cell> decomposition_cells(const DecompositionReport& r) {
  return {static_cast<std::int64_t>(r.n), r.log_det_S,    r.log_det_C,   r.half_log_det_S(),
          r.half_log_det_C_inv(),         r.entropy_p,    r.entropy_q,   r.entropy_gap,
          r.kl_q_p,                       r.per_component_gap, r.condition_number};
}

const std::vector<std::string> kDecompositionColumns{
    "n",         "log_det_S",    "log_det_C",      "half_log_det_S",
    "half_log_det_C_inv", "entropy_p", "entropy_q", "entropy_gap",
    "kl_q_p",    "per_component_gap", "condition_number"};

/// 1-σ ellipse of a 2×2 covariance: semi-axes and the major-axis angle.
struct Ellipse {
  double semi_major;
  double semi_minor;
  double angle;
};

Ellipse ellipse(double a, double b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {std::sqrt(mid + rad), std::sqrt(std::max(0.0, mid - rad)), 0.5 * std::atan2(2.0 * b, a - c)};
}

void write_projection_row(TableWriter& w, const char* label, double a, double b, double c) {
  const Ellipse e = ellipse(a, b, c);
  w.row({std::string(label), a, b, c, e.semi_major, e.semi_minor, e.angle});
}

/// The grid points of a target family for the measured-bounds table.
struct MeasuredTarget {
  std::string axis;
  double value;
};

std::vector<MeasuredTarget> measured_targets(const RunConfig& config) {
  std::vector<MeasuredTarget> out;
  switch (config.family) {
    case Family::constant_offdiag:
      if (config.eps_grid.empty()) out.push_back({"eps", config.eps});
      for (double e : config.eps_grid) out.push_back({"eps", e});
      break;
    case Family::kernel:
      if (config.rho_grid.empty()) out.push_back({"rho", config.rho});
      for (double r : config.rho_grid) out.push_back({"rho", r});
      break;
    case Family::matrix_file:
      out.push_back({"matrix", 0.0});
      break;
    case Family::mixture:
      out.push_back({"separation", config.separation});
      break;
    case Family::none:
      break;
  }
  return out;
}

GaussianTarget measured_target(const RunConfig& config, const MeasuredTarget& t) {
  if (t.axis == "eps") return constant_target(config, t.value);
  if (t.axis == "rho") return kernel_target(config, t.value);
  return build_target(config);
}

}  // namespace

GaussianTarget build_target(const RunConfig& config) {
  switch (config.family) {
    case Family::kernel: return kernel_target(config, config.rho);
    case Family::constant_offdiag: return constant_target(config, config.eps);
    case Family::matrix_file: return GaussianTarget(read_matrix_file(config.matrix_file));
    case Family::mixture: return mixture_moments(mixture_target(config));
    case Family::none: break;
  }
  throw DomainError("no target family selected");
}

int run_analyze(const RunConfig& config, std::ostream& out) {
  const GaussianTarget target = build_target(config);
  const FactorizedGaussian q = fgvi_solve(target);
  const DecompositionReport report = decompose(target, q);
  const ShrinkageMatrix s = shrinkage_matrix(target, q);

  TableWriter w(out, config.format);
  w.metadata(metadata_record(config));
  w.begin_table("decomposition", kDecompositionColumns);
  w.row(decomposition_cells(report));

  w.begin_table("coordinates", {"index", "sigma_ii", "psi_ii", "s_ii"});
  const Matrix& sigma = target.covariance();
  for (Index i = 0; i < target.dim(); ++i) {
    w.row({static_cast<std::int64_t>(i), sigma(i, i), q.variances()(i), s.diagonal(i)});
  }

  if (target.dim() >= 2) {
    w.begin_table("projection",
                  {"distribution", "var_1", "cov_12", "var_2", "semi_major", "semi_minor", "angle"});
    write_projection_row(w, "p", sigma(0, 0), sigma(0, 1), sigma(1, 1));
    write_projection_row(w, "q", q.variances()(0), 0.0, q.variances()(1));
  }
  return kExitOk;
}

int run_sweep(const RunConfig& config, std::ostream& out) {
  const bool kernel = config.family == Family::kernel;
  const std::vector<double>& grid = kernel ? config.rho_grid : config.eps_grid;
  const auto reports = parallel_map(grid.size(), [&](std::size_t i) {
    const GaussianTarget t = kernel ? kernel_target(config, grid[i]) : constant_target(config, grid[i]);
    return decompose(t);
  });

  TableWriter w(out, config.format);
  w.metadata(metadata_record(config));
  w.begin_table("sweep", {kernel ? "rho" : "eps", "half_log_det_S", "half_log_det_C_inv",
                          "entropy_gap", "kl_q_p", "condition_number"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const DecompositionReport& r = reports[i];
    w.row({grid[i], r.half_log_det_S(), r.half_log_det_C_inv(), r.entropy_gap, r.kl_q_p,
           r.condition_number});
  }
  return kExitOk;
}

int run_bounds(const RunConfig& config, std::ostream& out) {
  const auto targets = measured_targets(config);
  std::optional<GaussianTarget> file_target;
  Index n = config.n;
  if (config.family == Family::matrix_file) {
    file_target.emplace(build_target(config));
    n = file_target->dim();
  }

  const auto envelope = envelope_sweep(n, config.R_grid);

  struct Measured {
    DecompositionReport report;
    double trace_S;
    BoundsReport bounds;
  };
  const auto measured = parallel_map(targets.size(), [&](std::size_t i) {
    const GaussianTarget t = file_target ? *file_target : measured_target(config, targets[i]);
    const FactorizedGaussian q = fgvi_solve(t);
    DecompositionReport report = decompose(t, q);
    const double trace = shrinkage_matrix(t, q).trace();
    BoundsReport b = compute_bounds(t.dim(), std::max(1.0, report.condition_number));
    return Measured{report, trace, std::move(b)};
  });

  TableWriter w(out, config.format);
  w.metadata(metadata_record(config));
  w.begin_table("envelope", {"R", "upper_log_det_S", "upper_log_det_C", "lower_trace_S",
                             "upper_trace_S", "joint_kl_upper", "separate_kl_upper"});
  for (const BoundsReport& b : envelope) {
    w.row({b.condition_ratio, b.upper_log_det_S, b.upper_log_det_C, b.lower_trace_S,
           b.upper_trace_S, b.joint_kl_upper, b.separate_kl_upper});
  }

  bool all_valid = true;
  if (!targets.empty()) {
    w.begin_table("measured",
                  {"axis", "value", "R", "log_det_S", "upper_log_det_S", "log_det_C",
                   "upper_log_det_C", "trace_S", "lower_trace_S", "upper_trace_S", "kl_q_p",
                   "joint_kl_upper", "valid"});
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const Measured& m = measured[i];
      const DecompositionReport& r = m.report;
      const BoundsReport& b = m.bounds;
      auto below = [](double measured_value, double bound) {
        return measured_value <= bound + 1e-6 * std::max(1.0, std::abs(bound));
      };
      const bool valid = below(r.log_det_S, b.upper_log_det_S) &&
                         below(r.log_det_C, b.upper_log_det_C) &&
                         below(m.trace_S, b.upper_trace_S) && below(b.lower_trace_S, m.trace_S) &&
                         below(r.kl_q_p, b.joint_kl_upper);
      all_valid = all_valid && valid;
      w.row({targets[i].axis, targets[i].value, r.condition_number, r.log_det_S,
             b.upper_log_det_S, r.log_det_C, b.upper_log_det_C, m.trace_S, b.lower_trace_S,
             b.upper_trace_S, r.kl_q_p, b.joint_kl_upper, valid});
    }
  }
  return all_valid ? kExitOk : kExitFailedCheck;
}

int run_mixture(const RunConfig& config, std::ostream& out) {
  const MixtureTarget mixture = mixture_target(config);
  OptimizerConfig opt = config.optimizer;
  opt.seed = config.seed;
  const VariationalState state = fit_fgvi(make_log_density(mixture), mixture.dim(), opt);
  const ShrinkageComparison cmp = shrinkage_comparison(mixture, state);
  const GaussianTarget moments = mixture_moments(mixture);
  const double gap_bound = max_entropy_gap_bound(moments, state);

  TableWriter w(out, config.format);
  w.metadata(metadata_record(config));
  w.begin_table("summary", {"n", "components", "separation", "sigma", "steps", "converged",
                            "trace_S", "trace_S_G", "mean_log_S", "entropy_gap_bound"});
  w.row({static_cast<std::int64_t>(mixture.dim()), static_cast<std::int64_t>(mixture.components()),
         config.separation, config.sigma, static_cast<std::int64_t>(state.step_count),
         state.converged, cmp.trace_S, cmp.trace_S_G, cmp.mean_log_S, gap_bound});

  w.begin_table("coordinates", {"index", "fitted_mean", "fitted_variance", "target_variance",
                                "s_ii", "s_g_ii"});
  const Vector fitted = state.variances();
  for (Index i = 0; i < mixture.dim(); ++i) {
    w.row({static_cast<std::int64_t>(i), state.mean(i), fitted(i), moments.covariance()(i, i),
           cmp.S.diagonal(i), cmp.S_G.diagonal(i)});
  }

  w.begin_table("elbo", {"step", "elbo"});
  for (const ElboPoint& p : state.elbo_trace) w.row({static_cast<std::int64_t>(p.step), p.elbo});
  return kExitOk;
}

int run(const RunConfig& config, std::ostream& out) {
  config.validate();
  switch (config.subcommand) {
    case Subcommand::analyze: return run_analyze(config, out);
    case Subcommand::sweep: return run_sweep(config, out);
    case Subcommand::bounds: return run_bounds(config, out);
    case Subcommand::mixture: return run_mixture(config, out);
  }
  return kExitFailedCheck;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_command_line(args, out, err);
  if (!parsed.config) return parsed.exit_code;
  const RunConfig& config = *parsed.config;

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    code = run(config, buffer);
  } catch (const DivergenceError& e) {
    err << kToolName << ": optimizer diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DomainError& e) {
    err << kToolName << ": invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const Error& e) {
    err << kToolName << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << kToolName << ": unexpected error: " << e.what() << '\n';
    return kExitFailedCheck;
  }

  if (config.output_path.empty()) {
    out << buffer.str();
    out.flush();
  } else {
    std::ofstream file(config.output_path, std::ios::binary);
    if (!file || !(file << buffer.str()) || !file.flush()) {
      err << kToolName << ": invalid input: cannot write " << config.output_path << '\n';
      return kExitInvalidInput;
    }
  }
  if (code == kExitFailedCheck) err << kToolName << ": a validity check failed\n";
  return code;
}

}  // namespace fgvi::cli

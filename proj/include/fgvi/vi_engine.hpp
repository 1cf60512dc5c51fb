#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fgvi/errors.hpp"
#include "fgvi/gaussian_core.hpp"
#include "fgvi/random.hpp"

namespace fgvi {

/// Equal-variance spherical Gaussian mixture Σ_k w_k N(μ_k, σ² I).
class MixtureTarget {
 public:
  /// `means` holds one component mean per column. Throws DomainError unless
  /// the weights are positive and sum to 1 within 1e-12, and σ² > 0.
  MixtureTarget(Vector weights, Matrix means, double component_variance);

  Index dim() const { return means_.rows(); }
  Index components() const { return means_.cols(); }
  const Vector& weights() const { return weights_; }
  const Matrix& means() const { return means_; }
  double component_variance() const { return component_variance_; }

 private:
  Vector weights_;
  Matrix means_;
  double component_variance_;
};

/// Components spaced `separation` apart along the first axis and centred on
/// the origin: μ_k = (k − (m−1)/2) · separation · e₁. Standard deviation `sigma`.
MixtureTarget axis_aligned_mixture(Index n, std::span<const double> weights, double separation,
                                   double sigma);

/// log p(z) by log-sum-exp over components.
double mixture_log_density(const MixtureTarget& target, const Vector& z);

/// Same, also writing ∇ log p(z) into `gradient`.
double mixture_log_density(const MixtureTarget& target, const Vector& z, Vector& gradient);

/// Mean Σ w_k μ_k and covariance σ² I + Σ w_k (μ_k − μ̄)(μ_k − μ̄)ᵀ.
GaussianTarget mixture_moments(const MixtureTarget& target);

double gaussian_log_density(const GaussianTarget& target, const Vector& z, Vector* gradient);

/// Log density with optional gradient output. Must be callable concurrently
/// from independent fits.
using LogDensity = std::function<double(const Vector& z, Vector* gradient)>;

LogDensity make_log_density(MixtureTarget target);
LogDensity make_log_density(GaussianTarget target);

/// Wraps a value-only log density with a central-difference gradient.
LogDensity with_numeric_gradient(std::function<double(const Vector&)> log_density,
                                 double step = 1e-5);

struct OptimizerConfig {
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int mc_samples = 10;
  int max_steps = 20000;
  /// Relative change between consecutive window-average ELBOs that ends the run.
  double tolerance = 1e-4;
  int window = 200;
  /// No convergence check before this many steps.
  int min_steps = 2000;
  /// Non-finite estimates are skipped, not fatal, during the first steps.
  int warmup_steps = 50;
  /// Standard deviation of the initial mean perturbation around the origin.
  double init_scale = 0.1;
  /// Initial log standard deviation of every coordinate, log 0.1. Starting
  /// narrow lets the mean leave a symmetric saddle before q widens.
  double init_log_std = -2.302585092994046;
  /// Report the average iterate over the trailing `average_steps` steps (never
  /// more than the second half of the run) instead of the last iterate.
  bool average_final_window = true;
  int average_steps = 5000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ElboPoint {
  int step;
  double elbo;
};

struct VariationalState {
  Vector mean;
  Vector log_std;
  int step_count = 0;
  std::vector<ElboPoint> elbo_trace;
  bool converged = false;
  std::uint64_t seed = 0;

  Vector variances() const { return (2.0 * log_std.array()).exp().matrix(); }
  FactorizedGaussian as_factorized() const { return FactorizedGaussian(mean, variances()); }
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int step, VariationalState state)
      : Error(what), step_(step), state_(std::move(state)) {}

  int step() const noexcept { return step_; }
  const VariationalState& state() const noexcept { return state_; }

 private:
  int step_;
  VariationalState state_;
};

/// Monte Carlo ELBO and its reparameterization gradient at one state.
/// The entropy of q enters analytically.
struct ElboEstimate {
  double elbo;
  Vector grad_mean;
  Vector grad_log_std;
};

ElboEstimate estimate_elbo(const LogDensity& log_density, const Vector& mean,
                           const Vector& log_std, int samples, Rng& rng);

/// Stochastic gradient ascent on the ELBO over factorized Gaussians.
///
/// Initialization: mean ~ N(0, init_scale² I), log_std = init_log_std. Runs until the
/// window-average ELBO changes by less than `tolerance` (relative) after
/// `min_steps`, or until `max_steps`. Throws DivergenceError on a non-finite
/// estimate after warm-up, and DomainError if the density is not finite at
/// the initial mean.
VariationalState fit_fgvi(const LogDensity& log_density, Index n, const OptimizerConfig& config);

struct ShrinkageComparison {
  ShrinkageMatrix S;    // true covariance over fitted variances
  ShrinkageMatrix S_G;  // same covariance, forward-KL Gaussian solution
  double trace_S = 0.0;
  double trace_S_G = 0.0;
  /// (1/n) Σ log S_ii
  double mean_log_S = 0.0;
};

ShrinkageComparison shrinkage_comparison(const MixtureTarget& target,
                                         const VariationalState& fitted);

/// ½(log|Σ| − log|Ψ|): upper bound on H(p) − H(q) for any p with covariance Σ.
double max_entropy_gap_bound(const GaussianTarget& target_cov, const VariationalState& fitted);

}  // namespace fgvi

#include "fgvi/vi_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

namespace fgvi {

MixtureTarget::MixtureTarget(Vector weights, Matrix means, double component_variance)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      component_variance_(component_variance) {
  if (means_.rows() < 1 || means_.cols() < 1) {
    throw DomainError("mixture needs at least one component in at least one dimension");
  }
  if (weights_.size() != means_.cols()) {
    throw DomainError("mixture has " + std::to_string(weights_.size()) + " weights but " +
                      std::to_string(means_.cols()) + " component means");
  }
  for (Index k = 0; k < weights_.size(); ++k) {
    if (!(weights_(k) > 0.0)) throw DomainError("mixture weights must be positive");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw DomainError("mixture weights must sum to 1, got " + std::to_string(weights_.sum()));
  }
  if (!(component_variance_ > 0.0) || !std::isfinite(component_variance_)) {
    throw DomainError("mixture component variance must be positive");
  }
  if (!means_.allFinite()) throw DomainError("mixture means must be finite");
}

MixtureTarget axis_aligned_mixture(Index n, std::span<const double> weights, double separation,
                                   double sigma) {
  if (n < 1) throw DomainError("mixture needs n >= 1");
  if (!(sigma > 0.0)) throw DomainError("mixture sigma must be positive");
  if (!std::isfinite(separation)) throw DomainError("mixture separation must be finite");
  const auto m = static_cast<Index>(weights.size());
  Vector w(m);
  Matrix means = Matrix::Zero(n, m);
  for (Index k = 0; k < m; ++k) {
    w(k) = weights[static_cast<std::size_t>(k)];
    means(0, k) = (static_cast<double>(k) - 0.5 * static_cast<double>(m - 1)) * separation;
  }
  return MixtureTarget(std::move(w), std::move(means), sigma * sigma);
}

namespace {

double mixture_log_density_impl(const MixtureTarget& target, const Vector& z, Vector* gradient) {
  if (z.size() != target.dim()) throw DomainError("mixture density evaluated at wrong dimension");
  const Index m = target.components();
  const double var = target.component_variance();
  Vector terms(m);
  for (Index k = 0; k < m; ++k) {
    terms(k) = std::log(target.weights()(k)) - (z - target.means().col(k)).squaredNorm() / (2.0 * var);
  }
  const double top = terms.maxCoeff();
  const double lse = top + std::log((terms.array() - top).exp().sum());
  const double n = static_cast<double>(target.dim());
  const double log_norm = 0.5 * n * std::log(2.0 * std::numbers::pi * var);
  if (gradient != nullptr) {
    gradient->setZero(target.dim());
    for (Index k = 0; k < m; ++k) {
      const double resp = std::exp(terms(k) - lse);
      *gradient += resp * (target.means().col(k) - z) / var;
    }
  }
  return lse - log_norm;
}

}  // namespace

double mixture_log_density(const MixtureTarget& target, const Vector& z) {
  return mixture_log_density_impl(target, z, nullptr);
}

double mixture_log_density(const MixtureTarget& target, const Vector& z, Vector& gradient) {
  return mixture_log_density_impl(target, z, &gradient);
}

GaussianTarget mixture_moments(const MixtureTarget& target) {
  const Index n = target.dim();
  const Vector mean = target.means() * target.weights();
  Matrix cov = target.component_variance() * Matrix::Identity(n, n);
  for (Index k = 0; k < target.components(); ++k) {
    const Vector d = target.means().col(k) - mean;
    cov += target.weights()(k) * d * d.transpose();
  }
  return GaussianTarget(mean, std::move(cov));
}

double gaussian_log_density(const GaussianTarget& target, const Vector& z, Vector* gradient) {
  if (z.size() != target.dim()) throw DomainError("Gaussian density evaluated at wrong dimension");
  const Vector d = z - target.mean();
  const double quad = target.factor().forward_solve(d).squaredNorm();
  const double n = static_cast<double>(target.dim());
  if (gradient != nullptr) *gradient = -target.factor().solve(d);
  return -0.5 * quad - 0.5 * target.log_det() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

LogDensity make_log_density(MixtureTarget target) {
  return [t = std::move(target)](const Vector& z, Vector* gradient) {
    return mixture_log_density_impl(t, z, gradient);
  };
}

LogDensity make_log_density(GaussianTarget target) {
  return [t = std::move(target)](const Vector& z, Vector* gradient) {
    return gaussian_log_density(t, z, gradient);
  };
}

LogDensity with_numeric_gradient(std::function<double(const Vector&)> log_density, double step) {
  return [f = std::move(log_density), step](const Vector& z, Vector* gradient) {
    if (gradient != nullptr) {
      gradient->resize(z.size());
      Vector probe = z;
      for (Index i = 0; i < z.size(); ++i) {
        probe(i) = z(i) + step;
        const double up = f(probe);
        probe(i) = z(i) - step;
        const double down = f(probe);
        probe(i) = z(i);
        (*gradient)(i) = (up - down) / (2.0 * step);
      }
    }
    return f(z);
  };
}

void OptimizerConfig::validate() const {
  if (!(step_size > 0.0)) throw DomainError("optimizer step size must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw DomainError("optimizer moment decays must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw DomainError("optimizer epsilon must be positive");
  if (mc_samples < 1) throw DomainError("need at least one Monte Carlo sample per step");
  if (max_steps < 1) throw DomainError("max_steps must be positive");
  if (window < 1) throw DomainError("convergence window must be positive");
  if (!(tolerance >= 0.0)) throw DomainError("tolerance must be non-negative");
  if (min_steps < 0 || warmup_steps < 0) throw DomainError("step counts must be non-negative");
  if (!(init_scale >= 0.0)) throw DomainError("init scale must be non-negative");
  if (!std::isfinite(init_log_std)) throw DomainError("initial log std must be finite");
  if (average_steps < 1) throw DomainError("average_steps must be positive");
}

ElboEstimate estimate_elbo(const LogDensity& log_density, const Vector& mean,
                           const Vector& log_std, int samples, Rng& rng) {
  const Index n = mean.size();
  const Vector sd = log_std.array().exp().matrix();
  ElboEstimate out{0.0, Vector::Zero(n), Vector::Zero(n)};
  Vector u(n);
  Vector z(n);
  Vector grad(n);
  for (int s = 0; s < samples; ++s) {
    for (Index i = 0; i < n; ++i) u(i) = rng.normal();
    z = mean + sd.cwiseProduct(u);
    out.elbo += log_density(z, &grad);
    out.grad_mean += grad;
    out.grad_log_std += grad.cwiseProduct(sd).cwiseProduct(u);
  }
  const double inv = 1.0 / static_cast<double>(samples);
  const double entropy =
      log_std.sum() + 0.5 * static_cast<double>(n) * (std::log(2.0 * std::numbers::pi) + 1.0);
  out.elbo = out.elbo * inv + entropy;
  out.grad_mean *= inv;
  out.grad_log_std = out.grad_log_std * inv + Vector::Ones(n);
  return out;
}

VariationalState fit_fgvi(const LogDensity& log_density, Index n, const OptimizerConfig& config) {
  config.validate();
  if (n < 1) throw DomainError("fit_fgvi needs n >= 1");

  Rng rng(config.seed);
  VariationalState state;
  state.seed = config.seed;
  state.mean.resize(n);
  for (Index i = 0; i < n; ++i) state.mean(i) = config.init_scale * rng.normal();
  state.log_std = Vector::Constant(n, config.init_log_std);
  if (!std::isfinite(log_density(state.mean, nullptr))) {
    throw DomainError("log density is not finite at the initial point");
  }

  const Index dim = 2 * n;
  Vector params(dim);
  params << state.mean, state.log_std;
  Vector m1 = Vector::Zero(dim);
  Vector m2 = Vector::Zero(dim);
  Vector grad(dim);

  // Iterate averaging keeps block means of kBlock steps, so memory stays
  // bounded for long averaging spans.
  constexpr int kBlock = 100;
  const auto max_blocks = static_cast<std::size_t>((config.average_steps + kBlock - 1) / kBlock);
  std::deque<Vector> blocks;
  std::size_t completed_blocks = 0;
  Vector block_sum = Vector::Zero(dim);
  int block_count = 0;

  double window_elbo = 0.0;
  int window_count = 0;
  std::optional<double> previous_average;
  int updates = 0;

  state.elbo_trace.reserve(static_cast<std::size_t>(config.max_steps));
  for (int step = 1; step <= config.max_steps; ++step) {
    const ElboEstimate est =
        estimate_elbo(log_density, params.head(n), params.tail(n), config.mc_samples, rng);
    const bool finite =
        std::isfinite(est.elbo) && est.grad_mean.allFinite() && est.grad_log_std.allFinite();
    if (!finite) {
      if (step <= config.warmup_steps) continue;
      state.mean = params.head(n);
      state.log_std = params.tail(n);
      state.step_count = step;
      throw DivergenceError("ELBO estimate became non-finite at step " + std::to_string(step),
                            step, std::move(state));
    }
    state.elbo_trace.push_back({step, est.elbo});
    state.step_count = step;

    grad << est.grad_mean, est.grad_log_std;
    ++updates;
    m1 = config.beta1 * m1 + (1.0 - config.beta1) * grad;
    m2 = config.beta2 * m2 + (1.0 - config.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(config.beta1, updates);
    const double c2 = 1.0 - std::pow(config.beta2, updates);
    params.array() += config.step_size * (m1.array() / c1) /
                      ((m2.array() / c2).sqrt() + config.epsilon);

    block_sum += params;
    if (++block_count == kBlock) {
      blocks.push_back(block_sum / kBlock);
      if (blocks.size() > max_blocks) blocks.pop_front();
      ++completed_blocks;
      block_sum.setZero();
      block_count = 0;
    }

    window_elbo += est.elbo;
    if (++window_count == config.window) {
      const double average = window_elbo / config.window;
      if (previous_average && step >= config.min_steps) {
        const double denom = std::abs(*previous_average) > 1e-12 ? std::abs(*previous_average) : 1.0;
        if (std::abs(average - *previous_average) / denom < config.tolerance) {
          state.converged = true;
          break;
        }
      }
      previous_average = average;
      window_elbo = 0.0;
      window_count = 0;
    }
  }

  Vector final_params = params;
  const std::size_t use = std::min(blocks.size(), completed_blocks / 2);
  if (config.average_final_window && use > 0) {
    final_params.setZero();
    for (std::size_t b = blocks.size() - use; b < blocks.size(); ++b) final_params += blocks[b];
    final_params /= static_cast<double>(use);
  }
  state.mean = final_params.head(n);
  state.log_std = final_params.tail(n);
  return state;
}

ShrinkageComparison shrinkage_comparison(const MixtureTarget& target,
                                         const VariationalState& fitted) {
  if (fitted.mean.size() != target.dim() || fitted.log_std.size() != target.dim()) {
    throw DomainError("fitted state dimension does not match the mixture");
  }
  if (fitted.step_count < 1 || !fitted.log_std.allFinite() || !fitted.mean.allFinite()) {
    throw DomainError("shrinkage comparison needs a completed fit");
  }
  const GaussianTarget moments = mixture_moments(target);
  ShrinkageComparison out;
  out.S = shrinkage_matrix(moments, fitted.as_factorized());
  out.S_G = shrinkage_matrix(moments, fgvi_solve(moments));
  out.trace_S = out.S.trace();
  out.trace_S_G = out.S_G.trace();
  out.mean_log_S = out.S.log_det() / static_cast<double>(target.dim());
  return out;
}

double max_entropy_gap_bound(const GaussianTarget& target_cov, const VariationalState& fitted) {
  if (fitted.log_std.size() != target_cov.dim()) {
    throw DomainError("fitted state dimension does not match the target covariance");
  }
  return 0.5 * (target_cov.log_det() - 2.0 * fitted.log_std.sum());
}

}  // namespace fgvi

#pragma once

#include <cstdint>

#include "fgvi/gaussian_core.hpp"

namespace fgvi {

/// Squared-exponential kernel family: x ~ uniform(0, domain_upper)ⁿ,
/// Σ_ij = exp(−(x_i − x_j)² / rho²) + jitter·[i = j].
struct KernelConfig {
  Index n = 10;
  double rho = 1.0;  // length-scale, in the units of x
  double domain_upper = 200.0;
  std::uint64_t seed = 0;
  double jitter = 1e-8;

  void validate() const;
};

/// Unit variances, constant correlation eps off the diagonal.
struct ConstantOffDiagConfig {
  Index n = 10;
  double eps = 0.0;

  void validate() const;
};

/// The kernel inputs x drawn for `config` (same draws squared_exponential_target uses).
Vector kernel_inputs(const KernelConfig& config);

/// Zero-mean target with a squared-exponential Gram covariance. Throws
/// GenerationError if the jittered matrix still fails SPD validation.
GaussianTarget squared_exponential_target(const KernelConfig& config);

GaussianTarget constant_offdiag_target(const ConstantOffDiagConfig& config);

/// A = n×n standard normal draws, B = A Aᵀ + 1e-6·n·I, rescaled to unit diagonal.
CorrelationMatrix random_correlation_matrix(Index n, std::uint64_t seed);

/// Random dense SPD covariance for property tests: a random correlation
/// matrix with standard deviations drawn log-uniformly from [0.1, 10] and a
/// standard normal mean.
GaussianTarget random_spd_target(Index n, std::uint64_t seed);

}  // namespace fgvi

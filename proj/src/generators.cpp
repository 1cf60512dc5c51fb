#include "fgvi/generators.hpp"

#include <cmath>
#include <string>

#include "fgvi/errors.hpp"
#include "fgvi/random.hpp"

namespace fgvi {

void KernelConfig::validate() const {
  if (n < 1) throw DomainError("kernel target needs n >= 1");
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw DomainError("kernel length-scale rho must be positive, got " + std::to_string(rho));
  }
  if (!(domain_upper > 0.0) || !std::isfinite(domain_upper)) {
    throw DomainError("kernel input range upper end must be positive");
  }
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) {
    throw DomainError("kernel jitter must be non-negative");
  }
}

void ConstantOffDiagConfig::validate() const {
  if (n < 1) throw DomainError("constant off-diagonal target needs n >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw DomainError("constant off-diagonal correlation must lie in [0, 1), got " +
                      std::to_string(eps));
  }
}

Vector kernel_inputs(const KernelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Vector x(config.n);
  for (Index i = 0; i < config.n; ++i) x(i) = rng.uniform(0.0, config.domain_upper);
  return x;
}

GaussianTarget squared_exponential_target(const KernelConfig& config) {
  const Vector x = kernel_inputs(config);
  const Index n = config.n;
  const double inv_rho2 = 1.0 / (config.rho * config.rho);
  Matrix sigma(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double d = x(i) - x(j);
      sigma(i, j) = std::exp(-d * d * inv_rho2);
    }
    sigma(j, j) += config.jitter;
  }
  try {
    return GaussianTarget(std::move(sigma));
  } catch (const ConditioningError& e) {
    throw GenerationError(std::string("squared-exponential covariance failed validation (") +
                          e.what() + "); try a larger jitter than " +
                          std::to_string(config.jitter));
  }
}

GaussianTarget constant_offdiag_target(const ConstantOffDiagConfig& config) {
  config.validate();
  Matrix sigma = Matrix::Constant(config.n, config.n, config.eps);
  sigma.diagonal().setOnes();
  return GaussianTarget(std::move(sigma));
}

namespace {

Matrix random_correlation_entries(Index n, Rng& rng) {
  Matrix a(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) a(i, j) = rng.normal();
  }
  Matrix b = a * a.transpose();
  b.diagonal().array() += 1e-6 * static_cast<double>(n);
  const Vector scale = b.diagonal().cwiseSqrt().cwiseInverse();
  Matrix c = scale.asDiagonal() * b * scale.asDiagonal();
  c = 0.5 * (c + c.transpose());
  c.diagonal().setOnes();
  return c;
}

}  // namespace

CorrelationMatrix random_correlation_matrix(Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("random correlation matrix needs n >= 1");
  Rng rng(seed);
  try {
    return CorrelationMatrix(random_correlation_entries(n, rng));
  } catch (const Error& e) {
    throw GenerationError(std::string("random correlation matrix failed validation: ") +
                          e.what());
  }
}

GaussianTarget random_spd_target(Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("random SPD target needs n >= 1");
  Rng rng(seed);
  const Matrix c = random_correlation_entries(n, rng);
  Vector sd(n);
  for (Index i = 0; i < n; ++i) sd(i) = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  Vector mean(n);
  for (Index i = 0; i < n; ++i) mean(i) = rng.normal();
  Matrix sigma = sd.asDiagonal() * c * sd.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose());
  try {
    return GaussianTarget(std::move(mean), std::move(sigma));
  } catch (const ConditioningError& e) {
    throw GenerationError(std::string("random SPD target failed validation: ") + e.what());
  }
}

}  // namespace fgvi

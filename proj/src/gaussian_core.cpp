#include "fgvi/gaussian_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fgvi/errors.hpp"

namespace fgvi {

namespace {

Matrix validated_covariance(const Vector& mean, Matrix covariance) {
  const Index n = covariance.rows();
  if (n < 1 || covariance.cols() != n) {
    throw DomainError("covariance must be a non-empty square matrix, got " +
                      std::to_string(covariance.rows()) + "x" +
                      std::to_string(covariance.cols()));
  }
  if (mean.size() != n) {
    throw DomainError("mean has length " + std::to_string(mean.size()) +
                      " but covariance is " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw DomainError("target mean and covariance must be finite");
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double diff = std::abs(covariance(i, j) - covariance(j, i));
      const double scale = std::max(1.0, std::abs(covariance(i, j)));
      if (diff > GaussianTarget::kSymmetryTolerance * scale) {
        throw DomainError("covariance is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
      const double avg = 0.5 * (covariance(i, j) + covariance(j, i));
      covariance(i, j) = avg;
      covariance(j, i) = avg;
    }
  }
  return covariance;
}

void require_same_dim(const GaussianTarget& target, const FactorizedGaussian& approx) {
  if (target.dim() != approx.dim()) {
    throw DomainError("approximation has dimension " + std::to_string(approx.dim()) +
                      " but target has dimension " + std::to_string(target.dim()));
  }
}

void require_constant_offdiag_domain(Index n, double eps) {
  if (n < 2) throw DomainError("constant off-diagonal closed forms need n >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw DomainError("constant off-diagonal correlation must lie in [0, 1), got " +
                      std::to_string(eps));
  }
}

}  // namespace

GaussianTarget::GaussianTarget(Vector mean, Matrix covariance)
    : mean_(std::move(mean)),
      covariance_(validated_covariance(mean_, std::move(covariance))),
      factor_(covariance_) {}

GaussianTarget::GaussianTarget(Matrix covariance)
    : mean_(Vector::Zero(covariance.rows())),
      covariance_(validated_covariance(mean_, std::move(covariance))),
      factor_(covariance_) {}

FactorizedGaussian::FactorizedGaussian(Vector mean, Vector variances)
    : mean_(std::move(mean)), variances_(std::move(variances)) {
  if (mean_.size() != variances_.size() || mean_.size() < 1) {
    throw DomainError("factorized Gaussian needs matching non-empty mean and variances");
  }
  for (Index i = 0; i < variances_.size(); ++i) {
    if (!(variances_(i) > 0.0) || !std::isfinite(variances_(i))) {
      throw DomainError("variance " + std::to_string(i) + " must be finite and positive, got " +
                        std::to_string(variances_(i)));
    }
  }
  if (!mean_.allFinite()) throw DomainError("factorized Gaussian mean must be finite");
}

namespace {

Matrix validated_correlation(Matrix c) {
  const Index n = c.rows();
  if (n < 1 || c.cols() != n) throw DomainError("correlation matrix must be square");
  if (!c.allFinite()) throw DomainError("correlation matrix must be finite");
  for (Index i = 0; i < n; ++i) {
    if (std::abs(c(i, i) - 1.0) > 1e-12) {
      throw DomainError("correlation matrix diagonal entry " + std::to_string(i) +
                        " is " + std::to_string(c(i, i)) + ", expected 1");
    }
    c(i, i) = 1.0;
  }
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (std::abs(c(i, j) - c(j, i)) > GaussianTarget::kSymmetryTolerance) {
        throw DomainError("correlation matrix is not symmetric");
      }
      const double avg = 0.5 * (c(i, j) + c(j, i));
      if (!(std::abs(avg) < 1.0)) {
        throw DomainError("correlation entry (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") has magnitude >= 1");
      }
      c(i, j) = avg;
      c(j, i) = avg;
    }
  }
  return c;
}

}  // namespace

CorrelationMatrix::CorrelationMatrix(Matrix entries)
    : entries_(validated_correlation(std::move(entries))), factor_(entries_) {}

Vector CorrelationMatrix::eigenvalues() const {
  return symmetric_eigen(entries_).values;
}

double CorrelationMatrix::condition_number() const {
  return fgvi::condition_number(entries_);
}

CorrelationMatrix correlation_from_covariance(const Matrix& covariance) {
  const Index n = covariance.rows();
  if (covariance.cols() != n) throw DomainError("covariance must be square");
  Vector scale(n);
  for (Index i = 0; i < n; ++i) {
    if (!(covariance(i, i) > 0.0)) {
      throw DomainError("covariance diagonal entry " + std::to_string(i) +
                        " is not positive: " + std::to_string(covariance(i, i)));
    }
    scale(i) = 1.0 / std::sqrt(covariance(i, i));
  }
  Matrix c = scale.asDiagonal() * covariance * scale.asDiagonal();
  c.diagonal().setOnes();
  return CorrelationMatrix(std::move(c));
}

CorrelationMatrix correlation_from_covariance(const GaussianTarget& target) {
  return correlation_from_covariance(target.covariance());
}

FactorizedGaussian fgvi_solve(const GaussianTarget& target) {
  if (target.dim() == 1) {
    return FactorizedGaussian(target.mean(), target.covariance().diagonal());
  }
  Vector variances = target.factor().inverse_diagonal().cwiseInverse();
  return FactorizedGaussian(target.mean(), std::move(variances));
}

FactorizedGaussian reverse_kl_solve(const GaussianTarget& target) {
  return FactorizedGaussian(target.mean(), target.covariance().diagonal());
}

ShrinkageMatrix shrinkage_matrix(const GaussianTarget& target, const FactorizedGaussian& approx) {
  require_same_dim(target, approx);
  return ShrinkageMatrix{target.covariance().diagonal().cwiseQuotient(approx.variances())};
}

double gaussian_entropy(double log_det, Index n) {
  if (n < 1) throw DomainError("entropy needs dimension >= 1");
  if (std::isnan(log_det) || log_det < -700.0 * static_cast<double>(n)) {
    throw DomainError("log-determinant " + std::to_string(log_det) +
                      " is below the representable range for dimension " + std::to_string(n));
  }
  const double log_2pi_e = std::log(2.0 * std::numbers::pi) + 1.0;
  return 0.5 * (log_det + static_cast<double>(n) * log_2pi_e);
}

double kl_divergence(const FactorizedGaussian& q, const GaussianTarget& p) {
  if (q.dim() != p.dim()) throw DomainError("KL divergence between mismatched dimensions");
  const Index n = p.dim();
  const Matrix& lower = p.factor().lower();
  // Columns of L⁻¹: (Σ⁻¹)_ii = ‖L⁻¹ e_i‖².
  const Matrix lower_inv = lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  double trace = 0.0;
  for (Index i = 0; i < n; ++i) {
    trace += q.variances()(i) * lower_inv.col(i).squaredNorm();
  }
  const double mahalanobis = p.factor().forward_solve(q.mean() - p.mean()).squaredNorm();
  const double log_det_ratio = q.log_det() - p.log_det();
  return 0.5 * (trace + mahalanobis - static_cast<double>(n) - log_det_ratio);
}

DecompositionReport decompose(const GaussianTarget& target) {
  return decompose(target, fgvi_solve(target));
}

DecompositionReport decompose(const GaussianTarget& target, const FactorizedGaussian& approx) {
  require_same_dim(target, approx);
  const Index n = target.dim();
  const Vector sigma_diag = target.covariance().diagonal();

  DecompositionReport report;
  report.n = n;
  report.log_det_S = shrinkage_matrix(target, approx).log_det();
  report.log_det_C = target.log_det() - sigma_diag.array().log().sum();
  report.entropy_p = gaussian_entropy(target.log_det(), n);
  report.entropy_q = gaussian_entropy(approx.log_det(), n);
  report.entropy_gap = 0.5 * (target.log_det() - approx.log_det());
  report.kl_q_p = kl_divergence(approx, target);
  report.per_component_gap = report.entropy_gap / static_cast<double>(n);
  report.condition_number = n == 1 ? 1.0 : correlation_from_covariance(target).condition_number();
  return report;
}

bool has_offdiagonal_correlation(const GaussianTarget& target, double threshold) {
  const Matrix& s = target.covariance();
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = j + 1; i < s.rows(); ++i) {
      if (std::abs(s(i, j)) > threshold * std::sqrt(s(i, i) * s(j, j))) return true;
    }
  }
  return false;
}

ConstantOffDiagClosedForms constant_offdiag_closed_forms(Index n, double eps) {
  require_constant_offdiag_domain(n, eps);
  const double nd = static_cast<double>(n);
  const double log_one_minus = std::log1p(-eps);
  const double log_top = std::log1p((nd - 1.0) * eps);    // log(1 + (n-1)ε)
  const double log_mid = std::log1p((nd - 2.0) * eps);    // log(1 + (n-2)ε)

  ConstantOffDiagClosedForms out;
  out.psi_ratio = (1.0 - eps) * (1.0 + (nd - 1.0) * eps) / (1.0 + (nd - 2.0) * eps);
  out.log_det_S = nd * (log_mid - log_one_minus - log_top);
  out.log_det_C = (nd - 1.0) * log_one_minus + log_top;
  out.per_component_gap = (out.log_det_S + out.log_det_C) / (2.0 * nd);
  out.trace_S_over_n = 1.0 / out.psi_ratio;
  return out;
}

double reverse_kl_asymptote(Index n, double eps) {
  require_constant_offdiag_domain(n, eps);
  const double nd = static_cast<double>(n);
  const double log_det_C = (nd - 1.0) * std::log1p(-eps) + std::log1p((nd - 1.0) * eps);
  return log_det_C / (2.0 * nd);
}

}  // namespace fgvi

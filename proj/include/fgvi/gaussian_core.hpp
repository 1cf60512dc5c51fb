#pragma once

#include "fgvi/linalg.hpp"

namespace fgvi {

/// Multivariate Gaussian p = N(mean, covariance) with a validated dense
/// covariance. The Cholesky factor computed during validation is kept and
/// reused by every downstream operation.
class GaussianTarget {
 public:
  /// Symmetry tolerance: |Σ_ij − Σ_ji| ≤ kSymmetryTolerance · max(1, |Σ_ij|).
  static constexpr double kSymmetryTolerance = 1e-12;

  /// Throws DomainError on shape, symmetry or finiteness problems and
  /// ConditioningError when Σ is not numerically positive definite.
  GaussianTarget(Vector mean, Matrix covariance);

  /// Zero-mean target.
  explicit GaussianTarget(Matrix covariance);

  Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const CholeskyFactor& factor() const { return factor_; }
  double log_det() const { return factor_.log_det(); }

 private:
  Vector mean_;
  Matrix covariance_;
  CholeskyFactor factor_;
};

/// Gaussian with diagonal covariance, q = N(mean, diag(variances)).
class FactorizedGaussian {
 public:
  /// Throws DomainError unless sizes agree and every variance is finite and > 0.
  FactorizedGaussian(Vector mean, Vector variances);

  Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Vector& variances() const { return variances_; }
  double log_det() const { return variances_.array().log().sum(); }

 private:
  Vector mean_;
  Vector variances_;
};

/// Covariance rescaled to unit diagonal. The diagonal is stored as exactly 1.
class CorrelationMatrix {
 public:
  /// Validates symmetry, |C_ii − 1| ≤ 1e-12, |C_ij| < 1 off the diagonal and
  /// positive definiteness; throws DomainError / ConditioningError.
  explicit CorrelationMatrix(Matrix entries);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  double log_det() const { return factor_.log_det(); }
  /// Diagonal of C⁻¹.
  Vector inverse_diagonal() const { return factor_.inverse_diagonal(); }
  /// Descending eigenvalues from the Jacobi solver.
  Vector eigenvalues() const;
  double condition_number() const;

 private:
  Matrix entries_;
  CholeskyFactor factor_;
};

/// Diagonal shrinkage matrix, S_ii = Σ_ii / Ψ_ii.
struct ShrinkageMatrix {
  Vector diagonal;

  double log_det() const { return diagonal.array().log().sum(); }
  double trace() const { return diagonal.sum(); }
};

/// Entropy accounting for a factorized approximation q of a Gaussian target p.
/// All quantities in nats.
struct DecompositionReport {
  Index n = 0;
  double log_det_S = 0.0;
  double log_det_C = 0.0;
  double entropy_p = 0.0;
  double entropy_q = 0.0;
  /// H(p) − H(q), computed as ½(log|Σ| − log|Ψ|).
  double entropy_gap = 0.0;
  /// KL(q‖p) from the trace / log-det formula, independent of entropy_gap.
  double kl_q_p = 0.0;
  double per_component_gap = 0.0;
  /// λ_max(C) / λ_min(C).
  double condition_number = 1.0;

  /// Shrinkage term ½ log|S| (≥ 0 for the forward-KL solution).
  double half_log_det_S() const { return 0.5 * log_det_S; }
  /// Delinkage term ½ log|C|⁻¹ (≥ 0 always).
  double half_log_det_C_inv() const { return -0.5 * log_det_C; }
};

/// C_ij = Σ_ij / √(Σ_ii Σ_jj). Throws DomainError naming the first index with
/// a non-positive diagonal entry.
CorrelationMatrix correlation_from_covariance(const Matrix& covariance);
CorrelationMatrix correlation_from_covariance(const GaussianTarget& target);

/// Minimizer of KL(q‖p) over factorized Gaussians: ν = μ, Ψ_ii = 1 / (Σ⁻¹)_ii.
FactorizedGaussian fgvi_solve(const GaussianTarget& target);

/// Minimizer of KL(p‖q) over factorized Gaussians: ν = μ, Ψ_ii = Σ_ii.
FactorizedGaussian reverse_kl_solve(const GaussianTarget& target);

ShrinkageMatrix shrinkage_matrix(const GaussianTarget& target, const FactorizedGaussian& approx);

/// ½ (log_det + n log(2πe)). Rejects n < 1 and log_det/n < −700, where the
/// per-coordinate variance is no longer representable as a double.
double gaussian_entropy(double log_det, Index n);

/// KL(q‖p) = ½[tr(ΨΣ⁻¹) + (ν−μ)ᵀΣ⁻¹(ν−μ) − n − log|ΨΣ⁻¹|] for any factorized q.
double kl_divergence(const FactorizedGaussian& q, const GaussianTarget& p);

/// Decomposition of the forward-KL solution.
DecompositionReport decompose(const GaussianTarget& target);

/// Decomposition for an arbitrary factorized approximation (for example the
/// reverse-KL solution, where S = I).
DecompositionReport decompose(const GaussianTarget& target, const FactorizedGaussian& approx);

/// True when some |C_ij|, i ≠ j, exceeds `threshold`.
bool has_offdiagonal_correlation(const GaussianTarget& target, double threshold = 1e-8);

/// Closed-form quantities for a unit-variance target with constant
/// off-diagonal correlation eps.
struct ConstantOffDiagClosedForms {
  double psi_ratio = 1.0;        // Ψ_ii / Σ_ii
  double log_det_S = 0.0;
  double log_det_C = 0.0;
  double per_component_gap = 0.0;  // (log|S| + log|C|) / (2n)
  double trace_S_over_n = 1.0;
};

/// Requires n ≥ 2 and eps ∈ [0, 1).
ConstantOffDiagClosedForms constant_offdiag_closed_forms(Index n, double eps);

/// Per-component entropy gap (H(p) − H(q)) / n when q is the reverse-KL
/// solution of a constant off-diagonal target: log|C| / (2n), since S = I.
double reverse_kl_asymptote(Index n, double eps);

}  // namespace fgvi

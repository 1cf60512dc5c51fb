#pragma once

#include <Eigen/Dense>

namespace fgvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Cholesky factorization A = L Lᵀ of a symmetric positive-definite matrix.
///
/// Only the lower triangle of the input is read. The raw pivots (squared
/// diagonal of L) are kept so that log-determinants are a sum of logs and never
/// form |A| itself, which under- or overflows for moderate n.
class CholeskyFactor {
 public:
  /// A pivot at or below this fraction of the largest diagonal entry of A is
  /// treated as a breakdown.
  static constexpr double kRelativePivotFloor = 1e-12;

  /// Throws ConditioningError carrying the offending column on breakdown.
  explicit CholeskyFactor(const Matrix& a);

  Index dim() const { return lower_.rows(); }
  const Matrix& lower() const { return lower_; }
  const Vector& pivots() const { return pivots_; }

  double log_det() const;

  /// Solves A x = b.
  Vector solve(const Vector& b) const;

  /// Solves L y = b.
  Vector forward_solve(const Vector& b) const;

  /// Diagonal of A⁻¹, one solve A x = e_i per coordinate.
  Vector inverse_diagonal() const;

 private:
  Matrix lower_;
  Vector pivots_;
};

/// Non-throwing variant of the factorization check.
bool is_positive_definite(const Matrix& a);

struct JacobiOptions {
  /// Stop once ‖offdiag(A)‖_F ≤ tolerance · ‖A‖_F.
  double tolerance = 1e-12;
  int max_sweeps = 64;
  bool compute_vectors = false;
};

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns match `values`; empty unless requested
  int sweeps = 0;
};

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.
/// Pivot pairs are visited row by row, (0,1), (0,2), ..., (n-2,n-1), so the
/// result is bit-reproducible for a given input.
SymmetricEigen symmetric_eigen(const Matrix& a, const JacobiOptions& options = {});

/// λ_max / λ_min of a symmetric positive-definite matrix.
double condition_number(const Matrix& a);

}  // namespace fgvi

#include "fgvi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "fgvi/errors.hpp"

namespace fgvi {

CholeskyFactor::CholeskyFactor(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError("Cholesky factorization needs a non-empty square matrix, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const Index n = a.rows();
  const double max_diag = a.diagonal().maxCoeff();
  const double floor = kRelativePivotFloor * max_diag;

  lower_ = Matrix::Zero(n, n);
  pivots_.resize(n);
  for (Index j = 0; j < n; ++j) {
    const double pivot = a(j, j) - lower_.row(j).head(j).squaredNorm();
    // Written so that NaN also fails.
    if (!(pivot > floor) || !(max_diag > 0.0)) {
      throw ConditioningError(
          "matrix is not numerically positive definite: pivot " + std::to_string(pivot) +
              " at column " + std::to_string(j) + " is below " + std::to_string(floor),
          static_cast<long>(j));
    }
    const double ljj = std::sqrt(pivot);
    pivots_(j) = pivot;
    lower_(j, j) = ljj;
    const Index below = n - j - 1;
    if (below > 0) {
      lower_.col(j).tail(below) =
          (a.col(j).tail(below) -
           lower_.bottomLeftCorner(below, j) * lower_.row(j).head(j).transpose()) /
          ljj;
    }
  }
}

double CholeskyFactor::log_det() const {
  return pivots_.array().log().sum();
}

Vector CholeskyFactor::forward_solve(const Vector& b) const {
  return lower_.triangularView<Eigen::Lower>().solve(b);
}

Vector CholeskyFactor::solve(const Vector& b) const {
  Vector y = forward_solve(b);
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector CholeskyFactor::inverse_diagonal() const {
  const Index n = dim();
  Vector out(n);
  Vector unit = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    unit(i) = 1.0;
    out(i) = solve(unit)(i);
    unit(i) = 0.0;
  }
  return out;
}

bool is_positive_definite(const Matrix& a) {
  try {
    CholeskyFactor factor(a);
    return true;
  } catch (const Error&) {
    return false;
  }
}

namespace {

double offdiagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& input, const JacobiOptions& options) {
  if (input.rows() != input.cols()) {
    throw DomainError("symmetric_eigen needs a square matrix");
  }
  const Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v;
  if (options.compute_vectors) v = Matrix::Identity(n, n);

  const double scale = a.norm();
  const double target = options.tolerance * scale;
  int sweeps = 0;
  while (sweeps < options.max_sweeps && offdiagonal_norm(a) > target) {
    ++sweeps;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          a(p, k) = a(k, p);
          a(q, k) = a(k, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (options.compute_vectors) {
          for (Index k = 0; k < n; ++k) {
            const double vkp = v(k, p);
            const double vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Index i, Index j) { return a(i, i) > a(j, j); });

  SymmetricEigen result;
  result.sweeps = sweeps;
  result.values.resize(n);
  if (options.compute_vectors) result.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    result.values(k) = a(src, src);
    if (options.compute_vectors) result.vectors.col(k) = v.col(src);
  }
  return result;
}

double condition_number(const Matrix& a) {
  const SymmetricEigen eig = symmetric_eigen(a);
  const double smallest = eig.values(eig.values.size() - 1);
  if (!(smallest > 0.0)) {
    throw ConditioningError("condition number requested for a matrix with eigenvalue " +
                                std::to_string(smallest),
                            -1);
  }
  return eig.values(0) / smallest;
}

}  // namespace fgvi

#include "fgvi/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fgvi/errors.hpp"

namespace fgvi {

EigenProfile::EigenProfile(Vector values, double condition_ratio)
    : values_(std::move(values)), condition_ratio_(condition_ratio) {
  if (!satisfies_invariants(values_, condition_ratio_)) {
    throw DomainError("eigenvalue profile violates the constraints of the relaxed set");
  }
}

bool EigenProfile::satisfies_invariants(const Vector& values, double condition_ratio,
                                        double tolerance) {
  const Index n = values.size();
  if (n < 1 || !(condition_ratio >= 1.0) || !std::isfinite(condition_ratio)) return false;
  for (Index i = 0; i < n; ++i) {
    if (!(values(i) > 0.0) || !std::isfinite(values(i))) return false;
    if (i > 0 && values(i) > values(i - 1) * (1.0 + tolerance)) return false;
  }
  const double top = values(0);
  const double bottom = values(n - 1);
  if (std::abs(top - condition_ratio * bottom) > tolerance * top) return false;
  const double nd = static_cast<double>(n);
  return std::abs(values.sum() - nd) <= tolerance * nd;
}

std::optional<EigenProfile> EigenProfile::try_make(Vector values, double condition_ratio) {
  if (!satisfies_invariants(values, condition_ratio)) return std::nullopt;
  return EigenProfile(std::move(values), condition_ratio);
}

Index EigenProfile::off_edge_count(double tolerance) const {
  Index count = 0;
  for (Index i = 0; i < values_.size(); ++i) {
    const double v = values_(i);
    const bool at_top = std::abs(v - largest()) <= tolerance * largest();
    const bool at_bottom = std::abs(v - smallest()) <= tolerance * largest();
    if (!at_top && !at_bottom) ++count;
  }
  return count;
}

namespace {

void require_condition_ratio(double r) {
  if (!(r >= 1.0) || !std::isfinite(r)) {
    throw DomainError("condition number must be a finite value >= 1, got " + std::to_string(r));
  }
}

void require_dim(Index n, Index min_n, const char* what) {
  if (n < min_n) {
    throw DomainError(std::string(what) + " needs n >= " + std::to_string(min_n) + ", got " +
                      std::to_string(n));
  }
}

/// k−1 entries at top, one at `free_value`, n−k at `bottom` (k is 1-based).
Vector split_profile(Index n, Index k, double bottom, double top, double free_value) {
  Vector v(n);
  for (Index i = 0; i < k - 1; ++i) v(i) = top;
  v(k - 1) = free_value;
  for (Index i = k; i < n; ++i) v(i) = bottom;
  return v;
}

/// Profile with interior entries all equal to `interior`.
Vector interior_profile(Index n, double bottom, double top, double interior) {
  Vector v = Vector::Constant(n, interior);
  v(0) = top;
  v(n - 1) = bottom;
  return v;
}

struct InverseSumMax {
  double value;
  EigenProfile profile;
};

/// max over Λ_R of Σ λᵢ⁻¹.
InverseSumMax max_inverse_sum(Index n, double r) {
  const double nd = static_cast<double>(n);
  double best = -std::numeric_limits<double>::infinity();
  std::optional<EigenProfile> best_profile;
  for (Index k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    // λ_k = Rλₙ at the lower end, λ_k = λₙ at the upper end.
    const double lower_end = nd / (r * kd + nd - kd);
    const double upper_end = nd / (r * (kd - 1.0) + nd - kd + 1.0);
    const std::array<std::pair<double, double>, 2> ends{
        std::pair{lower_end, r * lower_end}, std::pair{upper_end, upper_end}};
    for (const auto& [lambda_n, lambda_k] : ends) {
      auto profile = EigenProfile::try_make(
          split_profile(n, k, lambda_n, r * lambda_n, lambda_k), r);
      if (!profile) continue;
      const double objective = (nd - kd + (kd - 1.0) / r) / lambda_n + 1.0 / lambda_k;
      if (objective > best) {
        best = objective;
        best_profile = std::move(profile);
      }
    }
  }
  if (!best_profile) {
    throw DomainError("no feasible eigenvalue profile for n = " + std::to_string(n) +
                      ", R = " + std::to_string(r));
  }
  return {best, std::move(*best_profile)};
}

double inverse_sum(const Vector& v) { return v.cwiseInverse().sum(); }

}  // namespace

BoundResult bound_log_det_S(Index n, double condition_ratio) {
  require_dim(n, 2, "log|S| bound");
  require_condition_ratio(condition_ratio);
  InverseSumMax best = max_inverse_sum(n, condition_ratio);
  const double nd = static_cast<double>(n);
  return {nd * std::log(best.value / nd), std::move(best.profile)};
}

BoundResult bound_log_det_C(Index n, double condition_ratio) {
  require_dim(n, 1, "log|C| bound");
  require_condition_ratio(condition_ratio);
  const double r = condition_ratio;
  if (n == 1) {
    if (r != 1.0) throw DomainError("a 1x1 correlation matrix has condition number 1");
    return {0.0, EigenProfile(Vector::Ones(1), 1.0)};
  }
  const double nd = static_cast<double>(n);
  const double lambda_n = 2.0 / (1.0 + r);
  if (n == 2) {
    Vector v(2);
    v << r * lambda_n, lambda_n;
    return {std::log(r * lambda_n) + std::log(lambda_n), EigenProfile(std::move(v), r)};
  }
  const double lo = nd / (1.0 + r * (nd - 1.0));
  const double hi = nd / (nd - 1.0 + r);
  if (lambda_n < lo * (1.0 - 1e-12) || lambda_n > hi * (1.0 + 1e-12)) {
    throw DomainError("stationary point of the log|C| objective left its feasible interval");
  }
  const double interior = (nd - (1.0 + r) * lambda_n) / (nd - 2.0);
  const double value =
      (nd - 2.0) * std::log(interior) + std::log(r * lambda_n) + std::log(lambda_n);
  return {value, EigenProfile(interior_profile(n, lambda_n, r * lambda_n, interior), r)};
}

TraceBounds bound_trace_S(Index n, double condition_ratio) {
  require_dim(n, 2, "trace(S) bounds");
  require_condition_ratio(condition_ratio);
  const double r = condition_ratio;
  const double nd = static_cast<double>(n);

  InverseSumMax upper = max_inverse_sum(n, r);

  if (n == 2) {
    const double lambda_n = 2.0 / (1.0 + r);
    Vector v(2);
    v << r * lambda_n, lambda_n;
    EigenProfile only(std::move(v), r);
    const double value = inverse_sum(only.values());
    return {value, upper.value, only, std::move(upper.profile)};
  }

  const double lo = nd / (r * (nd - 1.0) + 1.0);
  const double hi = nd / (r + nd - 1.0);
  auto objective = [&](double lambda_n) {
    return (nd - 2.0) * (nd - 2.0) / (nd - (1.0 + r) * lambda_n) + 1.0 / lambda_n +
           1.0 / (r * lambda_n);
  };

  // Stationarity: [R(n−2)² − (1+R)²] λ² + 2n(1+R) λ − n² = 0.
  const double a = r * (nd - 2.0) * (nd - 2.0) - (1.0 + r) * (1.0 + r);
  const double b = 2.0 * nd * (1.0 + r);
  const double c = -nd * nd;
  std::vector<double> roots;
  if (std::abs(a) < 1e-12) {
    roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      roots.push_back(q / a);
      if (q != 0.0) roots.push_back(c / q);
    }
  }

  std::vector<double> candidates;
  for (double root : roots) {
    if (root >= lo * (1.0 - 1e-12) && root <= hi * (1.0 + 1e-12)) {
      candidates.push_back(std::clamp(root, lo, hi));
    }
  }
  if (candidates.empty()) candidates = {lo, hi};

  double best = std::numeric_limits<double>::infinity();
  double best_lambda = candidates.front();
  for (double lambda_n : candidates) {
    const double value = objective(lambda_n);
    if (value < best) {
      best = value;
      best_lambda = lambda_n;
    }
  }
  const double interior = (nd - (1.0 + r) * best_lambda) / (nd - 2.0);
  EigenProfile minimizer(interior_profile(n, best_lambda, r * best_lambda, interior), r);
  return {best, upper.value, std::move(minimizer), std::move(upper.profile)};
}

BoundResult bound_kl_joint(Index n, double condition_ratio) {
  require_dim(n, 2, "joint KL bound");
  require_condition_ratio(condition_ratio);
  const double r = condition_ratio;
  const double nd = static_cast<double>(n);

  double best = -std::numeric_limits<double>::infinity();
  std::optional<EigenProfile> best_profile;
  for (Index k = 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    // ω is ascending: k−1 entries at ω₁, the free ω_k, n−k at ωₙ = Rω₁.
    const double lower_end = 1.0 / (kd - 1.0 + r * (nd - kd + 1.0));  // ω_k = Rω₁
    const double upper_end = 1.0 / (kd + r * (nd - kd));              // ω_k = ω₁
    const std::array<std::pair<double, double>, 2> ends{
        std::pair{lower_end, r * lower_end}, std::pair{upper_end, upper_end}};
    for (const auto& [omega_1, omega_k] : ends) {
      // Back to eigenvalues: λᵢ ∝ 1/ωᵢ (ascending ω is descending λ), rescaled
      // to sum to n.
      Vector lambda = split_profile(n, k, 1.0 / (r * omega_1), 1.0 / omega_1, 1.0 / omega_k);
      lambda *= nd / lambda.sum();
      auto profile = EigenProfile::try_make(std::move(lambda), r);
      if (!profile) continue;
      const double neg_log_sum = -(kd - 1.0) * std::log(omega_1) -
                                 (nd - kd) * std::log(r * omega_1) - std::log(omega_k);
      const double value = 0.5 * (neg_log_sum - nd * std::log(nd));
      if (value > best) {
        best = value;
        best_profile = std::move(profile);
      }
    }
  }
  if (!best_profile) {
    throw DomainError("no feasible profile for the joint KL bound");
  }
  return {best, std::move(*best_profile)};
}

BoundsReport compute_bounds(Index n, double condition_ratio) {
  require_dim(n, 2, "bounds report");
  BoundResult log_s = bound_log_det_S(n, condition_ratio);
  BoundResult log_c = bound_log_det_C(n, condition_ratio);
  TraceBounds trace = bound_trace_S(n, condition_ratio);
  BoundResult joint = bound_kl_joint(n, condition_ratio);

  BoundsReport report;
  report.n = n;
  report.condition_ratio = condition_ratio;
  report.upper_log_det_S = log_s.value;
  report.upper_log_det_C = log_c.value;
  report.lower_trace_S = trace.lower;
  report.upper_trace_S = trace.upper;
  report.joint_kl_upper = joint.value;
  report.separate_kl_upper = 0.5 * (log_s.value + log_c.value);
  report.maximizers.emplace("log_det_S", std::move(log_s.profile));
  report.maximizers.emplace("log_det_C", std::move(log_c.profile));
  report.maximizers.emplace("trace_S_lower", std::move(trace.minimizer));
  report.maximizers.emplace("trace_S_upper", std::move(trace.maximizer));
  report.maximizers.emplace("kl_joint", std::move(joint.profile));
  return report;
}

std::vector<BoundsReport> envelope_sweep(Index n, std::span<const double> condition_grid) {
  for (std::size_t i = 0; i < condition_grid.size(); ++i) {
    require_condition_ratio(condition_grid[i]);
    if (i > 0 && !(condition_grid[i] > condition_grid[i - 1])) {
      throw DomainError("condition-number grid must be strictly ascending");
    }
  }
  std::vector<BoundsReport> rows;
  rows.reserve(condition_grid.size());
  for (double r : condition_grid) rows.push_back(compute_bounds(n, r));
  return rows;
}

}  // namespace fgvi

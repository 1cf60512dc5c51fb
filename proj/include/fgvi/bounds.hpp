#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgvi/linalg.hpp"

namespace fgvi {

/// A point of the relaxed eigenvalue set Λ_R: positive values sorted in
/// descending order, summing to n, with largest = R · smallest.
class EigenProfile {
 public:
  static constexpr double kTolerance = 1e-10;

  /// Throws DomainError unless the invariants hold within kTolerance (relative).
  EigenProfile(Vector values, double condition_ratio);

  static bool satisfies_invariants(const Vector& values, double condition_ratio,
                                   double tolerance = kTolerance);
  static std::optional<EigenProfile> try_make(Vector values, double condition_ratio);

  Index dim() const { return values_.size(); }
  const Vector& values() const { return values_; }
  double condition_ratio() const { return condition_ratio_; }

  double largest() const { return values_(0); }
  double smallest() const { return values_(values_.size() - 1); }

  /// Entries further than `tolerance` (relative) from both λ₁ and λₙ.
  Index off_edge_count(double tolerance) const;

 private:
  Vector values_;
  double condition_ratio_;
};

struct BoundResult {
  double value;
  EigenProfile profile;
};

struct TraceBounds {
  double lower;
  double upper;
  EigenProfile minimizer;
  EigenProfile maximizer;
};

/// Every envelope for one (n, R).
struct BoundsReport {
  Index n = 0;
  double condition_ratio = 1.0;
  double upper_log_det_S = 0.0;
  double upper_log_det_C = 0.0;
  double lower_trace_S = 0.0;
  double upper_trace_S = 0.0;
  double joint_kl_upper = 0.0;
  /// ½(upper_log_det_S + upper_log_det_C): the gap bound from the two separate
  /// envelopes, which joint_kl_upper never exceeds.
  double separate_kl_upper = 0.0;
  /// Extremal profile behind each bound, keyed "log_det_S", "log_det_C",
  /// "trace_S_lower", "trace_S_upper", "kl_joint".
  std::map<std::string, EigenProfile> maximizers;
};

/// log|S| ≤ n log((1/n) max_{Λ_R} Σ λᵢ⁻¹). Requires n ≥ 2 and R ≥ 1.
///
/// For each split index k (k−1 entries at λ₁ = Rλₙ, one free entry λ_k, n−k at
/// λₙ) the objective is convex in λₙ, so only the two ends of the feasible
/// interval n/(Rk+n−k) ≤ λₙ ≤ n/(R(k−1)+n−k+1) are evaluated. Endpoints that
/// leave no entry at one of the edges are infeasible and skipped. Ties go to
/// the smaller k.
BoundResult bound_log_det_S(Index n, double condition_ratio);

/// log|C| ≤ max_{Λ_R} Σ log λᵢ, attained at λₙ = 2/(1+R) with equal interior
/// entries. n = 2 is fully determined by the constraints; n = 1 requires R = 1.
BoundResult bound_log_det_C(Index n, double condition_ratio);

/// min_{Λ_R} Σ λᵢ⁻¹ ≤ trace(S) ≤ max_{Λ_R} Σ λᵢ⁻¹.
TraceBounds bound_trace_S(Index n, double condition_ratio);

/// KL(q‖p) ≤ ½ max_{Λ_R}[n log((1/n) Σ λᵢ⁻¹) + Σ log λᵢ], solved over the
/// normalized inverse spectrum ωᵢ = λᵢ⁻¹ / Σ λⱼ⁻¹. The returned profile is
/// mapped back to eigenvalues. Requires n ≥ 2.
BoundResult bound_kl_joint(Index n, double condition_ratio);

/// All bounds at one (n, R). Requires n ≥ 2.
BoundsReport compute_bounds(Index n, double condition_ratio);

/// One report per grid value. The grid must be strictly ascending with every
/// value ≥ 1.
std::vector<BoundsReport> envelope_sweep(Index n, std::span<const double> condition_grid);

}  // namespace fgvi

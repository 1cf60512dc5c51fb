#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fgvi/bounds.hpp"
#include "fgvi/errors.hpp"
#include "fgvi/gaussian_core.hpp"
#include "fgvi/generators.hpp"
#include "oracles.hpp"

using namespace fgvi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr int kGridPoints = 200001;

}  // namespace

TEST_CASE("EigenProfile invariants", "[bounds]") {
  Vector ok(3);
  ok << 1.6, 1.0, 0.4;
  CHECK_NOTHROW(EigenProfile(ok, 4.0));
  CHECK_THROWS_AS(EigenProfile(ok, 3.0), DomainError);

  Vector unsorted(3);
  unsorted << 1.0, 1.6, 0.4;
  CHECK_FALSE(EigenProfile::satisfies_invariants(unsorted, 4.0));

  Vector bad_sum(3);
  bad_sum << 1.6, 1.1, 0.4;
  CHECK_FALSE(EigenProfile::try_make(bad_sum, 4.0).has_value());

  Vector negative(2);
  negative << 2.5, -0.5;
  CHECK_FALSE(EigenProfile::satisfies_invariants(negative, 1.0));
}

TEST_CASE("R = 1 collapses every bound", "[bounds]") {
  for (Index n : {2, 3, 7}) {
    const BoundsReport r = compute_bounds(n, 1.0);
    CHECK_THAT(r.upper_log_det_S, WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.upper_log_det_C, WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.lower_trace_S, WithinRel(static_cast<double>(n), 1e-12));
    CHECK_THAT(r.upper_trace_S, WithinRel(static_cast<double>(n), 1e-12));
    CHECK_THAT(r.joint_kl_upper, WithinAbs(0.0, 1e-12));
    for (const auto& [name, profile] : r.maximizers) {
      INFO(name);
      CHECK((profile.values().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("bound domain errors", "[bounds]") {
  CHECK_THROWS_AS(bound_log_det_S(3, 0.5), DomainError);
  CHECK_THROWS_AS(bound_log_det_S(1, 2.0), DomainError);
  CHECK_THROWS_AS(bound_kl_joint(3, 0.99), DomainError);
  CHECK_THROWS_AS(bound_trace_S(3, std::nan("")), DomainError);
  CHECK_THROWS_AS(bound_log_det_C(1, 2.0), DomainError);
  CHECK(bound_log_det_C(1, 1.0).value == 0.0);
  const std::vector<double> descending{2.0, 1.0};
  CHECK_THROWS_AS(envelope_sweep(4, descending), DomainError);
  const std::vector<double> below_one{0.5, 2.0};
  CHECK_THROWS_AS(envelope_sweep(4, below_one), DomainError);
}

TEST_CASE("n = 2 is fully determined", "[bounds]") {
  const double r = 3.0;
  const double small = 2.0 / (1.0 + r);
  const double inv = 1.0 / small + 1.0 / (r * small);
  CHECK_THAT(bound_log_det_C(2, r).value, WithinRel(std::log(r * small * small), 1e-14));
  CHECK_THAT(bound_log_det_S(2, r).value, WithinRel(2.0 * std::log(inv / 2.0), 1e-12));
  const TraceBounds t = bound_trace_S(2, r);
  CHECK_THAT(t.lower, WithinRel(inv, 1e-12));
  CHECK_THAT(t.upper, WithinRel(inv, 1e-12));
}

TEST_CASE("n = 10, R = 11 dominates the eps = 0.5 constant matrix", "[bounds]") {
  const double log_c = 9.0 * std::log(0.5) + std::log(5.5);
  CHECK(bound_log_det_C(10, 11.0).value >= log_c);
  const double trace = 10.0 * (1.0 + 8 * 0.5) / ((1.0 - 0.5) * (1.0 + 9 * 0.5));
  const TraceBounds t = bound_trace_S(10, 11.0);
  CHECK(t.lower <= trace);
  CHECK(trace <= t.upper);
  const auto closed = constant_offdiag_closed_forms(10, 0.5);
  CHECK(bound_log_det_S(10, 11.0).value >= closed.log_det_S);
  CHECK(bound_kl_joint(10, 11.0).value >= 0.5 * (closed.log_det_S + closed.log_det_C));
}

TEST_CASE("bounds match dense grid-search oracles", "[bounds][oracle]") {
  for (Index n : {3, 4, 5, 8}) {
    for (double r : {1.5, 2.0, 4.0, 5.0, 10.0, 100.0}) {
      INFO("n = " << n << ", R = " << r);
      const double nd = static_cast<double>(n);

      const auto inv_max = oracle::split_grid(n, r, kGridPoints, oracle::inverse_sum, true);
      CHECK_THAT(bound_log_det_S(n, r).value, WithinAbs(nd * std::log(inv_max.value / nd), 1e-4));

      const auto logc = oracle::interior_grid(n, r, kGridPoints, oracle::log_sum, true);
      CHECK_THAT(bound_log_det_C(n, r).value, WithinAbs(logc.value, 1e-6));

      const auto inv_min = oracle::interior_grid(n, r, kGridPoints, oracle::inverse_sum, false);
      const TraceBounds t = bound_trace_S(n, r);
      CHECK_THAT(t.lower, WithinAbs(inv_min.value, 1e-4));
      CHECK_THAT(t.upper, WithinAbs(inv_max.value, 1e-4));

      const auto joint = oracle::split_grid(n, r, kGridPoints, oracle::joint_objective, true);
      CHECK_THAT(bound_kl_joint(n, r).value, WithinAbs(joint.value, 1e-4));
    }
  }
}

TEST_CASE("no vertex or random point of the relaxed set beats a bound", "[bounds][oracle]") {
  std::mt19937_64 gen(17);
  for (Index n : {3, 5, 12}) {
    for (double r : {1.5, 10.0, 300.0}) {
      INFO("n = " << n << ", R = " << r);
      const BoundsReport b = compute_bounds(n, r);
      const double nd = static_cast<double>(n);
      const double slack = 1e-9;
      auto check = [&](const Vector& v) {
        const double inv = oracle::inverse_sum(v);
        CHECK(nd * std::log(inv / nd) <= b.upper_log_det_S + slack);
        CHECK(oracle::log_sum(v) <= b.upper_log_det_C + slack);
        CHECK(inv >= b.lower_trace_S - slack * nd);
        CHECK(inv <= b.upper_trace_S + slack * nd);
        CHECK(oracle::joint_objective(v) <= b.joint_kl_upper + slack);
      };
      for (const Vector& v : oracle::vertices(n, r)) check(v);
      for (int i = 0; i < 2000; ++i) check(oracle::random_profile(n, r, gen));
    }
  }
}

TEST_CASE("extremal profiles sit on the edges or have equal interiors", "[bounds][structure]") {
  for (Index n : {3, 4, 6, 10, 25}) {
    for (double r : {1.2, 2.0, 7.0, 50.0, 1000.0}) {
      INFO("n = " << n << ", R = " << r);
      const BoundsReport b = compute_bounds(n, r);
      for (const char* key : {"log_det_S", "trace_S_upper", "kl_joint"}) {
        INFO(key);
        CHECK(b.maximizers.at(key).off_edge_count(1e-9) <= 1);
      }
      for (const char* key : {"log_det_C", "trace_S_lower"}) {
        INFO(key);
        const Vector& v = b.maximizers.at(key).values();
        const Vector inner = v.segment(1, n - 2);
        CHECK(inner.maxCoeff() - inner.minCoeff() <= 1e-12 * v(0));
      }
      for (const auto& [name, p] : b.maximizers) {
        INFO(name);
        CHECK(EigenProfile::satisfies_invariants(p.values(), r));
        CHECK(p.condition_ratio() == r);
      }
    }
  }
}

TEST_CASE("joint KL bound is tighter than the separate envelopes", "[bounds]") {
  for (Index n : {2, 3, 5, 10, 100}) {
    for (double r : {1.0, 1.01, 2.0, 11.0, 1e4}) {
      INFO("n = " << n << ", R = " << r);
      const BoundsReport b = compute_bounds(n, r);
      CHECK(b.joint_kl_upper <= b.separate_kl_upper + 1e-12);
      CHECK(b.upper_log_det_C <= 1e-12);
      if (r > 1.0 && n >= 3) CHECK(b.joint_kl_upper < b.separate_kl_upper);
    }
  }
}

TEST_CASE("bounds dominate measured quantities on random correlation matrices",
          "[bounds][property]") {
  for (Index n : {3, 10}) {
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      const CorrelationMatrix c = random_correlation_matrix(n, seed);
      const GaussianTarget t(c.matrix());
      const FactorizedGaussian q = fgvi_solve(t);
      const DecompositionReport d = decompose(t, q);
      const double trace = shrinkage_matrix(t, q).trace();
      const BoundsReport b = compute_bounds(n, std::max(1.0, d.condition_number));
      CHECK(d.log_det_S <= b.upper_log_det_S + 1e-6);
      CHECK(d.log_det_C <= b.upper_log_det_C + 1e-6);
      CHECK(trace >= b.lower_trace_S - 1e-6);
      CHECK(trace <= b.upper_trace_S + 1e-6);
      CHECK(d.kl_q_p <= b.joint_kl_upper + 1e-6);
    }
  }
}

TEST_CASE("envelope_sweep", "[bounds]") {
  const std::vector<double> one{1.0};
  const auto single = envelope_sweep(10, one);
  REQUIRE(single.size() == 1);
  CHECK_THAT(single[0].upper_log_det_S, WithinAbs(0.0, 1e-12));
  CHECK_THAT(single[0].joint_kl_upper, WithinAbs(0.0, 1e-12));

  for (Index n : {10, 100}) {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(1000.0, i / 40.0));
    const auto rows = envelope_sweep(n, grid);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].condition_ratio == grid[i]);
      CHECK(rows[i].upper_log_det_S >= rows[i - 1].upper_log_det_S);
      CHECK(rows[i].upper_log_det_C <= rows[i - 1].upper_log_det_C);
      CHECK(rows[i].joint_kl_upper >= rows[i - 1].joint_kl_upper - 1e-12);
    }
  }
}

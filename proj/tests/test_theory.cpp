// Copyright 2026 The sppm-phi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "sppm/algorithms.hpp"
#include "sppm/error.hpp"
#include "sppm/theory.hpp"

namespace sppm {
namespace {

TEST(Phi, ExpForm) {
  const PhiSpec phi = PhiSpec::exp_l0l1(2.0, 0.5);
  EXPECT_DOUBLE_EQ(phi_eval(phi, 1.0, 3.0), (2.0 + 1.5) * std::exp(0.5));
  EXPECT_THROW(PhiSpec::exp_l0l1(-1.0, 0.0), InvalidArgument);
  EXPECT_THROW(phi_eval(phi, -1.0, 0.0), InvalidArgument);
}

TEST(Phi, AlphaZeroIsConstant) {
  const PhiSpec phi = PhiSpec::alpha_sym(1.5, 0.75, 0.0);
  for (double r : {0.0, 0.3, 7.0})
    for (double g : {0.0, 2.0, 100.0}) EXPECT_EQ(phi_eval(phi, r, g), 2.0 * 1.5 + 2.0 * 0.75);
}

TEST(Phi, AlphaOneRejected) {
  EXPECT_THROW(PhiSpec::alpha_sym(1.0, 1.0, 1.0), InvalidArgument);
}

TEST(Phi, MonotoneOnGrid) {
  const std::vector<PhiSpec> specs = {PhiSpec::exp_l0l1(1.0, 2.0), PhiSpec::alpha_sym(1.0, 2.0, 0.5),
                                      PhiSpec::alpha_sym(0.3, 1.0, 0.9),
                                      PhiSpec::empirical({1.0, 2.0}, {1.0, 3.0}, {4.0, 1.0, 2.0, 0.5})};
  for (const PhiSpec& phi : specs) {
    for (int a = 0; a < 20; ++a) {
      for (int b = 0; b < 20; ++b) {
        const double r = 0.1 * a, g = 0.1 * b;
        const double v = phi_eval(phi, r, g);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, phi_eval(phi, r + 0.1, g));
        EXPECT_LE(v, phi_eval(phi, r, g + 0.1));
      }
    }
  }
}

TEST(Phi, EmpiricalClosedUnderMaxima) {
  const PhiSpec phi = PhiSpec::empirical({1.0, 2.0}, {1.0, 3.0}, {4.0, 1.0, 2.0, 0.5});
  EXPECT_EQ(phi_eval(phi, 2.0, 3.0), 4.0);
  EXPECT_TRUE(std::isinf(phi_eval(phi, 5.0, 0.0)));
}

TEST(Bregman, MatchesDirectFormula) {
  const std::vector<ProblemInstance> ps = {make_power_norm(10, 4, 3, 1), make_regularized_power_norm(6, 6, 2, 2.0, 1),
                                           make_shifted_quadratic(10, 4, 1.0, 1)};
  CounterStream rng(3, 99);
  for (const auto& p : ps) {
    for (int m = 0; m < 200; ++m) {
      const std::size_t i = rng.index(p.num_components());
      const Vector x = rng.uniform() * rng.unit_vector(p.dimension());
      const Vector y = rng.uniform() * rng.unit_vector(p.dimension());
      const double direct = p.eval_component(i, x) - p.eval_component(i, y) - p.grad_component(i, y).dot(x - y);
      EXPECT_NEAR(bregman(p, i, x, y), direct, 1e-12);
      EXPECT_GE(bregman(p, i, x, y), 0.0);
    }
  }
}

TEST(PhiDescent, HoldsWithKnownConstantsInUnitBall) {
  const ProblemInstance p = make_power_norm(20, 5, 2, 1);
  const PhiSpec phi = PhiSpec::exp_l0l1(*p.known_constants().L0, *p.known_constants().L1);
  CounterStream rng(4, 99);
  for (int m = 0; m < 2000; ++m) {
    const Vector x = rng.uniform() * rng.unit_vector(5);
    const Vector y = rng.uniform() * rng.unit_vector(5);
    EXPECT_TRUE(check_phi_descent(p, phi, rng.index(20), x, y).holds);
  }
}

TEST(PhiDescent, FailsWhenPhiTooSmall) {
  const ProblemInstance p = make_shifted_quadratic(5, 3, 1.0, 1);
  const PhiSpec phi = PhiSpec::exp_l0l1(0.5, 0.0);
  const auto chk = check_phi_descent(p, phi, 0, Vector::Ones(3), Vector::Zero(3));
  EXPECT_FALSE(chk.holds);
  EXPECT_NEAR(chk.lhs, 1.5, 1e-15);
}

TEST(Estimators, SigmaStarClosedForm) {
  const ProblemInstance q = make_shifted_quadratic(40, 6, 2.0, 5);
  EXPECT_NEAR(estimate_sigma_star(q, q.minimizer()), *q.known_constants().sigma_star_sq, 1e-12);
  const ProblemInstance p = make_power_norm(40, 6, 2, 5);
  EXPECT_EQ(estimate_sigma_star(p, p.minimizer()), 0.0);
}

TEST(Estimators, DeltaStarVanishesForSharedCurvature) {
  const ProblemInstance q = make_shifted_quadratic(40, 6, 2.0, 5);
  EXPECT_LE(estimate_delta_star(q, q.minimizer(), 200, 5.0, 1), 1e-10);
  const ProblemInstance p = make_power_norm(40, 6, 2, 5);
  EXPECT_GT(estimate_delta_star(p, p.minimizer(), 50, 2.0, 1), 0.0);
}

TEST(Estimators, L0L1WithinKnownConstants) {
  const ProblemInstance p = make_power_norm(50, 5, 2, 5);
  const L0L1Estimate e = estimate_l0l1(p, 2000, 1.0, 3);
  EXPECT_EQ(e.residual_violation, 0.0);
  EXPECT_LE(e.L0_hat + e.L1_hat, *p.known_constants().L0 + *p.known_constants().L1 + 0.05);
}

TEST(Bounds, SublinearValue) {
  BoundParams bp;
  bp.gamma = 2.0;
  bp.phi_value = 3.0;
  bp.r0_sq = 4.0;
  const BoundCurve c = bound_curve(Theorem::T43Convex, bp);
  EXPECT_TRUE(c.sublinear());
  EXPECT_DOUBLE_EQ(c.value(10), (3.0 + 1.0) / 20.0 * 4.0);
  bp.c = 0.5;
  EXPECT_DOUBLE_EQ(bound_curve(Theorem::T44Convex, bp).value(10), 2.0 * (3.0 + 1.0) / 20.0 * 4.0);
}

TEST(Bounds, ContractionFactors) {
  BoundParams bp;
  bp.gamma = 1.0;
  bp.mu = 0.5;
  bp.phi_value = 2.0;
  bp.r0_sq = 1.0;
  EXPECT_DOUBLE_EQ(bound_curve(Theorem::T43Strong, bp).factor(), 1.0 - 0.5 / 4.0);
  bp.c = 0.2;
  EXPECT_DOUBLE_EQ(bound_curve(Theorem::T44Strong, bp).factor(), 1.0 - 0.8 * 0.5 / 4.0);
  EXPECT_DOUBLE_EQ(bound_curve(Theorem::T51, bp).factor(), 1.0 - 0.125);
  EXPECT_DOUBLE_EQ(bound_curve(Theorem::T52, bp).factor(), 1.0 - 0.125);
  bp.sigma_star_sq = 0.3;
  const BoundCurve t53 = bound_curve(Theorem::T53, bp);
  EXPECT_DOUBLE_EQ(t53.factor(), 1.0 - 0.5 * 0.25);
  EXPECT_DOUBLE_EQ(t53.neighborhood(), 4.0 * 4.0 * 0.3);
  const BoundCurve t54 = bound_curve(Theorem::T54, bp);
  EXPECT_DOUBLE_EQ(t54.factor(), 1.0 - 0.25 * 0.5);
  EXPECT_DOUBLE_EQ(t54.neighborhood(), 2.0 * 8.0 * 0.3 / 0.8);
  EXPECT_DOUBLE_EQ(t54.value(2), std::pow(t54.factor(), 2) + t54.neighborhood());
}

TEST(Bounds, PreconditionsEnforced) {
  BoundParams bp;
  bp.gamma = 1.0;
  bp.mu = 0.5;
  bp.delta_star = 1.0;
  EXPECT_THROW(bound_curve(Theorem::T51, bp), PreconditionViolated);  // cap 0.25
  bp.gamma = 0.2;
  EXPECT_NO_THROW(bound_curve(Theorem::T51, bp));
  bp.c = 1.0;
  EXPECT_THROW(bound_curve(Theorem::T52, bp), PreconditionViolated);
  bp.c = 0.0;
  bp.mu = 0.0;
  EXPECT_THROW(bound_curve(Theorem::T43Strong, bp), PreconditionViolated);
}

Trajectory synthetic(std::vector<double> dist, std::vector<double> step = {}) {
  Trajectory t;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    IterateRecord r;
    r.k = j;
    r.dist_sq = dist[j];
    r.gap = dist[j];
    r.step_norm_sq = step.empty() ? 0.0 : step[j];
    t.records.push_back(r);
  }
  return t;
}

TEST(Checks, MonotonicityFlagsIncreaseAndLongStep) {
  EXPECT_TRUE(check_monotonicity(synthetic({1.0, 0.5, 0.5, 0.1})).passed());
  const auto rep = check_monotonicity(synthetic({1.0, 0.5, 0.6}, {0.1, 2.0, 0.0}));
  ASSERT_EQ(rep.violations.size(), 2u);
}

TEST(Checks, AverageAndDominance) {
  const std::vector<Trajectory> runs = {synthetic({1.0, 0.5, 0.25}), synthetic({1.0, 0.3, 0.09})};
  const AveragedTrajectory avg = average_trajectories(runs);
  EXPECT_DOUBLE_EQ(avg.mean_dist_sq[1], 0.4);
  EXPECT_DOUBLE_EQ(avg.median_dist_sq[2], 0.17);
  EXPECT_DOUBLE_EQ(avg.mean_uniform_gap[2], (0.75 + 0.65) / 2.0);
  BoundParams bp;
  bp.mu = 1.5;
  bp.gamma = 1.0;
  bp.r0_sq = 1.0;
  bp.phi_value = 0.0;
  const BoundCurve curve = bound_curve(Theorem::T43Strong, bp);  // factor 1/4
  const DominanceReport rep = check_bound_dominance(avg, curve, 1.0);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.violations.front(), 1u);
  EXPECT_THROW(average_trajectories(std::vector<Trajectory>{synthetic({1.0}), synthetic({1.0, 0.5})}),
               InvalidArgument);
}

TEST(Checks, EmpiricalContraction) {
  const std::vector<Trajectory> runs = {synthetic({1.0, 0.5, 0.25, 0.125})};
  EXPECT_NEAR(empirical_contraction(average_trajectories(runs)), 0.5, 1e-15);
}

}  // namespace
}  // namespace sppm

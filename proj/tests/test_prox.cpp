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

#include "oracles.hpp"
#include "sppm/error.hpp"
#include "sppm/prox.hpp"
#include "sppm/rng.hpp"

namespace sppm {
namespace {

std::vector<ProblemInstance> families() {
  return {make_power_norm(20, 6, 2, 3), make_power_norm(20, 6, 4, 3),
          make_regularized_power_norm(8, 8, 3, 2.0, 3), make_shifted_quadratic(20, 6, 2.0, 3)};
}

TEST(ProxExactRadial, ScalarQuarticExample) {
  const ProblemInstance p = make_power_norm_with(Vector::Ones(1), 2, 2);
  Vector c(2);
  c << 1.0, 0.0;
  const ProxResult r = prox_exact_radial({p, 0, c, 1.0});
  const double ref = oracles::bisect([](double t) { return t + 4.0 * t * t * t - 1.0; }, 0.0, 1.0);
  EXPECT_NEAR(ref, 0.5, 1e-15);
  EXPECT_NEAR(r.point[0], 0.5, 1e-14);
  EXPECT_EQ(r.point[1], 0.0);
  EXPECT_NEAR(r.point[0] + 4.0 * std::pow(r.point[0], 3), 1.0, 1e-14);
  EXPECT_TRUE(r.certified_exact);
}

TEST(ProxExactRadial, OriginIsFixed) {
  for (const auto& p : families()) {
    if (!p.interpolating()) continue;
    const ProxResult r = prox_exact_radial({p, 0, Vector::Zero(p.dimension()), 1.0});
    EXPECT_EQ(r.point, Vector::Zero(p.dimension()));
  }
}

TEST(ProxExactRadial, TinyStepIsNearIdentity) {
  CounterStream rng(2, 99);
  for (const auto& p : families()) {
    const Vector c = 3.0 * rng.unit_vector(p.dimension());
    const ProxResult r = prox_exact_radial({p, 1, c, 1e-12});
    EXPECT_LE((r.point - c).norm(), 1e-8 * c.norm());
  }
}

TEST(ProxExactRadial, ShiftedQuadraticClosedForm) {
  const ProblemInstance p = make_shifted_quadratic_with({Vector::Constant(2, 2.0), Vector::Zero(2)});
  const ProxResult r = prox_exact_radial({p, 0, Vector::Zero(2), 1.0});
  EXPECT_NEAR(r.point[0], 1.0, 1e-15);
  EXPECT_NEAR(r.point[1], 1.0, 1e-15);
}

TEST(ProxExactRadial, AgreesWithNewtonAndCertifies) {
  CounterStream rng(7, 99);
  for (const auto& p : families()) {
    for (int m = 0; m < 200; ++m) {
      const std::size_t i = rng.index(p.num_components());
      const double gamma = std::pow(10.0, rng.uniform(-3.0, 3.0));
      const Vector c = std::pow(10.0, rng.uniform(-2.0, 2.0)) * rng.unit_vector(p.dimension());
      const ProxQuery q{p, i, c, gamma};
      const ProxResult r = prox_exact_radial(q);
      ASSERT_TRUE(r.certified_exact);
      EXPECT_LE(fixed_point_residual(q, r.point), 1e-10 * (1.0 + c.norm()));
      const Vector ref = oracles::newton_prox(p, i, c, gamma);
      EXPECT_LE((r.point - ref).norm(), 1e-6 * (1.0 + ref.norm())) << to_string(p.kind());
    }
  }
}

TEST(ProxOracle, InnerSolveRouteMatchesClosedForm) {
  CounterStream rng(8, 99);
  for (const auto& p : families()) {
    for (int m = 0; m < 20; ++m) {
      const std::size_t i = rng.index(p.num_components());
      const Vector c = 2.0 * rng.unit_vector(p.dimension());
      const ProxQuery q{p, i, c, 0.5};
      const ProxResult a = prox_oracle(q);
      const ProxResult b = prox_oracle(q, ProxRoute::InnerSolve);
      EXPECT_TRUE(b.certified_exact);
      EXPECT_LE((a.point - b.point).norm(), 1e-9 * (1.0 + c.norm()));
    }
  }
}

TEST(ProxOracle, FailsLoudlyWhenCapTooSmall) {
  const ProblemInstance p = make_power_norm(5, 4, 3, 1);
  EXPECT_THROW(prox_by_inner_solve({p, 0, Vector::Constant(4, 5.0), 10.0}, 2), OracleFailure);
}

TEST(ProxInexact, FixedModeRunsExactlyT) {
  const ProblemInstance p = make_power_norm(5, 4, 2, 1);
  const ProxResult r = prox_inexact({p, 2, Vector::Constant(4, 2.0), 1.0}, InnerSolverConfig::fixed(7));
  EXPECT_EQ(r.inner_iterations_used, 7);
  EXPECT_EQ(r.psi_values.size(), 8u);
}

TEST(ProxInexact, PsiTraceNonincreasing) {
  CounterStream rng(4, 99);
  for (const auto& p : families()) {
    const Vector c = 4.0 * rng.unit_vector(p.dimension());
    const ProxResult r = prox_inexact({p, 0, c, 2.0}, InnerSolverConfig::fixed(50));
    for (std::size_t j = 1; j < r.psi_values.size(); ++j) EXPECT_LE(r.psi_values[j], r.psi_values[j - 1]);
  }
}

TEST(ProxInexact, ToleranceModeMeetsEps) {
  const ProblemInstance p = make_power_norm(5, 4, 3, 1);
  const ProxResult r =
      prox_inexact({p, 1, Vector::Constant(4, 1.5), 1.0}, InnerSolverConfig::gradient_tolerance(1e-12));
  EXPECT_LE(r.final_psi_grad_sq, 1e-12);
}

TEST(ProxInexact, ToleranceAlreadyMetAtCenter) {
  const ProblemInstance p = make_power_norm(5, 4, 2, 1);
  const ProxResult r =
      prox_inexact({p, 1, Vector::Zero(4), 1.0}, InnerSolverConfig::gradient_tolerance(1e-12));
  EXPECT_EQ(r.inner_iterations_used, 0);
}

TEST(ProxInexact, ExactModeDelegatesToOracle) {
  const ProblemInstance p = make_power_norm(5, 4, 2, 1);
  const ProxResult r = prox_inexact({p, 1, Vector::Constant(4, 1.0), 1.0}, InnerSolverConfig::exact());
  EXPECT_TRUE(r.certified_exact);
}

TEST(ProxInexact, FixedStepCanDiverge) {
  const ProblemInstance p = make_power_norm(5, 4, 3, 1);
  InnerSolverConfig cfg = InnerSolverConfig::fixed(200);
  cfg.step_policy = StepPolicy::Fixed;
  cfg.fixed_step = 10.0;
  EXPECT_THROW(prox_inexact({p, 0, Vector::Constant(4, 10.0), 1.0}, cfg), InnerDivergence);
}

TEST(ProxInexact, RejectsBadQueries) {
  const ProblemInstance p = make_power_norm(5, 4, 2, 1);
  EXPECT_THROW(prox_inexact({p, 0, Vector::Zero(4), 0.0}, InnerSolverConfig::fixed(1)), InvalidArgument);
  EXPECT_THROW(prox_inexact({p, 9, Vector::Zero(4), 1.0}, InnerSolverConfig::fixed(1)), InvalidArgument);
  EXPECT_THROW(prox_inexact({p, 0, Vector::Zero(3), 1.0}, InnerSolverConfig::fixed(1)), InvalidArgument);
  EXPECT_THROW(InnerSolverConfig::fixed(0).validate(), InvalidArgument);
  EXPECT_THROW(InnerSolverConfig::gradient_tolerance(0.0).validate(), InvalidArgument);
}

TEST(Inexactness, ConditionAndConstant) {
  const ProblemInstance p = make_power_norm(5, 4, 2, 1);
  const ProxQuery q{p, 0, Vector::Constant(4, 1.0), 1.0};
  const ProxResult exact = prox_oracle(q);
  const ProxResult approx = prox_inexact(q, InnerSolverConfig::fixed(20));
  const InexactnessCheck chk = verify_inexactness(approx, exact, q.center, 1.0, 1.0);
  const double dist_sq = (q.center - exact.point).squaredNorm();
  EXPECT_NEAR(chk.measured_ratio, approx.final_psi_grad_sq * 20.0 / dist_sq, 1e-15);
  EXPECT_EQ(chk.holds, approx.final_psi_grad_sq <= dist_sq / 20.0);
  EXPECT_DOUBLE_EQ(inexactness_constant(2.0, 0.5, 4, 1.0), 2.0 * 0.25 / 4.0);
}

}  // namespace
}  // namespace sppm

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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "sppm/error.hpp"
#include "sppm/problems.hpp"

namespace sppm {

/// One proximal subproblem
///   Psi(x) = f_i(x) + |x - center|^2 / (2 gamma).
struct ProxQuery {
  const ProblemInstance& problem;
  std::size_t component;
  Vector center;
  double gamma;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
    if (component >= problem.num_components())
      throw InvalidArgument("component index out of range");
    if (center.size() != problem.dimension()) throw InvalidArgument("center has wrong dimension");
    if (!center.allFinite()) throw InvalidArgument("center has non-finite entries");
  }
};

enum class InnerMode { FixedIterations, GradientTolerance, Exact };
enum class StepPolicy { Backtracking, Fixed };

struct InnerSolverConfig {
  InnerMode mode = InnerMode::Exact;
  int iterations = 1;          // T, FixedIterations only
  double tolerance = 1e-12;    // bound on |grad Psi|^2, GradientTolerance only
  int max_iterations = 100000;
  StepPolicy step_policy = StepPolicy::Backtracking;
  double shrink = 0.5;
  double slope = 1e-4;
  double fixed_step = 1.0;

  static InnerSolverConfig fixed(int T) {
    InnerSolverConfig c;
    c.mode = InnerMode::FixedIterations;
    c.iterations = T;
    c.max_iterations = std::max(T, 1);
    return c;
  }
  static InnerSolverConfig gradient_tolerance(double eps, int max_iterations = 100000) {
    InnerSolverConfig c;
    c.mode = InnerMode::GradientTolerance;
    c.tolerance = eps;
    c.max_iterations = max_iterations;
    return c;
  }
  static InnerSolverConfig exact() { return {}; }

  void validate() const {
    if (max_iterations < 1) throw InvalidArgument("inner safety cap must be >= 1");
    if (mode == InnerMode::FixedIterations && iterations < 1)
      throw InvalidArgument("inner iteration count T must be >= 1");
    if (mode == InnerMode::GradientTolerance && !(tolerance > 0.0))
      throw InvalidArgument("inner tolerance must be positive");
    if (step_policy == StepPolicy::Backtracking) {
      if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("shrink must lie in (0, 1)");
      if (!(slope > 0.0 && slope < 1.0)) throw InvalidArgument("slope must lie in (0, 1)");
    } else if (!(fixed_step > 0.0)) {
      throw InvalidArgument("fixed inner step must be positive");
    }
  }

  bool operator==(const InnerSolverConfig&) const = default;
};

struct ProxResult {
  Vector point;
  int inner_iterations_used = 0;
  double final_psi_grad_sq = 0.0;
  std::vector<double> psi_values;
  bool certified_exact = false;
  // |point + gamma grad f_i(point) - center|
  double fixed_point_residual = 0.0;
  // Line search could not make progress before the stopping rule fired.
  bool stalled = false;
};

inline constexpr double kCertifyTolerance = 1e-10;

inline double psi_value(const ProxQuery& q, const Vector& x) {
  return q.problem.eval_component(q.component, x) + (x - q.center).squaredNorm() / (2.0 * q.gamma);
}

inline Vector psi_gradient(const ProxQuery& q, const Vector& x) {
  return q.problem.grad_component(q.component, x) + (x - q.center) / q.gamma;
}

inline double fixed_point_residual(const ProxQuery& q, const Vector& x) {
  return (x + q.gamma * q.problem.grad_component(q.component, x) - q.center).norm();
}

inline bool is_certified(const ProxQuery& q, double residual) {
  return residual <= kCertifyTolerance * (1.0 + q.center.norm());
}

namespace detail {

// Psi(x_new) - Psi(x_old) without forming either value.
inline double psi_difference(const ProxQuery& q, const Vector& x_new, const Vector& x_old) {
  return q.problem.component_difference(q.component, x_new, x_old) +
         (x_new - x_old).dot(x_new + x_old - 2.0 * q.center) / (2.0 * q.gamma);
}

inline ProxResult finish_closed_form(const ProxQuery& q, Vector point) {
  ProxResult r;
  const double psi0 = psi_value(q, q.center);
  r.psi_values = {psi0, psi0 + psi_difference(q, point, q.center)};
  r.point = std::move(point);
  r.fixed_point_residual = fixed_point_residual(q, r.point);
  r.final_psi_grad_sq = std::pow(r.fixed_point_residual / q.gamma, 2);
  r.certified_exact = is_certified(q, r.fixed_point_residual);
  if (!r.certified_exact)
    throw OracleFailure("closed-form prox failed its fixed-point certificate");
  return r;
}

}  // namespace detail

/// Root of a continuous increasing function on [lo, hi] with h(lo) <= 0 <= h(hi).
/// `h` returns {value, derivative}. Newton steps from the right end, falling
/// back to bisection whenever a step leaves the bracket or fails to halve
/// the previous step.
template <class F>
double solve_increasing_root(F&& h, double lo, double hi, double tol, int max_iterations = 200) {
  double x = hi;
  double prev_step = hi - lo;
  double step = prev_step;
  for (int it = 0; it < max_iterations; ++it) {
    const auto [value, slope] = h(x);
    if (std::abs(value) <= tol) return x;
    if (value > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = slope > 0.0 ? x - value / slope : lo;
    const double newton_step = std::abs(next - x);
    if (!(next > lo && next < hi) || newton_step > 0.5 * std::abs(prev_step)) {
      next = 0.5 * (lo + hi);
      prev_step = step;
      step = hi - lo;
    } else {
      prev_step = step;
      step = newton_step;
    }
    if (next == x || !(hi > lo)) return x;
    x = next;
  }
  return x;
}

/// Exact prox through a one-dimensional reduction.
///
/// PowerNorm: the minimizer is (r/|c|) c where r + 2 s gamma a_i r^{2s-1} = |c|.
/// RegularizedPowerNorm: with u = |x|^2 and beta = 2 s gamma a_i, every
///   coordinate satisfies x_j (1 + beta u^{s-1} + 2 gamma lambda [j = i]) = c_j,
///   so u solves a scalar decreasing equation on [0, |c|^2].
/// ShiftedQuadratic: (c + gamma b_i) / (1 + gamma).
inline ProxResult prox_exact_radial(const ProxQuery& q) {
  q.validate();
  const ProblemInstance& p = q.problem;
  const Vector& c = q.center;
  const double c_norm = c.norm();
  const auto i = static_cast<Eigen::Index>(q.component);

  switch (p.kind()) {
    case ProblemKind::ShiftedQuadratic:
      return detail::finish_closed_form(q, (c + q.gamma * p.shifts()[q.component]) / (1.0 + q.gamma));

    case ProblemKind::PowerNorm: {
      if (c_norm == 0.0) return detail::finish_closed_form(q, Vector::Zero(c.size()));
      const int s = p.power();
      const double beta = 2.0 * s * q.gamma * p.coefficients()[i];
      auto h = [&](double r) {
        const double r_pow = detail::ipow(r, 2 * s - 2);
        return std::pair{r + beta * r_pow * r - c_norm, 1.0 + beta * (2 * s - 1) * r_pow};
      };
      const double r = solve_increasing_root(h, 0.0, c_norm, 1e-14 * (1.0 + c_norm));
      return detail::finish_closed_form(q, (r / c_norm) * c);
    }

    case ProblemKind::RegularizedPowerNorm: {
      if (c_norm == 0.0) return detail::finish_closed_form(q, Vector::Zero(c.size()));
      const int s = p.power();
      const double beta = 2.0 * s * q.gamma * p.coefficients()[i];
      const double extra = 2.0 * q.gamma * p.lambda();
      const double ci_sq = c[i] * c[i];
      const double rest_sq = std::max(c.squaredNorm() - ci_sq, 0.0);
      // g(u) = u - sum_j x_j(u)^2 is increasing; its root is |x|^2.
      auto g = [&](double u) {
        const double w = beta * detail::ipow(u, s - 1);
        const double dw = beta * (s - 1) * detail::ipow(u, s - 2);
        const double den_rest = 1.0 + w;
        const double den_i = 1.0 + w + extra;
        const double value = u - rest_sq / (den_rest * den_rest) - ci_sq / (den_i * den_i);
        const double slope = 1.0 + 2.0 * rest_sq * dw / (den_rest * den_rest * den_rest) +
                             2.0 * ci_sq * dw / (den_i * den_i * den_i);
        return std::pair{value, slope};
      };
      const double c_sq = c.squaredNorm();
      // Run to machine precision; the map x(u) amplifies errors in u.
      const double u = solve_increasing_root(g, 0.0, c_sq, 0.0);
      const double w = beta * detail::ipow(u, s - 1);
      Vector x = c / (1.0 + w);
      x[i] = c[i] / (1.0 + w + extra);
      return detail::finish_closed_form(q, std::move(x));
    }
  }
  throw UnsupportedKind("no closed-form prox for this problem kind; use prox_oracle");
}

namespace detail {

struct DescentLimits {
  std::optional<double> grad_sq_tolerance;
  int step_limit = 0;
};

// Gradient descent on Psi from the warm start x = center. The gradient
// tolerance is tested before the step limit at every iterate.
inline ProxResult inner_descent(const ProxQuery& q, const InnerSolverConfig& cfg,
                                const DescentLimits& limits) {
  const ProblemInstance& p = q.problem;
  ProxResult r;
  Vector x = q.center;
  Vector grad(x.size());
  Vector trial(x.size());
  p.grad_component_into(q.component, x, grad);  // center term vanishes at x = center
  double grad_sq = grad.squaredNorm();
  r.psi_values.push_back(psi_value(q, x));

  int steps = 0;
  while (true) {
    if (limits.grad_sq_tolerance && grad_sq <= *limits.grad_sq_tolerance) break;
    if (steps >= limits.step_limit) break;

    double delta = 0.0;
    if (cfg.step_policy == StepPolicy::Backtracking) {
      double t = q.gamma;
      bool accepted = false;
      for (int shrinks = 0; shrinks < 1100; ++shrinks) {
        trial.noalias() = x - t * grad;
        delta = psi_difference(q, trial, x);
        if (std::isfinite(delta) && delta <= -cfg.slope * t * grad_sq) {
          accepted = true;
          break;
        }
        t *= cfg.shrink;
        if (t == 0.0) break;
      }
      if (!accepted || trial == x) {
        r.stalled = true;
        break;
      }
    } else {
      trial.noalias() = x - cfg.fixed_step * grad;
      delta = psi_difference(q, trial, x);
      if (!std::isfinite(delta) || !trial.allFinite())
        throw InnerDivergence("inner solver produced a non-finite subproblem value");
    }

    x.swap(trial);
    r.psi_values.push_back(r.psi_values.back() + delta);
    p.grad_component_into(q.component, x, grad);
    grad += (x - q.center) / q.gamma;
    grad_sq = grad.squaredNorm();
    ++steps;
  }

  r.inner_iterations_used = steps;
  r.final_psi_grad_sq = grad_sq;
  r.fixed_point_residual = fixed_point_residual(q, x);
  r.certified_exact = is_certified(q, r.fixed_point_residual);
  r.point = std::move(x);
  return r;
}

}  // namespace detail

/// High-accuracy prox by inner gradient descent, stopped once the
/// fixed-point residual gamma |grad Psi| is a decade below the certificate.
inline ProxResult prox_by_inner_solve(const ProxQuery& q, int max_iterations = 1000000) {
  q.validate();
  const double target = 0.1 * kCertifyTolerance * (1.0 + q.center.norm()) / q.gamma;
  detail::DescentLimits limits{target * target, max_iterations};
  ProxResult r = detail::inner_descent(q, InnerSolverConfig{}, limits);
  if (!r.certified_exact)
    throw OracleFailure("inner prox solve did not reach the fixed-point tolerance within " +
                        std::to_string(r.inner_iterations_used) + " iterations");
  return r;
}

enum class ProxRoute { Auto, InnerSolve };

/// Certified-exact prox: closed form when the family has one, inner solve otherwise.
inline ProxResult prox_oracle(const ProxQuery& q, ProxRoute route = ProxRoute::Auto) {
  if (route == ProxRoute::InnerSolve) return prox_by_inner_solve(q);
  try {
    return prox_exact_radial(q);
  } catch (const UnsupportedKind&) {
    return prox_by_inner_solve(q);
  }
}

/// Approximate prox by inner gradient descent, warm-started at the center.
inline ProxResult prox_inexact(const ProxQuery& q, const InnerSolverConfig& cfg) {
  q.validate();
  cfg.validate();
  switch (cfg.mode) {
    case InnerMode::Exact:
      return prox_oracle(q);
    case InnerMode::FixedIterations:
      return detail::inner_descent(q, cfg, {std::nullopt, std::min(cfg.iterations, cfg.max_iterations)});
    case InnerMode::GradientTolerance:
      return detail::inner_descent(q, cfg, {cfg.tolerance, cfg.max_iterations});
  }
  return {};
}

struct InexactnessCheck {
  bool holds = false;
  double measured_ratio = 0.0;
};

/// Tests |grad Psi(x_hat)|^2 <= eta |center - x_Psi|^2 / T^alpha.
inline InexactnessCheck verify_inexactness(const ProxResult& result, const ProxResult& exact,
                                           const Vector& center, double eta, double alpha) {
  if (!exact.certified_exact) throw InvalidArgument("reference prox is not certified exact");
  if (result.inner_iterations_used < 1) throw InvalidArgument("need at least one inner iteration");
  if (!(eta > 0.0) || !(alpha > 0.0)) throw InvalidArgument("eta and alpha must be positive");
  const double t_pow = std::pow(static_cast<double>(result.inner_iterations_used), alpha);
  const double dist_sq = (center - exact.point).squaredNorm();
  InexactnessCheck check;
  if (dist_sq == 0.0) {
    check.measured_ratio =
        result.final_psi_grad_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    check.holds = result.final_psi_grad_sq == 0.0;
    return check;
  }
  check.measured_ratio = result.final_psi_grad_sq * t_pow / dist_sq;
  check.holds = result.final_psi_grad_sq <= eta * dist_sq / t_pow;
  return check;
}

/// eta gamma^2 / T^alpha, the quantity that must stay below c < 1 for the
/// inexact convergence guarantees.
inline double inexactness_constant(double eta, double gamma, int T, double alpha) {
  return eta * gamma * gamma / std::pow(static_cast<double>(T), alpha);
}

}  // namespace sppm

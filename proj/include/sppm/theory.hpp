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
#include <concepts>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sppm/algorithms.hpp"
#include "sppm/error.hpp"
#include "sppm/problems.hpp"
#include "sppm/rng.hpp"

namespace sppm {

// ---------------------------------------------------------------------------
// phi-smoothness functions

enum class PhiForm { ExpL0L1, AlphaSym, Empirical };

/// phi(r, g) bounding |grad f(x) - grad f(y)| / |x - y| in terms of
/// r = |x - y| and g = |grad f(y)|. Nonnegative and nondecreasing in both.
struct PhiSpec {
  PhiForm form = PhiForm::ExpL0L1;
  double L0 = 0.0;
  double L1 = 0.0;
  double alpha = 0.0;
  // Empirical table: value(a, b) bounds phi on [r_grid[a-1], r_grid[a]] x [g_grid[b-1], g_grid[b]].
  std::vector<double> r_grid;
  std::vector<double> g_grid;
  std::vector<double> table;  // row-major, r_grid.size() x g_grid.size()

  static PhiSpec exp_l0l1(double L0, double L1) {
    if (!(L0 >= 0.0) || !(L1 >= 0.0)) throw InvalidArgument("L0 and L1 must be nonnegative");
    return {PhiForm::ExpL0L1, L0, L1, 0.0, {}, {}, {}};
  }

  static PhiSpec alpha_sym(double L0, double L1, double alpha) {
    if (!(L0 >= 0.0) || !(L1 >= 0.0)) throw InvalidArgument("L0 and L1 must be nonnegative");
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw InvalidArgument("alpha must lie in [0, 1); the constants blow up at alpha = 1");
    return {PhiForm::AlphaSym, L0, L1, alpha, {}, {}, {}};
  }

  /// Builds a table form; values are closed under running maxima so the
  /// result is nondecreasing along both axes.
  static PhiSpec empirical(std::vector<double> r_grid, std::vector<double> g_grid,
                           std::vector<double> values) {
    if (r_grid.empty() || g_grid.empty() || values.size() != r_grid.size() * g_grid.size())
      throw InvalidArgument("empirical phi table has inconsistent shape");
    if (!std::is_sorted(r_grid.begin(), r_grid.end()) || !std::is_sorted(g_grid.begin(), g_grid.end()))
      throw InvalidArgument("empirical phi grids must be sorted");
    const std::size_t ng = g_grid.size();
    for (std::size_t a = 0; a < r_grid.size(); ++a) {
      for (std::size_t b = 0; b < ng; ++b) {
        double& v = values[a * ng + b];
        v = std::max(v, 0.0);
        if (a > 0) v = std::max(v, values[(a - 1) * ng + b]);
        if (b > 0) v = std::max(v, values[a * ng + b - 1]);
      }
    }
    PhiSpec spec;
    spec.form = PhiForm::Empirical;
    spec.r_grid = std::move(r_grid);
    spec.g_grid = std::move(g_grid);
    spec.table = std::move(values);
    return spec;
  }

  // alpha-symmetric constants K0, K1, K2.
  double k0() const { return L0 * (std::pow(2.0, alpha * alpha / (1.0 - alpha)) + 1.0); }
  double k1() const { return L1 * std::pow(2.0, alpha * alpha / (1.0 - alpha)) * std::pow(3.0, alpha); }
  double k2() const {
    return std::pow(L1, 1.0 / (1.0 - alpha)) * std::pow(2.0, alpha * alpha / (1.0 - alpha)) *
           std::pow(3.0, alpha) * std::pow(1.0 - alpha, alpha / (1.0 - alpha));
  }
};

inline double phi_eval(const PhiSpec& spec, double r, double g) {
  if (!(r >= 0.0) || !(g >= 0.0)) throw InvalidArgument("phi arguments must be nonnegative");
  switch (spec.form) {
    case PhiForm::ExpL0L1:
      return (spec.L0 + spec.L1 * g) * std::exp(spec.L1 * r);
    case PhiForm::AlphaSym: {
      if (!(spec.alpha < 1.0)) throw InvalidArgument("alpha-symmetric phi undefined at alpha = 1");
      const double a = spec.alpha;
      return spec.k0() + spec.k1() * std::pow(g, a) + spec.k2() * std::pow(r, a / (1.0 - a));
    }
    case PhiForm::Empirical: {
      const auto ra = std::lower_bound(spec.r_grid.begin(), spec.r_grid.end(), r);
      const auto gb = std::lower_bound(spec.g_grid.begin(), spec.g_grid.end(), g);
      if (ra == spec.r_grid.end() || gb == spec.g_grid.end())
        return std::numeric_limits<double>::infinity();
      const auto a = static_cast<std::size_t>(ra - spec.r_grid.begin());
      const auto b = static_cast<std::size_t>(gb - spec.g_grid.begin());
      return spec.table[a * spec.g_grid.size() + b];
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Bregman divergence and the phi descent inequality

/// D_{f_i}(x, y) = f_i(x) - f_i(y) - <grad f_i(y), x - y>, arranged so the
/// leading terms cancel analytically rather than in floating point.
inline double bregman(const ProblemInstance& p, std::size_t i, const Vector& x, const Vector& y) {
  if (i >= p.num_components()) throw InvalidArgument("component index out of range");
  if (x.size() != p.dimension() || y.size() != p.dimension())
    throw InvalidArgument("point has wrong dimension");
  const Vector delta = x - y;
  if (p.kind() == ProblemKind::ShiftedQuadratic) return 0.5 * delta.squaredNorm();

  // a (q1^s - q0^s - 2 s q0^{s-1} <y, delta>) with q1 = |x|^2, q0 = |y|^2, and
  // q1^s - q0^s = dq S, dq = |delta|^2 + 2 <y, delta>, S = sum_j q1^j q0^{s-1-j}.
  const int s = p.power();
  const double q1 = x.squaredNorm();
  const double q0 = y.squaredNorm();
  const double dq = delta.dot(x + y);
  const double y_delta = y.dot(delta);
  double S = 0.0;
  for (int j = 0; j < s; ++j) S += detail::ipow(q1, j) * detail::ipow(q0, s - 1 - j);
  // S - s q0^{s-1} = sum_{j>=1} q0^{s-1-j} (q1^j - q0^j)
  double S_minus = 0.0;
  for (int j = 1; j < s; ++j) {
    double inner = 0.0;
    for (int m = 0; m < j; ++m) inner += detail::ipow(q1, m) * detail::ipow(q0, j - 1 - m);
    S_minus += detail::ipow(q0, s - 1 - j) * dq * inner;
  }
  const auto c = static_cast<Eigen::Index>(i);
  double d = p.coefficients()[c] * (delta.squaredNorm() * S + 2.0 * y_delta * S_minus);
  if (p.kind() == ProblemKind::RegularizedPowerNorm) d += p.lambda() * delta[c] * delta[c];
  return d;
}

struct PhiDescentCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// D_{f_i}(x, y) <= phi(|x - y|, |grad f_i(y)|) / 2 |x - y|^2.
inline PhiDescentCheck check_phi_descent(const ProblemInstance& p, const PhiSpec& spec,
                                         std::size_t i, const Vector& x, const Vector& y) {
  PhiDescentCheck c;
  const double r = (x - y).norm();
  c.lhs = bregman(p, i, x, y);
  c.rhs = r == 0.0 ? 0.0 : 0.5 * phi_eval(spec, r, p.grad_component(i, y).norm()) * r * r;
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-10);
  return c;
}

// ---------------------------------------------------------------------------
// Constant estimators

/// Anything exposing per-component gradients and their mean.
template <class P>
concept GradientOracle = requires(const P& p, std::size_t i, const Vector& x) {
  { p.num_components() } -> std::convertible_to<std::size_t>;
  { p.dimension() } -> std::convertible_to<Eigen::Index>;
  { p.grad_component(i, x) } -> std::convertible_to<Vector>;
  { p.grad_full(x) } -> std::convertible_to<Vector>;
};

/// (1/n) sum_i |grad f_i(x_star)|^2.
template <GradientOracle P>
double estimate_sigma_star(const P& p, const Vector& x_star) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.num_components(); ++i) sum += p.grad_component(i, x_star).squaredNorm();
  return sum / static_cast<double>(p.num_components());
}

/// Sampled supremum of sqrt(mean_i |grad f_i(x) - grad f(x) - grad f_i(x*)|^2 / |x - x*|^2)
/// over points x = x* + r u, u uniform on the sphere, r in [radius/100, radius].
template <GradientOracle P>
double estimate_delta_star(const P& p, const Vector& x_star, std::size_t num_points, double radius,
                           std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const std::size_t n = p.num_components();
  std::vector<Vector> grad_at_star;
  grad_at_star.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grad_at_star.push_back(p.grad_component(i, x_star));

  CounterStream rng(seed, streams::kEstimator);
  double best = 0.0;
  for (std::size_t m = 0; m < num_points; ++m) {
    const double r = radius * (0.01 + 0.99 * rng.uniform());
    const Vector x = x_star + r * rng.unit_vector(p.dimension());
    const Vector full = p.grad_full(x);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      sum += (p.grad_component(i, x) - full - grad_at_star[i]).squaredNorm();
    const double dist_sq = (x - x_star).squaredNorm();
    best = std::max(best, std::sqrt(sum / static_cast<double>(n) / dist_sq));
  }
  return best;
}

struct L0L1Estimate {
  double L0_hat = 0.0;
  double L1_hat = 0.0;
  // Largest remaining excess of the sampled ratio over the fitted bound
  // (zero unless the grid ran out).
  double residual_violation = 0.0;
  std::size_t num_pairs = 0;
};

struct L0L1Grid {
  double l1_max = 20.0;
  double l1_step = 0.05;
  double l0_step = 0.01;
  double l0_max = 1e9;
  int segment_points = 33;
};

namespace detail {

struct SmoothnessSample {
  double ratio = 0.0;    // |grad f(x) - grad f(y)| / |x - y|
  double seg_sup = 0.0;  // sup over [x, y] of |grad f(u)|, discretized
};

template <GradientOracle P>
std::vector<SmoothnessSample> sample_smoothness_pairs(const P& p, std::size_t num_pairs, double radius,
                                                      std::uint64_t seed, int segment_points) {
  CounterStream rng(seed, streams::kEstimator);
  const Eigen::Index d = p.dimension();
  std::vector<SmoothnessSample> out;
  out.reserve(num_pairs);
  for (std::size_t m = 0; m < num_pairs; ++m) {
    const std::size_t i = rng.index(p.num_components());
    const Vector x = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * rng.unit_vector(d);
    Vector y;
    if (m % 2 == 0) {
      y = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * rng.unit_vector(d);
    } else {
      // Nearby pairs probe the local curvature.
      y = x + radius * 1e-3 * rng.uniform() * rng.unit_vector(d);
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;  // no constraint
    SmoothnessSample s;
    s.ratio = (p.grad_component(i, x) - p.grad_component(i, y)).norm() / dist;
    for (int j = 0; j < segment_points; ++j) {
      const double t = static_cast<double>(j) / static_cast<double>(segment_points - 1);
      s.seg_sup = std::max(s.seg_sup, p.grad_component(i, Vector((1.0 - t) * x + t * y)).norm());
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Fits symmetric (L0, L1)-smoothness to sampled pairs in the ball of the
/// given radius. For each L1 on the grid the smallest admissible L0 (rounded
/// up to the L0 grid) is computed; the pair with the smallest L0 + L1 wins.
template <GradientOracle P>
L0L1Estimate estimate_l0l1(const P& p, std::size_t num_pairs, double radius, std::uint64_t seed,
                           const L0L1Grid& grid = {}) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const auto samples = detail::sample_smoothness_pairs(p, num_pairs, radius, seed, grid.segment_points);
  L0L1Estimate best;
  best.num_pairs = samples.size();
  double best_score = std::numeric_limits<double>::infinity();
  const int steps = static_cast<int>(std::floor(grid.l1_max / grid.l1_step + 1e-9));
  for (int j = 0; j <= steps; ++j) {
    const double l1 = j * grid.l1_step;
    double need = 0.0;
    for (const auto& s : samples) need = std::max(need, s.ratio - l1 * s.seg_sup);
    double l0 = std::ceil(need / grid.l0_step - 1e-12) * grid.l0_step;
    // Round-up can land a hair below `need` in floating point.
    while (l0 < need) l0 += grid.l0_step;
    double residual = 0.0;
    if (l0 > grid.l0_max) {
      residual = need - grid.l0_max;
      l0 = grid.l0_max;
    }
    const double score = l0 + l1 + residual * 1e6;
    if (score < best_score) {
      best_score = score;
      best.L0_hat = l0;
      best.L1_hat = l1;
      best.residual_violation = residual;
    }
  }
  return best;
}

/// Empirical phi table: for each sampled pair, the observed ratio is binned at
/// (|x - y|, |grad f(y)|) rounded up to the grids, then closed under maxima.
template <GradientOracle P>
PhiSpec estimate_phi_table(const P& p, std::vector<double> r_grid, std::vector<double> g_grid,
                           std::size_t num_pairs, double radius, std::uint64_t seed) {
  CounterStream rng(seed, streams::kEstimator);
  const Eigen::Index d = p.dimension();
  std::vector<double> values(r_grid.size() * g_grid.size(), 0.0);
  for (std::size_t m = 0; m < num_pairs; ++m) {
    const std::size_t i = rng.index(p.num_components());
    const Vector x = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * rng.unit_vector(d);
    const Vector y = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * rng.unit_vector(d);
    const double r = (x - y).norm();
    if (r == 0.0) continue;
    const Vector gy = p.grad_component(i, y);
    const double ratio = (p.grad_component(i, x) - gy).norm() / r;
    const auto ra = std::lower_bound(r_grid.begin(), r_grid.end(), r);
    const auto gb = std::lower_bound(g_grid.begin(), g_grid.end(), gy.norm());
    if (ra == r_grid.end() || gb == g_grid.end()) continue;
    double& cell = values[static_cast<std::size_t>(ra - r_grid.begin()) * g_grid.size() +
                          static_cast<std::size_t>(gb - g_grid.begin())];
    cell = std::max(cell, ratio);
  }
  return PhiSpec::empirical(std::move(r_grid), std::move(g_grid), std::move(values));
}

/// ExpL0L1 phi with constants fitted on the ball of radius `radius` about x*.
inline PhiSpec calibrated_phi(const ProblemInstance& p, double radius, std::size_t num_pairs = 10000,
                              std::uint64_t seed = 0) {
  const L0L1Estimate e = estimate_l0l1(p, num_pairs, radius, seed);
  return PhiSpec::exp_l0l1(e.L0_hat, e.L1_hat);
}

// ---------------------------------------------------------------------------
// Theorem bounds

enum class Theorem { T43Convex, T43Strong, T44Convex, T44Strong, T51, T52, T53, T54 };

inline std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::T43Convex:
      return "T43_convex";
    case Theorem::T43Strong:
      return "T43_strong";
    case Theorem::T44Convex:
      return "T44_convex";
    case Theorem::T44Strong:
      return "T44_strong";
    case Theorem::T51:
      return "T51";
    case Theorem::T52:
      return "T52";
    case Theorem::T53:
      return "T53";
    case Theorem::T54:
      return "T54";
  }
  return "unknown";
}

/// True for the O(1/k) bounds on the uniform-iterate gap; false for the
/// bounds on E|x_k - x*|^2.
inline bool is_sublinear(Theorem t) { return t == Theorem::T43Convex || t == Theorem::T44Convex; }

struct BoundParams {
  double gamma = 1.0;
  double mu = 0.0;
  double delta_star = 0.0;
  double sigma_star_sq = 0.0;
  double c = 0.0;
  double r0_sq = 0.0;
  // phi(|x0 - x*|, |x0 - x*| / gamma)
  double phi_value = 0.0;
};

class BoundCurve {
 public:
  Theorem theorem() const noexcept { return theorem_; }
  const BoundParams& params() const noexcept { return params_; }
  double factor() const noexcept { return factor_; }
  double neighborhood() const noexcept { return neighborhood_; }
  bool sublinear() const noexcept { return is_sublinear(theorem_); }

  double value(std::size_t k) const {
    if (sublinear()) {
      if (k == 0) return std::numeric_limits<double>::infinity();
      return coefficient_ / (2.0 * static_cast<double>(k)) * params_.r0_sq;
    }
    return std::pow(factor_, static_cast<double>(k)) * params_.r0_sq + neighborhood_;
  }

  friend BoundCurve bound_curve(Theorem theorem, const BoundParams& params);

 private:
  Theorem theorem_ = Theorem::T43Convex;
  BoundParams params_;
  double factor_ = 1.0;
  double neighborhood_ = 0.0;
  double coefficient_ = 0.0;
};

namespace detail {

inline void require_stepsize_cap(std::string_view name, double gamma, double cap, std::string_view text) {
  if (gamma > cap)
    throw PreconditionViolated(std::string(name) + ": stepsize gamma = " + std::to_string(gamma) +
                               " violates " + std::string(text) + " = " + std::to_string(cap));
}

// mu * scale / (k * delta^2), infinite when delta = 0.
inline double similarity_cap(double mu, double scale, double k, double delta) {
  return delta == 0.0 ? std::numeric_limits<double>::infinity() : mu * scale / (k * delta * delta);
}

}  // namespace detail

/// Evaluable bound for the chosen theorem. Stepsize and parameter hypotheses
/// are enforced: violating one raises PreconditionViolated naming the inequality.
inline BoundCurve bound_curve(Theorem theorem, const BoundParams& params) {
  const double g = params.gamma;
  const double mu = params.mu;
  const double c = params.c;
  const auto name = to_string(theorem);
  if (!(g > 0.0)) throw PreconditionViolated(std::string(name) + ": gamma must be positive");
  if (!(params.r0_sq >= 0.0)) throw PreconditionViolated(std::string(name) + ": R0^2 must be nonnegative");

  const bool needs_c = theorem == Theorem::T44Convex || theorem == Theorem::T44Strong ||
                       theorem == Theorem::T52 || theorem == Theorem::T54;
  if (needs_c && !(c >= 0.0 && c < 1.0))
    throw PreconditionViolated(std::string(name) + ": requires 0 <= c < 1, got c = " + std::to_string(c));
  const bool needs_mu = theorem != Theorem::T43Convex && theorem != Theorem::T44Convex;
  if (needs_mu && !(mu > 0.0))
    throw PreconditionViolated(std::string(name) + ": requires mu > 0");
  if ((theorem == Theorem::T53 || theorem == Theorem::T54) && !(params.sigma_star_sq >= 0.0))
    throw PreconditionViolated(std::string(name) + ": requires sigma_*^2 >= 0");

  BoundCurve b;
  b.theorem_ = theorem;
  b.params_ = params;
  const double denom = 2.0 / g + params.phi_value;
  const double delta = params.delta_star;
  switch (theorem) {
    case Theorem::T43Convex:
      b.coefficient_ = params.phi_value + 2.0 / g;
      break;
    case Theorem::T44Convex:
      b.coefficient_ = (params.phi_value + 2.0 / g) / (1.0 - c);
      break;
    case Theorem::T43Strong:
      b.factor_ = 1.0 - mu / denom;
      break;
    case Theorem::T44Strong:
      b.factor_ = 1.0 - (1.0 - c) * mu / denom;
      break;
    case Theorem::T51:
      detail::require_stepsize_cap(name, g, detail::similarity_cap(mu, 1.0, 2.0, delta), "gamma <= mu/(2 delta*^2)");
      b.factor_ = 1.0 - std::min(g * mu / 4.0, 0.5);
      break;
    case Theorem::T52:
      detail::require_stepsize_cap(name, g, detail::similarity_cap(mu, 1.0, 4.0, delta), "gamma <= mu/(4 delta*^2)");
      b.factor_ = 1.0 - std::min(g * mu / 4.0, (1.0 - c) / 2.0);
      break;
    case Theorem::T53:
      detail::require_stepsize_cap(name, g, detail::similarity_cap(mu, 1.0, 4.0, delta), "gamma <= mu/(4 delta*^2)");
      b.factor_ = 1.0 - 0.5 * std::min(g * mu / 2.0, 1.0);
      b.neighborhood_ = 4.0 * std::max(2.0 / (g * mu), 1.0) * g * g * params.sigma_star_sq;
      break;
    case Theorem::T54:
      detail::require_stepsize_cap(name, g, detail::similarity_cap(mu, 1.0 - c, 4.0, delta),
                                   "gamma <= mu(1-c)/(4 delta*^2)");
      b.factor_ = 1.0 - 0.25 * std::min(g * mu, 1.0);
      b.neighborhood_ = std::max(1.0 / (g * mu), 1.0) * 8.0 * g * g * params.sigma_star_sq / (1.0 - c);
      break;
  }
  if (!b.sublinear() && !(b.factor_ >= 0.0 && b.factor_ < 1.0))
    throw PreconditionViolated(std::string(name) + ": contraction factor " + std::to_string(b.factor_) +
                               " outside [0, 1)");
  return b;
}

/// phi evaluated at (R0, R0 / gamma), as it enters the phi-smoothness bounds.
inline double phi_at_start(const PhiSpec& spec, double r0, double gamma) {
  return phi_eval(spec, r0, r0 / gamma);
}

// ---------------------------------------------------------------------------
// Trajectory checks

/// Seed-averaged trajectory on a shared k grid.
struct AveragedTrajectory {
  std::vector<std::size_t> k;
  std::vector<double> mean_dist_sq;
  std::vector<double> median_dist_sq;
  std::vector<double> mean_gap;
  // Mean over seeds of the expected gap of an iterate drawn uniformly from
  // the rows before k (k >= 1; row 0 carries the gap at x_0).
  std::vector<double> mean_uniform_gap;
  std::size_t num_runs = 0;
};

inline double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

inline AveragedTrajectory average_trajectories(std::span<const Trajectory> runs) {
  if (runs.empty()) throw InvalidArgument("no trajectories to average");
  const std::size_t rows = runs.front().records.size();
  for (const Trajectory& t : runs) {
    if (t.records.size() != rows) throw InvalidArgument("trajectories have mismatched horizon lengths");
    for (std::size_t j = 0; j < rows; ++j)
      if (t.records[j].k != runs.front().records[j].k)
        throw InvalidArgument("trajectories have mismatched iteration grids");
  }
  AveragedTrajectory avg;
  avg.num_runs = runs.size();
  const double m = static_cast<double>(runs.size());
  std::vector<double> prefix(runs.size(), 0.0);
  std::vector<double> column(runs.size());
  for (std::size_t j = 0; j < rows; ++j) {
    double dist = 0.0;
    double gap = 0.0;
    double uniform = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const IterateRecord& rec = runs[r].records[j];
      dist += rec.dist_sq;
      gap += rec.gap;
      column[r] = rec.dist_sq;
      uniform += j == 0 ? rec.gap : prefix[r] / static_cast<double>(j);
      prefix[r] += rec.gap;
    }
    avg.k.push_back(runs.front().records[j].k);
    avg.mean_dist_sq.push_back(dist / m);
    avg.median_dist_sq.push_back(median_of(column));
    avg.mean_gap.push_back(gap / m);
    avg.mean_uniform_gap.push_back(uniform / m);
  }
  return avg;
}

struct DominanceRow {
  std::size_t k = 0;
  double bound = 0.0;
  double empirical = 0.0;
  double ratio = 0.0;
};

struct DominanceReport {
  Theorem theorem = Theorem::T43Convex;
  double max_ratio = 0.0;
  std::vector<std::size_t> violations;
  std::vector<DominanceRow> rows;
  bool passed() const { return violations.empty(); }
};

/// Compares the empirical metric (mean dist_sq for contraction bounds, mean
/// uniform-iterate gap for sublinear bounds) against the curve at every k
/// in [first_k, last_k], flagging rows whose ratio exceeds `slack`.
inline DominanceReport check_bound_dominance(const AveragedTrajectory& avg, const BoundCurve& curve,
                                             double slack, std::size_t first_k = 0,
                                             std::size_t last_k = std::numeric_limits<std::size_t>::max()) {
  if (!(slack >= 1.0)) throw InvalidArgument("slack must be >= 1");
  if (avg.k.empty()) throw InvalidArgument("empty averaged trajectory");
  if (last_k != std::numeric_limits<std::size_t>::max() && avg.k.back() < last_k)
    throw InvalidArgument("averaged trajectory is shorter than the requested horizon");
  DominanceReport rep;
  rep.theorem = curve.theorem();
  const bool sub = curve.sublinear();
  for (std::size_t j = 0; j < avg.k.size(); ++j) {
    const std::size_t k = avg.k[j];
    if (k < first_k || k > last_k) continue;
    if (sub && k == 0) continue;
    DominanceRow row;
    row.k = k;
    row.bound = curve.value(k);
    row.empirical = sub ? avg.mean_uniform_gap[j] : avg.mean_dist_sq[j];
    row.ratio = row.empirical == 0.0 ? 0.0 : row.empirical / row.bound;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    if (row.ratio > slack) rep.violations.push_back(k);
    rep.rows.push_back(row);
  }
  return rep;
}

struct MonotonicityViolation {
  enum class Kind { DistanceIncrease, StepTooLong };
  Kind kind;
  std::size_t k;
  double excess;
};

struct MonotonicityReport {
  std::vector<MonotonicityViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// |x_{k+1} - x*|^2 <= |x_k - x*|^2 and |x_k - x_{k+1}|^2 <= |x_0 - x*|^2 on
/// consecutive recorded rows.
inline MonotonicityReport check_monotonicity(const Trajectory& t, double dist_slack = 1e-12,
                                             double step_slack = 1e-10) {
  MonotonicityReport rep;
  if (t.records.empty()) return rep;
  const double dist0 = t.records.front().dist_sq;
  for (std::size_t j = 0; j < t.records.size(); ++j) {
    const IterateRecord& r = t.records[j];
    if (j > 0 && r.dist_sq > t.records[j - 1].dist_sq + dist_slack)
      rep.violations.push_back({MonotonicityViolation::Kind::DistanceIncrease, r.k,
                                r.dist_sq - t.records[j - 1].dist_sq});
    if (r.step_norm_sq > dist0 + step_slack)
      rep.violations.push_back({MonotonicityViolation::Kind::StepTooLong, r.k, r.step_norm_sq - dist0});
  }
  return rep;
}

/// Geometric-mean per-iteration contraction of a mean distance curve.
inline double empirical_contraction(const AveragedTrajectory& avg) {
  if (avg.k.size() < 2 || avg.mean_dist_sq.front() <= 0.0) return 0.0;
  const double ratio = avg.mean_dist_sq.back() / avg.mean_dist_sq.front();
  return std::pow(ratio, 1.0 / static_cast<double>(avg.k.back() - avg.k.front()));
}

}  // namespace sppm

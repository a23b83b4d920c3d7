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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sppm/error.hpp"
#include "sppm/rng.hpp"

namespace sppm {

using Vector = Eigen::VectorXd;

enum class ProblemKind { PowerNorm, RegularizedPowerNorm, ShiftedQuadratic };

inline std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::PowerNorm:
      return "power_norm";
    case ProblemKind::RegularizedPowerNorm:
      return "regularized_power_norm";
    case ProblemKind::ShiftedQuadratic:
      return "shifted_quadratic";
  }
  return "unknown";
}

/// Ground-truth constants of a problem instance. Absent fields are unknown
/// or do not exist (e.g. mu for a merely convex objective).
struct ProblemConstants {
  std::optional<double> L0;
  std::optional<double> L1;
  std::optional<double> mu;
  std::optional<double> sigma_star_sq;
  std::optional<double> delta_star;
};

namespace detail {

inline double ipow(double base, int exponent) {
  double result = 1.0;
  for (int j = 0; j < exponent; ++j) result *= base;
  return result;
}

inline bool all_finite(const Vector& x) { return x.allFinite(); }

}  // namespace detail

/// Finite-sum objective f(x) = (1/n) sum_i f_i(x) with analytic component
/// oracles. Immutable after construction; all oracles are const and pure.
///
///   PowerNorm:            f_i(x) = a_i |x|^{2s}
///   RegularizedPowerNorm: f_i(x) = a_i |x|^{2s} + lambda <e_i, x>^2   (n = d)
///   ShiftedQuadratic:     f_i(x) = 1/2 |x - b_i|^2
class ProblemInstance {
 public:
  ProblemKind kind() const noexcept { return kind_; }
  std::size_t num_components() const noexcept { return n_; }
  Eigen::Index dimension() const noexcept { return d_; }
  int power() const noexcept { return s_; }
  const Vector& coefficients() const noexcept { return a_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<Vector>& shifts() const noexcept { return shifts_; }
  const Vector& minimizer() const noexcept { return minimizer_; }
  double f_star() const noexcept { return f_star_; }
  bool interpolating() const noexcept { return interpolating_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double spread() const noexcept { return spread_; }

  double eval_component(std::size_t i, const Vector& x) const {
    check_args(i, x);
    return component_value(i, x);
  }

  Vector grad_component(std::size_t i, const Vector& x) const {
    check_args(i, x);
    Vector g(d_);
    component_gradient(i, x, g);
    return g;
  }

  /// Writes the gradient of f_i into `out` (resized as needed). Hot-loop
  /// variant of grad_component that skips argument checks.
  void grad_component_into(std::size_t i, const Vector& x, Vector& out) const {
    out.resize(d_);
    component_gradient(i, x, out);
  }

  /// f_i(x_new) - f_i(x_old), evaluated without the cancellation of a
  /// plain difference of two large values.
  double component_difference(std::size_t i, const Vector& x_new, const Vector& x_old) const {
    switch (kind_) {
      case ProblemKind::PowerNorm:
      case ProblemKind::RegularizedPowerNorm: {
        const double q1 = x_new.squaredNorm();
        const double q0 = x_old.squaredNorm();
        const double dq = (x_new - x_old).dot(x_new + x_old);
        double sum = 0.0;
        for (int j = 0; j < s_; ++j) sum += detail::ipow(q1, j) * detail::ipow(q0, s_ - 1 - j);
        double diff = a_[static_cast<Eigen::Index>(i)] * dq * sum;
        if (kind_ == ProblemKind::RegularizedPowerNorm) {
          const auto c = static_cast<Eigen::Index>(i);
          diff += lambda_ * (x_new[c] - x_old[c]) * (x_new[c] + x_old[c]);
        }
        return diff;
      }
      case ProblemKind::ShiftedQuadratic:
        return 0.5 * (x_new - x_old).dot(x_new + x_old - 2.0 * shifts_[i]);
    }
    return 0.0;
  }

  double eval_full(const Vector& x) const {
    check_point(x);
    double sum = 0.0;
    switch (kind_) {
      case ProblemKind::PowerNorm:
      case ProblemKind::RegularizedPowerNorm: {
        // Same arithmetic as component_value, with |x|^2 hoisted.
        const double p = detail::ipow(x.squaredNorm(), s_);
        for (std::size_t i = 0; i < n_; ++i) {
          const auto c = static_cast<Eigen::Index>(i);
          double v = a_[c] * p;
          if (kind_ == ProblemKind::RegularizedPowerNorm) v += lambda_ * x[c] * x[c];
          sum += v;
        }
        break;
      }
      case ProblemKind::ShiftedQuadratic:
        for (std::size_t i = 0; i < n_; ++i) sum += component_value(i, x);
        break;
    }
    return sum / static_cast<double>(n_);
  }

  Vector grad_full(const Vector& x) const {
    check_point(x);
    Vector sum = Vector::Zero(d_);
    Vector g(d_);
    for (std::size_t i = 0; i < n_; ++i) {
      component_gradient(i, x, g);
      sum += g;
    }
    return sum / static_cast<double>(n_);
  }

  ProblemConstants known_constants() const {
    ProblemConstants c;
    switch (kind_) {
      case ProblemKind::PowerNorm:
        c.L0 = 2.0 * s_;
        c.L1 = 2.0 * s_ - 1.0;
        c.sigma_star_sq = 0.0;
        break;
      case ProblemKind::RegularizedPowerNorm:
        c.L0 = 2.0 * s_ + 2.0 * lambda_;
        c.L1 = 2.0 * s_ - 1.0;
        c.mu = lambda_ / static_cast<double>(n_);
        c.sigma_star_sq = 0.0;
        break;
      case ProblemKind::ShiftedQuadratic: {
        c.L0 = 1.0;
        c.L1 = 0.0;
        c.mu = 1.0;
        c.delta_star = 0.0;
        double sum = 0.0;
        for (const Vector& b : shifts_) sum += (minimizer_ - b).squaredNorm();
        c.sigma_star_sq = sum / static_cast<double>(n_);
        break;
      }
    }
    return c;
  }

  friend ProblemInstance make_power_norm_with(Vector a, Eigen::Index d, int s);
  friend ProblemInstance make_regularized_power_norm_with(Vector a, int s, double lambda);
  friend ProblemInstance make_shifted_quadratic_with(std::vector<Vector> shifts);
  friend ProblemInstance make_power_norm(std::size_t, Eigen::Index, int, std::uint64_t);
  friend ProblemInstance make_regularized_power_norm(std::size_t, Eigen::Index, int, double,
                                                     std::uint64_t);
  friend ProblemInstance make_shifted_quadratic(std::size_t, Eigen::Index, double, std::uint64_t);

 private:
  ProblemInstance() = default;

  void check_point(const Vector& x) const {
    if (x.size() != d_) throw InvalidArgument("point has wrong dimension");
    if (!detail::all_finite(x)) throw InvalidArgument("point has non-finite entries");
  }

  void check_args(std::size_t i, const Vector& x) const {
    if (i >= n_) throw InvalidArgument("component index out of range");
    check_point(x);
  }

  double component_value(std::size_t i, const Vector& x) const {
    const auto c = static_cast<Eigen::Index>(i);
    switch (kind_) {
      case ProblemKind::PowerNorm:
        return a_[c] * detail::ipow(x.squaredNorm(), s_);
      case ProblemKind::RegularizedPowerNorm:
        return a_[c] * detail::ipow(x.squaredNorm(), s_) + lambda_ * x[c] * x[c];
      case ProblemKind::ShiftedQuadratic:
        return 0.5 * (x - shifts_[i]).squaredNorm();
    }
    return 0.0;
  }

  // grad a|x|^{2s} = 2 s a |x|^{2s-2} x; the power is taken on |x|^2 with a
  // nonnegative integer exponent, so x = 0 yields the exact zero vector.
  void component_gradient(std::size_t i, const Vector& x, Vector& out) const {
    const auto c = static_cast<Eigen::Index>(i);
    switch (kind_) {
      case ProblemKind::PowerNorm:
      case ProblemKind::RegularizedPowerNorm:
        out.noalias() = (2.0 * s_ * a_[c] * detail::ipow(x.squaredNorm(), s_ - 1)) * x;
        if (kind_ == ProblemKind::RegularizedPowerNorm) out[c] += 2.0 * lambda_ * x[c];
        return;
      case ProblemKind::ShiftedQuadratic:
        out.noalias() = x - shifts_[i];
        return;
    }
  }

  ProblemKind kind_ = ProblemKind::PowerNorm;
  std::size_t n_ = 0;
  Eigen::Index d_ = 0;
  int s_ = 0;
  Vector a_;
  double lambda_ = 0.0;
  double spread_ = 0.0;
  std::vector<Vector> shifts_;
  Vector minimizer_;
  double f_star_ = 0.0;
  bool interpolating_ = false;
  std::uint64_t seed_ = 0;
};

inline ProblemInstance make_power_norm_with(Vector a, Eigen::Index d, int s) {
  if (a.size() < 1) throw InvalidArgument("need at least one component");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (s < 2) throw InvalidArgument("power parameter s must be >= 2");
  if (!(a.array() > 0.0).all() || !a.allFinite())
    throw InvalidArgument("coefficients a_i must be positive and finite");
  ProblemInstance p;
  p.kind_ = ProblemKind::PowerNorm;
  p.n_ = static_cast<std::size_t>(a.size());
  p.d_ = d;
  p.s_ = s;
  p.a_ = std::move(a);
  p.minimizer_ = Vector::Zero(d);
  p.f_star_ = 0.0;
  p.interpolating_ = true;
  return p;
}

namespace detail {

// a_i uniform on (0, 1].
inline Vector draw_coefficients(std::size_t n, std::uint64_t seed) {
  CounterStream rng(seed, streams::kCoefficients);
  Vector a(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = 1.0 - rng.uniform();
  return a;
}

}  // namespace detail

inline ProblemInstance make_power_norm(std::size_t n, Eigen::Index d, int s, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one component");
  if (s < 2) throw InvalidArgument("power parameter s must be >= 2");
  ProblemInstance p = make_power_norm_with(detail::draw_coefficients(n, seed), d, s);
  p.seed_ = seed;
  return p;
}

inline ProblemInstance make_regularized_power_norm_with(Vector a, int s, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("lambda must be positive and finite");
  const Eigen::Index d = a.size();
  ProblemInstance p = make_power_norm_with(std::move(a), d, s);
  p.kind_ = ProblemKind::RegularizedPowerNorm;
  p.lambda_ = lambda;
  return p;
}

inline ProblemInstance make_regularized_power_norm(std::size_t n, Eigen::Index d, int s,
                                                   double lambda, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one component");
  if (static_cast<Eigen::Index>(n) != d)
    throw InvalidArgument("regularized power norm requires n == d");
  if (s < 2) throw InvalidArgument("power parameter s must be >= 2");
  ProblemInstance p =
      make_regularized_power_norm_with(detail::draw_coefficients(n, seed), s, lambda);
  p.seed_ = seed;
  return p;
}

inline ProblemInstance make_shifted_quadratic_with(std::vector<Vector> shifts) {
  if (shifts.empty()) throw InvalidArgument("need at least one component");
  const Eigen::Index d = shifts.front().size();
  if (d < 1) throw InvalidArgument("dimension must be positive");
  Vector mean = Vector::Zero(d);
  for (const Vector& b : shifts) {
    if (b.size() != d) throw InvalidArgument("shifts must share one dimension");
    if (!b.allFinite()) throw InvalidArgument("shifts must be finite");
    mean += b;
  }
  mean /= static_cast<double>(shifts.size());
  bool all_equal = true;
  for (const Vector& b : shifts) all_equal = all_equal && (b == shifts.front());

  ProblemInstance p;
  p.kind_ = ProblemKind::ShiftedQuadratic;
  p.n_ = shifts.size();
  p.d_ = d;
  p.s_ = 0;
  p.a_ = Vector::Ones(static_cast<Eigen::Index>(shifts.size()));
  p.shifts_ = std::move(shifts);
  p.minimizer_ = all_equal ? p.shifts_.front() : mean;
  p.interpolating_ = all_equal;
  p.f_star_ = p.eval_full(p.minimizer_);
  return p;
}

inline ProblemInstance make_shifted_quadratic(std::size_t n, Eigen::Index d, double spread,
                                              std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("need at least one component");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (!(spread > 0.0) || !std::isfinite(spread))
    throw InvalidArgument("spread must be positive and finite");
  CounterStream rng(seed, streams::kShifts);
  std::vector<Vector> shifts;
  shifts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = spread * (1.0 - rng.uniform());
    shifts.push_back(radius * rng.unit_vector(d));
  }
  ProblemInstance p = make_shifted_quadratic_with(std::move(shifts));
  p.seed_ = seed;
  p.spread_ = spread;
  return p;
}

}  // namespace sppm

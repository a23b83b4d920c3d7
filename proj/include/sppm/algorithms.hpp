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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sppm/error.hpp"
#include "sppm/problems.hpp"
#include "sppm/prox.hpp"
#include "sppm/rng.hpp"

namespace sppm {

enum class Algorithm { Sppm, SppmInexact, Sgd };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sppm:
      return "sppm";
    case Algorithm::SppmInexact:
      return "sppm_inexact";
    case Algorithm::Sgd:
      return "sgd";
  }
  return "unknown";
}

struct RunConfig {
  double gamma = 1.0;
  Vector x0;
  std::size_t iterations = 100;  // K
  std::uint64_t seed = 0;
  InnerSolverConfig inner;
  double divergence_threshold = 1e8;
  double rtol = 1e-10;
  bool stop_at_rtol = false;
  std::size_t record_stride = 1;
  // Replays the exact prox at every step of sppm_inexact to measure
  // max_k gamma^2 |grad Psi_k(x_hat)|^2 / |x_k - x_k^Psi|^2.
  bool measure_inexactness = false;

  void validate(const ProblemInstance& p) const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive");
    if (iterations < 1) throw InvalidArgument("outer iteration count K must be >= 1");
    if (x0.size() != p.dimension()) throw InvalidArgument("x0 has wrong dimension");
    if (!x0.allFinite()) throw InvalidArgument("x0 must be finite");
    if (!(divergence_threshold > 0.0)) throw InvalidArgument("divergence threshold must be positive");
    if (!(rtol >= 0.0)) throw InvalidArgument("rtol must be nonnegative");
    if (record_stride < 1) throw InvalidArgument("record stride must be >= 1");
    inner.validate();
  }
};

/// Row of a trajectory, describing iterate x_k and the step that leaves it.
/// The terminal row has component -1 and zero step data.
struct IterateRecord {
  std::size_t k = 0;
  double dist_sq = 0.0;
  double gap = 0.0;
  long component = -1;
  int inner_iterations = 0;
  double psi_grad_sq = 0.0;
  double step_norm_sq = 0.0;
};

struct Outcome {
  enum class Kind { Converged, Completed, Diverged };
  Kind kind = Kind::Completed;
  std::optional<std::size_t> at_k;
};

inline std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Converged:
      return "converged";
    case Outcome::Kind::Completed:
      return "completed";
    case Outcome::Kind::Diverged:
      return "diverged";
  }
  return "unknown";
}

struct Trajectory {
  Algorithm algorithm = Algorithm::Sppm;
  RunConfig config;
  std::vector<IterateRecord> records;
  Outcome outcome;
  // Expected gap of an iterate drawn uniformly from the recorded x_0..x_{k-1}.
  double uniform_iterate_gap = 0.0;
  std::optional<std::size_t> iterations_to_rtol;
  std::size_t outer_steps = 0;
  long long total_inner_iterations = 0;
  std::optional<double> measured_c;
  Vector final_point;

  double inner_work_per_step() const {
    return outer_steps == 0 ? 0.0
                            : static_cast<double>(total_inner_iterations) / static_cast<double>(outer_steps);
  }
};

/// Sampled component index for outer iteration k of a run keyed by `seed`.
inline std::size_t sample_component(std::uint64_t seed, std::size_t k, std::size_t n) {
  return to_index(counter_hash(derive_key(seed, streams::kSampling), k), n);
}

namespace detail {

struct StepOutput {
  int inner_iterations = 0;
  double psi_grad_sq = 0.0;
};

template <class Step>
Trajectory run_outer_loop(Algorithm algorithm, const ProblemInstance& p, const RunConfig& cfg,
                          Step&& step) {
  cfg.validate(p);
  Trajectory t;
  t.algorithm = algorithm;
  t.config = cfg;

  const Vector& x_star = p.minimizer();
  const double dist0 = (cfg.x0 - x_star).squaredNorm();
  const double blowup = cfg.divergence_threshold * (1.0 + dist0);
  const std::size_t n = p.num_components();
  const std::size_t K = cfg.iterations;

  Vector x = cfg.x0;
  Vector next(x.size());
  auto gap_at = [&](const Vector& v) {
    return v.allFinite() ? p.eval_full(v) - p.f_star() : std::numeric_limits<double>::infinity();
  };

  for (std::size_t k = 0;; ++k) {
    const double dist = (x - x_star).squaredNorm();
    IterateRecord rec;
    rec.k = k;
    rec.dist_sq = dist;

    if (!std::isfinite(dist) || dist > blowup) {
      rec.gap = gap_at(x);
      t.records.push_back(rec);
      t.outcome = {Outcome::Kind::Diverged, k};
      break;
    }
    if (!t.iterations_to_rtol && dist <= cfg.rtol * dist0) {
      t.iterations_to_rtol = k;
      if (cfg.stop_at_rtol) {
        rec.gap = gap_at(x);
        t.records.push_back(rec);
        break;
      }
    }
    if (k == K) {
      rec.gap = gap_at(x);
      t.records.push_back(rec);
      break;
    }

    const std::size_t i = sample_component(cfg.seed, k, n);
    StepOutput out;
    try {
      out = step(k, i, x, next);
    } catch (const InnerDivergence&) {
      rec.gap = gap_at(x);
      rec.component = static_cast<long>(i);
      t.records.push_back(rec);
      t.outcome = {Outcome::Kind::Diverged, k};
      break;
    }
    ++t.outer_steps;
    t.total_inner_iterations += out.inner_iterations;

    if (k % cfg.record_stride == 0) {
      rec.gap = gap_at(x);
      rec.component = static_cast<long>(i);
      rec.inner_iterations = out.inner_iterations;
      rec.psi_grad_sq = out.psi_grad_sq;
      rec.step_norm_sq = (x - next).squaredNorm();
      t.records.push_back(rec);
    }
    x.swap(next);
  }

  if (t.outcome.kind != Outcome::Kind::Diverged && t.iterations_to_rtol)
    t.outcome = {Outcome::Kind::Converged, *t.iterations_to_rtol};

  const std::size_t last_k = t.records.back().k;
  double sum = 0.0;
  std::size_t count = 0;
  for (const IterateRecord& r : t.records) {
    if (r.k < last_k || last_k == 0) {
      sum += r.gap;
      ++count;
    }
  }
  t.uniform_iterate_gap = count ? sum / static_cast<double>(count) : 0.0;
  t.final_point = std::move(x);
  return t;
}

}  // namespace detail

/// Stochastic proximal point method: x_{k+1} = prox_{gamma f_xi}(x_k).
inline Trajectory sppm(const ProblemInstance& p, const RunConfig& cfg) {
  if (cfg.inner.mode != InnerMode::Exact)
    throw InvalidArgument("sppm requires the exact inner mode; use sppm_inexact");
  return detail::run_outer_loop(
      Algorithm::Sppm, p, cfg,
      [&](std::size_t k, std::size_t i, const Vector& x, Vector& next) {
        ProxResult r;
        try {
          r = prox_oracle(ProxQuery{p, i, x, cfg.gamma});
        } catch (const OracleFailure& e) {
          throw OracleFailure("sppm iteration " + std::to_string(k) + ": " + e.what());
        }
        next = std::move(r.point);
        return detail::StepOutput{r.inner_iterations_used, r.final_psi_grad_sq};
      });
}

/// SPPM with an approximate prox followed by the explicit step
/// x_{k+1} = x_k - gamma grad f_xi(x_hat).
inline Trajectory sppm_inexact(const ProblemInstance& p, const RunConfig& cfg) {
  double c_max = 0.0;
  Vector grad(p.dimension());
  Trajectory t = detail::run_outer_loop(
      Algorithm::SppmInexact, p, cfg,
      [&](std::size_t k, std::size_t i, const Vector& x, Vector& next) {
        const ProxQuery q{p, i, x, cfg.gamma};
        ProxResult r;
        try {
          r = prox_inexact(q, cfg.inner);
        } catch (const OracleFailure& e) {
          throw OracleFailure("sppm_inexact iteration " + std::to_string(k) + ": " + e.what());
        }
        if (cfg.measure_inexactness) {
          const ProxResult exact = prox_oracle(q);
          const double dist_sq = (x - exact.point).squaredNorm();
          const double num = cfg.gamma * cfg.gamma * r.final_psi_grad_sq;
          const double ratio =
              dist_sq > 0.0 ? num / dist_sq : (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
          c_max = std::max(c_max, ratio);
        }
        p.grad_component_into(i, r.point, grad);
        next.noalias() = x - cfg.gamma * grad;
        return detail::StepOutput{r.inner_iterations_used, r.final_psi_grad_sq};
      });
  if (cfg.measure_inexactness) t.measured_c = c_max;
  return t;
}

/// Explicit baseline x_{k+1} = x_k - gamma grad f_xi(x_k).
inline Trajectory sgd(const ProblemInstance& p, const RunConfig& cfg) {
  Vector grad(p.dimension());
  return detail::run_outer_loop(Algorithm::Sgd, p, cfg,
                                [&](std::size_t, std::size_t i, const Vector& x, Vector& next) {
                                  p.grad_component_into(i, x, grad);
                                  next.noalias() = x - cfg.gamma * grad;
                                  return detail::StepOutput{};
                                });
}

inline Trajectory run_algorithm(Algorithm a, const ProblemInstance& p, const RunConfig& cfg) {
  switch (a) {
    case Algorithm::Sppm:
      return sppm(p, cfg);
    case Algorithm::SppmInexact:
      return sppm_inexact(p, cfg);
    case Algorithm::Sgd:
      return sgd(p, cfg);
  }
  throw InvalidArgument("unknown algorithm");
}

struct UniformIterate {
  std::size_t index = 0;
  double gap = 0.0;
};

/// Draws an iterate uniformly from x_0, ..., x_{k-1} (k = last recorded index).
/// With a record stride above one, the draw is over the recorded rows only.
inline UniformIterate select_uniform_iterate(const Trajectory& t, std::uint64_t seed) {
  if (t.records.empty()) throw InvalidArgument("trajectory has no records");
  const std::size_t last_k = t.records.back().k;
  std::size_t count = 0;
  while (count < t.records.size() && t.records[count].k < last_k) ++count;
  if (count == 0) return {t.records.front().k, t.records.front().gap};
  CounterStream rng(seed, streams::kUniformIterate);
  const IterateRecord& r = t.records[rng.index(count)];
  return {r.k, r.gap};
}

}  // namespace sppm

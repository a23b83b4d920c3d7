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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sppm/algorithms.hpp"
#include "sppm/error.hpp"
#include "sppm/problems.hpp"
#include "sppm/prox.hpp"
#include "sppm/rng.hpp"

namespace sppm::harness {

// Config files are flat `dotted.key = value` lines; `#` starts a comment.
// Lists are comma separated. See configs/README.md for the schema.

struct ConfigEntry {
  std::string value;
  int line = 0;
};

using ConfigMap = std::map<std::string, ConfigEntry>;

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline ConfigMap parse_key_values(std::string_view text) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty value for `" + key + "`");
    if (out.contains(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key `" + key + "`");
    out.emplace(std::move(key), ConfigEntry{std::move(value), line_no});
  }
  return out;
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

enum class SweepKind { None, Stepsize, StartNorm, InnerBudget };

inline std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::None:
      return "none";
    case SweepKind::Stepsize:
      return "stepsize";
    case SweepKind::StartNorm:
      return "start_norm";
    case SweepKind::InnerBudget:
      return "inner_budget";
  }
  return "none";
}

struct ProblemDecl {
  ProblemKind kind = ProblemKind::PowerNorm;
  std::size_t n = 100;
  Eigen::Index d = 20;
  std::vector<int> s_values{2};
  double lambda = 2.0;
  double spread = 1.0;
  std::uint64_t seed = 7;

  bool operator==(const ProblemDecl&) const = default;
};

struct ExperimentConfig {
  ProblemDecl problem;
  Algorithm algorithm = Algorithm::SppmInexact;

  double gamma = 1.0;
  double x0_norm = 1.0;
  std::uint64_t x0_seed = 0;
  std::size_t iterations = 1000;
  double divergence_threshold = 1e8;
  std::size_t record_stride = 1;
  bool stop_at_rtol = false;
  bool measure_c = false;

  InnerSolverConfig inner = InnerSolverConfig::gradient_tolerance(1e-12);

  SweepKind sweep = SweepKind::None;
  std::vector<double> sweep_values;

  std::vector<std::uint64_t> seeds{0};
  double rtol = 1e-10;
  std::string output_dir = "out";
  int workers = 1;

  double verify_slack = 1.0;
  std::size_t verify_pairs = 10000;
  std::string verify_theorem = "auto";

  bool operator==(const ExperimentConfig&) const = default;
};


namespace detail {

class Reader {
 public:
  explicit Reader(const ConfigMap& map) : map_(map) {}

  const ConfigEntry* find(const std::string& key) {
    used_.push_back(key);
    const auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
  }

  [[noreturn]] static void fail(const std::string& key, const ConfigEntry& e, const std::string& what) {
    throw ConfigError("line " + std::to_string(e.line) + ": field `" + key + "`: " + what);
  }

  double real(const std::string& key, double fallback) {
    const ConfigEntry* e = find(key);
    return e ? parse_real(key, *e, e->value) : fallback;
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) {
    const ConfigEntry* e = find(key);
    return e ? parse_int<Int>(key, *e, e->value) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    fail(key, *e, "expected true or false, got `" + e->value + "`");
  }

  std::string text(const std::string& key, std::string fallback) {
    const ConfigEntry* e = find(key);
    return e ? e->value : fallback;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(*e, key)) out.push_back(parse_real(key, *e, item));
    return out;
  }

  template <class Int>
  std::vector<Int> integers(const std::string& key, std::vector<Int> fallback) {
    const ConfigEntry* e = find(key);
    if (!e) return fallback;
    std::vector<Int> out;
    for (const std::string& item : split(*e, key)) out.push_back(parse_int<Int>(key, *e, item));
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : map_)
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key `" + key + "`");
  }

 private:
  static std::vector<std::string> split(const ConfigEntry& e, const std::string& key) {
    std::vector<std::string> items;
    std::string_view rest = e.value;
    while (true) {
      const auto comma = rest.find(',');
      std::string item = trim(rest.substr(0, comma));
      if (item.empty()) fail(key, e, "empty list item");
      items.push_back(std::move(item));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return items;
  }

  static double parse_real(const std::string& key, const ConfigEntry& e, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
      fail(key, e, "expected a finite number, got `" + s + "`");
    return v;
  }

  template <class Int>
  static Int parse_int(const std::string& key, const ConfigEntry& e, const std::string& s) {
    Int v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      fail(key, e, "expected an integer, got `" + s + "`");
    return v;
  }

  const ConfigMap& map_;
  std::vector<std::string> used_;
};

}  // namespace detail

/// Parses and validates a config. Errors carry the line and field name.
inline ExperimentConfig parse_config(const ConfigMap& map) {
  detail::Reader r(map);
  ExperimentConfig c;
  auto require = [&](bool ok, const std::string& key, const std::string& what) {
    if (ok) return;
    const ConfigEntry* e = r.find(key);
    if (e) detail::Reader::fail(key, *e, what);
    throw ConfigError("field `" + key + "`: " + what);
  };

  const std::string kind = r.text("problem.kind", "power_norm");
  if (kind == "power_norm") {
    c.problem.kind = ProblemKind::PowerNorm;
  } else if (kind == "regularized_power_norm") {
    c.problem.kind = ProblemKind::RegularizedPowerNorm;
  } else if (kind == "shifted_quadratic") {
    c.problem.kind = ProblemKind::ShiftedQuadratic;
  } else {
    require(false, "problem.kind", "expected power_norm, regularized_power_norm or shifted_quadratic");
  }
  c.problem.n = r.integer<std::size_t>("problem.n", c.problem.n);
  c.problem.d = r.integer<Eigen::Index>("problem.d", c.problem.d);
  c.problem.s_values = r.integers<int>("problem.s", c.problem.s_values);
  c.problem.lambda = r.real("problem.lambda", c.problem.lambda);
  c.problem.spread = r.real("problem.spread", c.problem.spread);
  c.problem.seed = r.integer<std::uint64_t>("problem.seed", c.problem.seed);

  const std::string algo = r.text("algorithm", "sppm_inexact");
  if (algo == "sppm") {
    c.algorithm = Algorithm::Sppm;
  } else if (algo == "sppm_inexact") {
    c.algorithm = Algorithm::SppmInexact;
  } else if (algo == "sgd") {
    c.algorithm = Algorithm::Sgd;
  } else {
    require(false, "algorithm", "expected sppm, sppm_inexact or sgd");
  }

  c.gamma = r.real("run.gamma", c.gamma);
  c.x0_norm = r.real("run.x0_norm", c.x0_norm);
  c.x0_seed = r.integer<std::uint64_t>("run.x0_seed", c.x0_seed);
  c.iterations = r.integer<std::size_t>("run.iterations", c.iterations);
  c.divergence_threshold = r.real("run.divergence_threshold", c.divergence_threshold);
  c.record_stride = r.integer<std::size_t>("run.record_stride", c.record_stride);
  c.stop_at_rtol = r.boolean("run.stop_at_rtol", c.stop_at_rtol);
  c.measure_c = r.boolean("run.measure_c", c.measure_c);

  const std::string mode = r.text("inner.mode", "tolerance");
  if (mode == "fixed") {
    c.inner.mode = InnerMode::FixedIterations;
  } else if (mode == "tolerance") {
    c.inner.mode = InnerMode::GradientTolerance;
  } else if (mode == "exact") {
    c.inner.mode = InnerMode::Exact;
  } else {
    require(false, "inner.mode", "expected fixed, tolerance or exact");
  }
  c.inner.iterations = r.integer<int>("inner.T", c.inner.iterations);
  c.inner.tolerance = r.real("inner.eps", c.inner.tolerance);
  c.inner.max_iterations = r.integer<int>("inner.max_iters", c.inner.max_iterations);
  const std::string step = r.text("inner.step", "backtracking");
  if (step == "backtracking") {
    c.inner.step_policy = StepPolicy::Backtracking;
  } else if (step == "fixed") {
    c.inner.step_policy = StepPolicy::Fixed;
  } else {
    require(false, "inner.step", "expected backtracking or fixed");
  }
  c.inner.shrink = r.real("inner.shrink", c.inner.shrink);
  c.inner.slope = r.real("inner.slope", c.inner.slope);
  c.inner.fixed_step = r.real("inner.fixed_step", c.inner.fixed_step);

  const std::string sweep = r.text("sweep.kind", "none");
  if (sweep == "none") {
    c.sweep = SweepKind::None;
  } else if (sweep == "stepsize") {
    c.sweep = SweepKind::Stepsize;
  } else if (sweep == "start_norm") {
    c.sweep = SweepKind::StartNorm;
  } else if (sweep == "inner_budget") {
    c.sweep = SweepKind::InnerBudget;
  } else {
    require(false, "sweep.kind", "expected none, stepsize, start_norm or inner_budget");
  }
  c.sweep_values = r.reals("sweep.values", {});

  c.seeds = r.integers<std::uint64_t>("seeds", c.seeds);
  c.rtol = r.real("rtol", c.rtol);
  c.output_dir = r.text("output_dir", c.output_dir);
  c.workers = r.integer<int>("workers", c.workers);
  c.verify_slack = r.real("verify.slack", c.verify_slack);
  c.verify_pairs = r.integer<std::size_t>("verify.pairs", c.verify_pairs);
  c.verify_theorem = r.text("verify.theorem", c.verify_theorem);
  r.reject_unknown();

  // Validation.
  require(c.problem.n >= 1, "problem.n", "must be >= 1");
  require(c.problem.d >= 1, "problem.d", "must be >= 1");
  if (c.problem.kind != ProblemKind::ShiftedQuadratic) {
    require(!c.problem.s_values.empty(), "problem.s", "must be non-empty");
    for (int s : c.problem.s_values) require(s >= 2, "problem.s", "every s must be >= 2");
  }
  if (c.problem.kind == ProblemKind::RegularizedPowerNorm) {
    require(static_cast<Eigen::Index>(c.problem.n) == c.problem.d, "problem.n", "must equal problem.d");
    require(c.problem.lambda > 0.0, "problem.lambda", "must be positive");
  }
  if (c.problem.kind == ProblemKind::ShiftedQuadratic)
    require(c.problem.spread > 0.0, "problem.spread", "must be positive");
  require(c.gamma > 0.0, "run.gamma", "must be positive");
  require(c.x0_norm >= 0.0, "run.x0_norm", "must be nonnegative");
  require(c.iterations >= 1, "run.iterations", "must be >= 1");
  require(c.divergence_threshold > 0.0, "run.divergence_threshold", "must be positive");
  require(c.record_stride >= 1, "run.record_stride", "must be >= 1");
  require(c.inner.max_iterations >= 1, "inner.max_iters", "must be >= 1");
  if (c.inner.mode == InnerMode::FixedIterations) require(c.inner.iterations >= 1, "inner.T", "must be >= 1");
  if (c.inner.mode == InnerMode::GradientTolerance) require(c.inner.tolerance > 0.0, "inner.eps", "must be positive");
  require(c.inner.shrink > 0.0 && c.inner.shrink < 1.0, "inner.shrink", "must lie in (0, 1)");
  require(c.inner.slope > 0.0 && c.inner.slope < 1.0, "inner.slope", "must lie in (0, 1)");
  require(c.inner.fixed_step > 0.0, "inner.fixed_step", "must be positive");
  require(!(c.algorithm == Algorithm::Sppm && c.inner.mode != InnerMode::Exact), "inner.mode",
          "algorithm sppm requires inner.mode = exact");
  if (c.sweep != SweepKind::None) {
    require(!c.sweep_values.empty(), "sweep.values", "must be non-empty");
    for (double v : c.sweep_values) {
      if (c.sweep == SweepKind::Stepsize) require(v > 0.0, "sweep.values", "every stepsize must be positive");
      if (c.sweep == SweepKind::StartNorm) require(v >= 0.0, "sweep.values", "every start norm must be >= 0");
      if (c.sweep == SweepKind::InnerBudget)
        require(v >= 1.0 && v == std::floor(v), "sweep.values", "every inner budget T must be an integer >= 1");
    }
  }
  require(!c.seeds.empty(), "seeds", "must be non-empty");
  require(c.rtol >= 0.0, "rtol", "must be nonnegative");
  require(!c.output_dir.empty(), "output_dir", "must be non-empty");
  require(c.workers >= 1, "workers", "must be >= 1");
  require(c.verify_slack >= 1.0, "verify.slack", "must be >= 1");
  require(c.verify_pairs >= 1, "verify.pairs", "must be >= 1");
  {
    static constexpr std::string_view kTheorems[] = {"auto", "T43_convex", "T43_strong", "T44_convex", "T44_strong",
                                                     "T51",  "T52",        "T53",        "T54"};
    require(std::find(std::begin(kTheorems), std::end(kTheorems), c.verify_theorem) != std::end(kTheorems),
            "verify.theorem", "expected auto or one of T43_convex, T43_strong, T44_convex, T44_strong, T51..T54");
  }
  return c;
}

inline ExperimentConfig parse_config(std::string_view text) { return parse_config(parse_key_values(text)); }

/// Canonical key/value form; parse_config(to_key_values(c)) reproduces c.
inline std::map<std::string, std::string> to_key_values(const ExperimentConfig& c) {
  auto join_ints = [](const auto& v) {
    std::string s;
    for (std::size_t j = 0; j < v.size(); ++j) s += (j ? ", " : "") + std::to_string(v[j]);
    return s;
  };
  std::map<std::string, std::string> kv;
  kv["problem.kind"] = std::string(to_string(c.problem.kind));
  kv["problem.n"] = std::to_string(c.problem.n);
  kv["problem.d"] = std::to_string(c.problem.d);
  kv["problem.s"] = join_ints(c.problem.s_values);
  kv["problem.lambda"] = format_double(c.problem.lambda);
  kv["problem.spread"] = format_double(c.problem.spread);
  kv["problem.seed"] = std::to_string(c.problem.seed);
  kv["algorithm"] = std::string(to_string(c.algorithm));
  kv["run.gamma"] = format_double(c.gamma);
  kv["run.x0_norm"] = format_double(c.x0_norm);
  kv["run.x0_seed"] = std::to_string(c.x0_seed);
  kv["run.iterations"] = std::to_string(c.iterations);
  kv["run.divergence_threshold"] = format_double(c.divergence_threshold);
  kv["run.record_stride"] = std::to_string(c.record_stride);
  kv["run.stop_at_rtol"] = c.stop_at_rtol ? "true" : "false";
  kv["run.measure_c"] = c.measure_c ? "true" : "false";
  kv["inner.mode"] = c.inner.mode == InnerMode::FixedIterations     ? "fixed"
                     : c.inner.mode == InnerMode::GradientTolerance ? "tolerance"
                                                                    : "exact";
  kv["inner.T"] = std::to_string(c.inner.iterations);
  kv["inner.eps"] = format_double(c.inner.tolerance);
  kv["inner.max_iters"] = std::to_string(c.inner.max_iterations);
  kv["inner.step"] = c.inner.step_policy == StepPolicy::Backtracking ? "backtracking" : "fixed";
  kv["inner.shrink"] = format_double(c.inner.shrink);
  kv["inner.slope"] = format_double(c.inner.slope);
  kv["inner.fixed_step"] = format_double(c.inner.fixed_step);
  kv["sweep.kind"] = std::string(to_string(c.sweep));
  if (!c.sweep_values.empty()) {
    std::string s;
    for (std::size_t j = 0; j < c.sweep_values.size(); ++j) s += (j ? ", " : "") + format_double(c.sweep_values[j]);
    kv["sweep.values"] = s;
  }
  kv["seeds"] = join_ints(c.seeds);
  kv["rtol"] = format_double(c.rtol);
  kv["output_dir"] = c.output_dir;
  kv["workers"] = std::to_string(c.workers);
  kv["verify.slack"] = format_double(c.verify_slack);
  kv["verify.pairs"] = std::to_string(c.verify_pairs);
  kv["verify.theorem"] = c.verify_theorem;
  return kv;
}

inline std::string to_text(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : to_key_values(c)) out += k + " = " + v + "\n";
  return out;
}

inline ProblemInstance make_problem(const ProblemDecl& decl, int s) {
  switch (decl.kind) {
    case ProblemKind::PowerNorm:
      return make_power_norm(decl.n, decl.d, s, decl.seed);
    case ProblemKind::RegularizedPowerNorm:
      return make_regularized_power_norm(decl.n, decl.d, s, decl.lambda, decl.seed);
    case ProblemKind::ShiftedQuadratic:
      return make_shifted_quadratic(decl.n, decl.d, decl.spread, decl.seed);
  }
  throw ConfigError("unknown problem kind");
}

/// x0 = x* + |x0| u with u a seeded uniform direction.
inline Vector make_start(const ProblemInstance& p, double x0_norm, std::uint64_t x0_seed) {
  CounterStream rng(x0_seed, streams::kStart);
  return p.minimizer() + x0_norm * rng.unit_vector(p.dimension());
}

inline RunConfig make_run_config(const ExperimentConfig& c, const ProblemInstance& p, std::uint64_t seed) {
  RunConfig r;
  r.gamma = c.gamma;
  r.x0 = make_start(p, c.x0_norm, c.x0_seed);
  r.iterations = c.iterations;
  r.seed = seed;
  r.inner = c.inner;
  r.divergence_threshold = c.divergence_threshold;
  r.rtol = c.rtol;
  r.stop_at_rtol = c.stop_at_rtol;
  r.record_stride = c.record_stride;
  r.measure_inexactness = c.measure_c && c.algorithm == Algorithm::SppmInexact;
  return r;
}

/// The single-run config for one sweep cell, seed and power.
inline ExperimentConfig cell_config(const ExperimentConfig& c, int s, double value, std::uint64_t seed) {
  ExperimentConfig out = c;
  out.problem.s_values = {s};
  switch (c.sweep) {
    case SweepKind::None:
      break;
    case SweepKind::Stepsize:
      out.gamma = value;
      break;
    case SweepKind::StartNorm:
      out.x0_norm = value;
      break;
    case SweepKind::InnerBudget:
      out.inner.mode = InnerMode::FixedIterations;
      out.inner.iterations = static_cast<int>(value);
      break;
  }
  out.sweep = SweepKind::None;
  out.sweep_values.clear();
  out.seeds = {seed};
  return out;
}

inline std::string cell_label(SweepKind kind, double value) {
  switch (kind) {
    case SweepKind::Stepsize:
      return "gamma=" + format_double(value);
    case SweepKind::StartNorm:
      return "x0_norm=" + format_double(value);
    case SweepKind::InnerBudget:
      return "T=" + format_double(value);
    case SweepKind::None:
      break;
  }
  return "run";
}

}  // namespace sppm::harness

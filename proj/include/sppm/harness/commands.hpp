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
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sppm/algorithms.hpp"
#include "sppm/error.hpp"
#include "sppm/harness/config.hpp"
#include "sppm/harness/io.hpp"
#include "sppm/harness/svg.hpp"
#include "sppm/problems.hpp"
#include "sppm/theory.hpp"

namespace sppm::harness {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitVerify = 2, kExitIo = 3 };

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<double> rtol;
};

inline ExperimentConfig load_config(const fs::path& path, const Overrides& o = {}) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  ExperimentConfig c = parse_config(text);
  if (o.out) c.output_dir = *o.out;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("--workers must be >= 1");
    c.workers = *o.workers;
  }
  if (o.rtol) {
    if (!(*o.rtol >= 0.0)) throw ConfigError("--rtol must be nonnegative");
    c.rtol = *o.rtol;
  }
  return c;
}

/// Runs fn(0..count-1) on up to `workers` threads.
inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    for (std::size_t j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < count; j = next++) fn(j);
    });
}

inline std::vector<int> panel_powers(const ExperimentConfig& c) {
  if (c.problem.kind == ProblemKind::ShiftedQuadratic) return {c.problem.s_values.empty() ? 2 : c.problem.s_values.front()};
  return c.problem.s_values;
}

inline std::string panel_name(const ExperimentConfig& c, int s) {
  return c.problem.kind == ProblemKind::ShiftedQuadratic ? "main" : "s" + std::to_string(s);
}

/// Value of the swept parameter in the base config.
inline double base_sweep_value(const ExperimentConfig& c) {
  switch (c.sweep) {
    case SweepKind::Stepsize:
      return c.gamma;
    case SweepKind::StartNorm:
      return c.x0_norm;
    case SweepKind::InnerBudget:
      return c.inner.iterations;
    case SweepKind::None:
      break;
  }
  return 0.0;
}

inline std::vector<double> sweep_cells(const ExperimentConfig& c) {
  if (c.sweep == SweepKind::None) return {base_sweep_value(c)};
  return c.sweep_values;
}

/// Builds and validates the problem and run config for one run; throws
/// ConfigError on anything a run would reject.
struct PreparedRun {
  ExperimentConfig config;
  ProblemInstance problem;
  RunConfig run;
};

inline PreparedRun prepare_run(const ExperimentConfig& single) {
  try {
    ProblemInstance p = make_problem(single.problem, single.problem.s_values.front());
    RunConfig r = make_run_config(single, p, single.seeds.front());
    r.validate(p);
    return {single, std::move(p), std::move(r)};
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

// ---------------------------------------------------------------------------
// run

inline int cmd_run(const fs::path& config_path, const Overrides& o = {}, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  try {
    const ExperimentConfig c = load_config(config_path, o);
    if (c.sweep != SweepKind::None || c.seeds.size() > 1 || panel_powers(c).size() > 1)
      log << "note: run executes the base config with the first s and first seed\n";
    ExperimentConfig single = cell_config(c, panel_powers(c).front(), base_sweep_value(c), c.seeds.front());
    PreparedRun prep = prepare_run(single);

    const Trajectory t = run_algorithm(c.algorithm, prep.problem, prep.run);

    const fs::path dir = c.output_dir;
    ensure_directory(dir);
    const std::string name = "run_" + config_hash(single) + ".csv";
    write_file(dir / name, trajectory_csv(t));
    append_line(dir / "manifest.jsonl", manifest_record(single, prep.problem, t, name).dump());

    log << "outcome: " << to_string(t.outcome);
    if (t.outcome.at_k) log << " at k=" << *t.outcome.at_k;
    log << "\nfinal dist_sq: " << format_double(t.records.back().dist_sq)
        << "\ntotal inner iterations: " << t.total_inner_iterations << "\nwrote " << (dir / name).string()
        << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

// ---------------------------------------------------------------------------
// sweep

struct AggregateRow {
  std::size_t k = 0;
  double mean_dist_sq = 0.0;
  double median_dist_sq = 0.0;
};

struct RunSlot {
  std::uint64_t seed = 0;
  std::optional<Trajectory> trajectory;
  std::string failure;  // non-empty when the run raised
};

struct CellResult {
  double value = 0.0;
  std::string label;
  std::vector<RunSlot> runs;
  std::vector<AggregateRow> aggregate;
  std::size_t converged = 0;
  std::size_t completed = 0;
  std::size_t diverged = 0;
  std::size_t failed = 0;
  std::optional<double> median_iterations_to_rtol;  // only when every run reached rtol
  double inner_work_per_step = 0.0;                 // total inner iterations / outer steps, pooled
};

struct PanelResult {
  int s = 2;
  std::string name;
  std::vector<CellResult> cells;
};

struct SweepResult {
  std::vector<PanelResult> panels;
  fs::path output_dir;
};

/// Mean and median dist_sq over seeds on the union of recorded k. Runs that
/// stopped early carry their last value forward; diverged runs are left out
/// unless every run diverged.
inline std::vector<AggregateRow> aggregate_runs(const std::vector<RunSlot>& runs) {
  std::vector<const Trajectory*> use;
  for (const RunSlot& r : runs)
    if (r.trajectory && r.trajectory->outcome.kind != Outcome::Kind::Diverged) use.push_back(&*r.trajectory);
  const bool all_diverged = use.empty();
  if (all_diverged)
    for (const RunSlot& r : runs)
      if (r.trajectory) use.push_back(&*r.trajectory);
  std::vector<std::size_t> grid;
  for (const Trajectory* t : use)
    for (const IterateRecord& rec : t->records) grid.push_back(rec.k);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<AggregateRow> rows;
  std::vector<std::size_t> cursor(use.size(), 0);
  std::vector<double> column;
  for (std::size_t k : grid) {
    column.clear();
    for (std::size_t r = 0; r < use.size(); ++r) {
      const auto& recs = use[r]->records;
      while (cursor[r] + 1 < recs.size() && recs[cursor[r] + 1].k <= k) ++cursor[r];
      if (recs[cursor[r]].k > k) continue;
      if (all_diverged && recs.back().k < k) continue;
      column.push_back(recs[cursor[r]].dist_sq);
    }
    if (column.empty()) continue;
    double sum = 0.0;
    for (double v : column) sum += v;
    rows.push_back({k, sum / static_cast<double>(column.size()), median_of(column)});
  }
  return rows;
}

inline void summarize_cell(CellResult& cell) {
  long long inner = 0;
  std::size_t steps = 0;
  std::vector<double> reached;
  bool all_reached = true;
  for (const RunSlot& r : cell.runs) {
    if (!r.trajectory) {
      ++cell.failed;
      all_reached = false;
      continue;
    }
    const Trajectory& t = *r.trajectory;
    switch (t.outcome.kind) {
      case Outcome::Kind::Converged:
        ++cell.converged;
        break;
      case Outcome::Kind::Completed:
        ++cell.completed;
        break;
      case Outcome::Kind::Diverged:
        ++cell.diverged;
        break;
    }
    inner += t.total_inner_iterations;
    steps += t.outer_steps;
    if (t.iterations_to_rtol && t.outcome.kind != Outcome::Kind::Diverged)
      reached.push_back(static_cast<double>(*t.iterations_to_rtol));
    else
      all_reached = false;
  }
  if (all_reached && !reached.empty()) cell.median_iterations_to_rtol = median_of(reached);
  cell.inner_work_per_step = steps == 0 ? 0.0 : static_cast<double>(inner) / static_cast<double>(steps);
  cell.aggregate = aggregate_runs(cell.runs);
}

inline std::string aggregate_csv(const PanelResult& panel) {
  std::string out = kAggregateHeader;
  out += '\n';
  for (std::size_t j = 0; j < panel.cells.size(); ++j)
    for (const AggregateRow& r : panel.cells[j].aggregate)
      out += std::to_string(r.k) + ',' + panel.cells[j].label + ',' + format_double(r.mean_dist_sq) + ',' +
             format_double(r.median_dist_sq) + '\n';
  return out;
}

inline std::string cells_csv(const PanelResult& panel) {
  std::string out = kCellsHeader;
  out += '\n';
  for (const CellResult& c : panel.cells)
    out += c.label + ',' + format_double(c.value) + ',' + std::to_string(c.runs.size()) + ',' +
           std::to_string(c.converged) + ',' + std::to_string(c.completed) + ',' + std::to_string(c.diverged) +
           ',' + std::to_string(c.failed) + ',' +
           (c.median_iterations_to_rtol ? format_double(*c.median_iterations_to_rtol) : std::string()) + ',' +
           format_double(c.inner_work_per_step) + '\n';
  return out;
}

inline int cmd_plot(const fs::path& dir, std::ostream& log = std::cout, std::ostream& err = std::cerr);

/// Runs every (panel, cell, seed) job. With write_files, per-run CSVs,
/// aggregate and cell CSVs, manifest lines and SVGs land in output_dir.
inline SweepResult run_sweep(const ExperimentConfig& c, bool write_files = true, std::ostream& log = std::cout) {
  const std::vector<int> powers = panel_powers(c);
  const std::vector<double> values = sweep_cells(c);

  struct Job {
    std::size_t panel, cell, seed_index;
  };
  std::vector<Job> jobs;
  std::vector<ExperimentConfig> singles;
  std::vector<PreparedRun> prepared;
  SweepResult result;
  result.output_dir = c.output_dir;
  for (std::size_t pi = 0; pi < powers.size(); ++pi) {
    PanelResult panel;
    panel.s = powers[pi];
    panel.name = panel_name(c, powers[pi]);
    for (std::size_t ci = 0; ci < values.size(); ++ci) {
      CellResult cell;
      cell.value = values[ci];
      cell.label = cell_label(c.sweep, values[ci]);
      for (std::size_t si = 0; si < c.seeds.size(); ++si) {
        cell.runs.push_back({c.seeds[si], std::nullopt, {}});
        jobs.push_back({pi, ci, si});
        prepared.push_back(prepare_run(cell_config(c, powers[pi], values[ci], c.seeds[si])));
      }
      panel.cells.push_back(std::move(cell));
    }
    result.panels.push_back(std::move(panel));
  }
  if (write_files) ensure_directory(c.output_dir);

  parallel_for(jobs.size(), c.workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    RunSlot& slot = result.panels[job.panel].cells[job.cell].runs[job.seed_index];
    try {
      slot.trajectory = run_algorithm(c.algorithm, prepared[j].problem, prepared[j].run);
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  });

  const fs::path dir = c.output_dir;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    PanelResult& panel = result.panels[job.panel];
    const RunSlot& slot = panel.cells[job.cell].runs[job.seed_index];
    if (!slot.failure.empty())
      log << panel.name << " " << panel.cells[job.cell].label << " seed " << slot.seed
          << ": run failed: " << slot.failure << "\n";
    if (!write_files) continue;
    const std::string name =
        panel.name + "_cell" + std::to_string(job.cell) + "_seed" + std::to_string(slot.seed) + ".csv";
    if (slot.trajectory) {
      write_file(dir / name, trajectory_csv(*slot.trajectory));
      append_line(dir / "manifest.jsonl",
                  manifest_record(prepared[j].config, prepared[j].problem, *slot.trajectory, name).dump());
    } else {
      json rec = {{"csv", nullptr}, {"hash", config_hash(prepared[j].config)}, {"failure", slot.failure}};
      json cfg = json::object();
      for (const auto& [k, v] : to_key_values(prepared[j].config)) cfg[k] = v;
      rec["config"] = cfg;
      append_line(dir / "manifest.jsonl", rec.dump());
    }
  }
  for (PanelResult& panel : result.panels) {
    for (CellResult& cell : panel.cells) summarize_cell(cell);
    log << "panel " << panel.name << "\n";
    for (const CellResult& cell : panel.cells) {
      log << "  " << cell.label << ": converged " << cell.converged << ", completed " << cell.completed
          << ", diverged " << cell.diverged << ", failed " << cell.failed << ", iterations to rtol "
          << (cell.median_iterations_to_rtol ? format_double(*cell.median_iterations_to_rtol) : "-")
          << ", inner work per step " << format_double(cell.inner_work_per_step) << "\n";
    }
    if (write_files) {
      write_file(dir / ("aggregate_" + panel.name + ".csv"), aggregate_csv(panel));
      write_file(dir / ("cells_" + panel.name + ".csv"), cells_csv(panel));
    }
  }
  if (write_files) {
    std::ostringstream quiet;
    if (cmd_plot(dir, quiet, quiet) != kExitOk) throw IoError("plot generation failed: " + quiet.str());
  }
  return result;
}

inline int cmd_sweep(const fs::path& config_path, const Overrides& o = {}, std::ostream& log = std::cout,
                     std::ostream& err = std::cerr) {
  try {
    const ExperimentConfig c = load_config(config_path, o);
    run_sweep(c, true, log);
    log << "wrote " << c.output_dir << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

// ---------------------------------------------------------------------------
// plot

/// One SVG per aggregate_<panel>.csv. Cells with diverged runs (from the
/// matching cells_<panel>.csv) are marked in the legend.
inline int cmd_plot(const fs::path& dir, std::ostream& log, std::ostream& err) {
  try {
    if (!fs::is_directory(dir)) {
      err << "plot: " << dir.string() << " is not a directory\n";
      return kExitIo;
    }
    std::vector<fs::path> aggregates;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("aggregate_") && name.ends_with(".csv"))
        aggregates.push_back(entry.path());
    }
    std::sort(aggregates.begin(), aggregates.end());
    if (aggregates.empty()) {
      err << "plot: no aggregate_<panel>.csv files in " << dir.string() << " (expected columns: "
          << kAggregateHeader << ")\n";
      return kExitIo;
    }
    for (const fs::path& path : aggregates) {
      const CsvTable table = read_csv(path);
      const std::size_t ck = table.column("k"), cc = table.column("cell"), cm = table.column("mean_dist_sq");
      if (ck == table.header.size() || cc == table.header.size() || cm == table.header.size()) {
        err << "plot: " << path.string() << " is missing columns; expected schema: " << kAggregateHeader << "\n";
        return kExitIo;
      }
      const std::string stem = path.stem().string();
      const std::string panel = stem.substr(std::string("aggregate_").size());

      std::map<std::string, std::size_t> diverged;
      const fs::path cells_path = dir / ("cells_" + panel + ".csv");
      if (fs::exists(cells_path)) {
        const CsvTable cells = read_csv(cells_path);
        const std::size_t lc = cells.column("cell"), dc = cells.column("diverged");
        if (lc == cells.header.size() || dc == cells.header.size()) {
          err << "plot: " << cells_path.string() << " is missing columns; expected schema: " << kCellsHeader
              << "\n";
          return kExitIo;
        }
        for (const auto& row : cells.rows) diverged[row[lc]] = std::stoul(row[dc]);
      }

      LineChart chart;
      chart.title = panel;
      std::map<std::string, std::size_t> index;
      std::map<std::string, double> start;
      for (const auto& row : table.rows) {
        const std::string& label = row[cc];
        auto it = index.find(label);
        if (it == index.end()) {
          it = index.emplace(label, chart.series.size()).first;
          chart.series.push_back({label, {}, {}});
        }
        double k = 0.0, v = 0.0;
        try {
          k = std::stod(row[ck]);
          v = std::stod(row[cm]);
        } catch (const std::exception&) {
          err << "plot: " << path.string() << ": non-numeric value in row for cell " << label << "\n";
          return kExitIo;
        }
        if (!start.contains(label)) start[label] = v;
        const double s0 = start[label];
        Series& s = chart.series[it->second];
        s.x.push_back(k);
        s.y.push_back(s0 > 0.0 ? v / s0 : v);
      }
      for (Series& s : chart.series) {
        const auto d = diverged.find(s.label);
        if (d != diverged.end() && d->second > 0) s.label += " (diverged " + std::to_string(d->second) + ")";
      }
      const fs::path svg = dir / ("plot_" + panel + ".svg");
      write_file(svg, render_svg(chart));
      log << "wrote " << svg.string() << "\n";
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "plot: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "plot: " << e.what() << "\n";
    return kExitIo;
  }
}

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
  std::string check;
  std::string panel;
  enum class Status { Passed, Failed, Skipped } status = Status::Passed;
  std::string message;
  json details = json::object();
};

inline CheckResult make_check(std::string check, std::string panel) {
  CheckResult r;
  r.check = std::move(check);
  r.panel = std::move(panel);
  return r;
}

inline std::string_view to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Passed:
      return "passed";
    case CheckResult::Status::Failed:
      return "failed";
    case CheckResult::Status::Skipped:
      return "skipped";
  }
  return "unknown";
}

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, DominanceReport>> bounds;  // panel, rows
  bool passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckResult::Status::Failed; });
  }
};

inline std::optional<Theorem> parse_theorem(std::string_view name) {
  for (Theorem t : {Theorem::T43Convex, Theorem::T43Strong, Theorem::T44Convex, Theorem::T44Strong, Theorem::T51,
                    Theorem::T52, Theorem::T53, Theorem::T54})
    if (to_string(t) == name) return t;
  return std::nullopt;
}

/// Bound matching the problem regime and algorithm; nullopt when none applies.
inline std::optional<Theorem> select_theorem(const ExperimentConfig& c, const ProblemInstance& p) {
  if (c.verify_theorem != "auto") return parse_theorem(c.verify_theorem);
  if (c.algorithm == Algorithm::Sgd) return std::nullopt;
  const bool exact = c.algorithm == Algorithm::Sppm || c.inner.mode == InnerMode::Exact;
  const bool strong = p.known_constants().mu.has_value();
  if (p.interpolating()) {
    if (exact) return strong ? Theorem::T43Strong : Theorem::T43Convex;
    return strong ? Theorem::T44Strong : Theorem::T44Convex;
  }
  return exact ? Theorem::T53 : Theorem::T54;
}

/// Checks for every panel of the config: sigma_* against its closed form,
/// phi-descent with calibrated constants, monotonicity of exact runs in the
/// interpolation regime, and dominance of the regime's bound.
inline VerifyReport run_verify(const ExperimentConfig& base, std::ostream& log = std::cout) {
  ExperimentConfig c = base;
  c.stop_at_rtol = false;
  if (c.algorithm == Algorithm::SppmInexact && c.inner.mode != InnerMode::Exact) c.measure_c = true;

  VerifyReport report;
  for (int s : panel_powers(c)) {
    const std::string panel = panel_name(c, s);
    ExperimentConfig single = cell_config(c, s, base_sweep_value(c), c.seeds.front());
    const PreparedRun prep = prepare_run(single);
    const ProblemInstance& p = prep.problem;
    const ProblemConstants known = p.known_constants();
    const double r0 = std::max(c.x0_norm, 0.0);
    const double radius = std::max(r0, 1e-8);

    {
      CheckResult r = make_check("sigma_star", panel);
      const double est = estimate_sigma_star(p, p.minimizer());
      const double ref = known.sigma_star_sq.value_or(est);
      r.details = {{"estimate", est}, {"closed_form", ref}};
      r.status = std::abs(est - ref) <= 1e-10 * (1.0 + ref) ? CheckResult::Status::Passed
                                                             : CheckResult::Status::Failed;
      r.message = "sigma_*^2 = " + format_double(est);
      report.checks.push_back(std::move(r));
    }

    const PhiSpec phi = calibrated_phi(p, radius, c.verify_pairs, c.seeds.front());
    {
      CheckResult r = make_check("phi_descent", panel);
      CounterStream rng(c.seeds.front() + 1, streams::kEstimator);
      const Eigen::Index d = p.dimension();
      std::size_t violations = 0;
      double worst = 0.0;
      for (std::size_t m = 0; m < c.verify_pairs; ++m) {
        const std::size_t i = rng.index(p.num_components());
        const Vector x = p.minimizer() + radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) *
                                             rng.unit_vector(d);
        const Vector y = p.minimizer() + radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) *
                                             rng.unit_vector(d);
        const PhiDescentCheck chk = check_phi_descent(p, phi, i, x, y);
        if (!chk.holds) ++violations;
        if (chk.rhs > 0.0) worst = std::max(worst, chk.lhs / chk.rhs);
      }
      r.details = {{"L0", phi.L0}, {"L1", phi.L1}, {"pairs", c.verify_pairs}, {"violations", violations},
                   {"max_ratio", worst}};
      r.status = violations == 0 ? CheckResult::Status::Passed : CheckResult::Status::Failed;
      r.message = std::to_string(violations) + " violations over " + std::to_string(c.verify_pairs) + " pairs";
      report.checks.push_back(std::move(r));
    }

    std::vector<Trajectory> runs(c.seeds.size());
    std::vector<std::string> failures(c.seeds.size());
    std::vector<PreparedRun> preps;
    for (std::uint64_t seed : c.seeds) preps.push_back(prepare_run(cell_config(c, s, base_sweep_value(c), seed)));
    parallel_for(runs.size(), c.workers, [&](std::size_t j) {
      try {
        runs[j] = run_algorithm(c.algorithm, preps[j].problem, preps[j].run);
      } catch (const std::exception& e) {
        failures[j] = e.what();
      }
    });
    std::size_t failed = 0, diverged = 0;
    std::optional<double> c_measured;
    for (std::size_t j = 0; j < runs.size(); ++j) {
      if (!failures[j].empty()) {
        ++failed;
        continue;
      }
      if (runs[j].outcome.kind == Outcome::Kind::Diverged) ++diverged;
      if (runs[j].measured_c) c_measured = std::max(c_measured.value_or(0.0), *runs[j].measured_c);
    }

    {
      CheckResult r = make_check("monotonicity", panel);
      if (c.algorithm != Algorithm::Sppm || !p.interpolating()) {
        r.status = CheckResult::Status::Skipped;
        r.message = "applies to exact sppm in the interpolation regime";
      } else {
        std::size_t violations = 0;
        for (std::size_t j = 0; j < runs.size(); ++j)
          if (failures[j].empty()) violations += check_monotonicity(runs[j]).violations.size();
        r.details = {{"violations", violations}, {"runs", runs.size() - failed}};
        r.status = violations == 0 && failed == 0 ? CheckResult::Status::Passed : CheckResult::Status::Failed;
        r.message = std::to_string(violations) + " violations";
      }
      report.checks.push_back(std::move(r));
    }

    {
      CheckResult r = make_check("bound_dominance", panel);
      const std::optional<Theorem> theorem = select_theorem(c, p);
      if (!theorem) {
        r.status = CheckResult::Status::Skipped;
        r.message = "no bound applies to this algorithm";
      } else if (failed > 0 || diverged > 0) {
        r.status = CheckResult::Status::Failed;
        r.message = std::to_string(failed) + " failed and " + std::to_string(diverged) + " diverged runs";
      } else {
        BoundParams bp;
        bp.gamma = c.gamma;
        bp.mu = known.mu.value_or(0.0);
        bp.sigma_star_sq = known.sigma_star_sq.value_or(estimate_sigma_star(p, p.minimizer()));
        bp.delta_star = known.delta_star.value_or(
            estimate_delta_star(p, p.minimizer(), 200, radius, c.seeds.front()));
        bp.c = c_measured.value_or(0.0);
        bp.r0_sq = r0 * r0;
        bp.phi_value = phi_at_start(phi, r0, c.gamma);
        r.details = {{"theorem", std::string(to_string(*theorem))}, {"gamma", bp.gamma}, {"mu", bp.mu},
                     {"delta_star", bp.delta_star}, {"sigma_star_sq", bp.sigma_star_sq}, {"c", bp.c},
                     {"phi", bp.phi_value}};
        try {
          const BoundCurve curve = bound_curve(*theorem, bp);
          const AveragedTrajectory avg = average_trajectories(runs);
          const DominanceReport dom = check_bound_dominance(avg, curve, c.verify_slack);
          r.details["max_ratio"] = dom.max_ratio;
          r.details["violations"] = dom.violations.size();
          r.status = dom.passed() ? CheckResult::Status::Passed : CheckResult::Status::Failed;
          r.message = std::string(to_string(*theorem)) + ": max ratio " + format_double(dom.max_ratio) + ", " +
                      std::to_string(dom.violations.size()) + " violations";
          report.bounds.emplace_back(panel, dom);
        } catch (const PreconditionViolated& e) {
          r.status = CheckResult::Status::Skipped;
          r.message = "precondition not met, bound skipped: " + std::string(e.what());
        }
      }
      report.checks.push_back(std::move(r));
    }
  }
  for (const CheckResult& r : report.checks)
    log << "[" << to_string(r.status) << "] " << r.check << " " << r.panel << ": " << r.message << "\n";
  return report;
}

inline int cmd_verify(const fs::path& config_path, const Overrides& o = {}, std::ostream& log = std::cout,
                      std::ostream& err = std::cerr) {
  try {
    const ExperimentConfig c = load_config(config_path, o);
    const VerifyReport report = run_verify(c, log);
    const fs::path dir = c.output_dir;
    ensure_directory(dir);
    std::string lines;
    for (const CheckResult& r : report.checks) {
      json j = {{"check", r.check}, {"panel", r.panel}, {"status", std::string(to_string(r.status))},
                {"message", r.message}, {"details", r.details}};
      lines += j.dump() + "\n";
    }
    write_file(dir / "verify.jsonl", lines);
    for (const auto& [panel, dom] : report.bounds) write_file(dir / ("bound_" + panel + ".csv"), bound_csv(dom));
    log << (report.passed() ? "verify: all checks passed\n" : "verify: some checks failed\n");
    return report.passed() ? kExitOk : kExitVerify;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace sppm::harness

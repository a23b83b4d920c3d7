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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sppm/algorithms.hpp"
#include "sppm/error.hpp"
#include "sppm/harness/config.hpp"
#include "sppm/problems.hpp"
#include "sppm/theory.hpp"

namespace sppm::harness {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kTrajectoryHeader =
    "k,dist_sq,gap,component,inner_iterations,psi_grad_sq,step_norm_sq";
inline constexpr const char* kAggregateHeader = "k,cell,mean_dist_sq,median_dist_sq";
inline constexpr const char* kCellsHeader =
    "cell,value,runs,converged,completed,diverged,failed,median_iterations_to_rtol,inner_work_per_step";
inline constexpr const char* kBoundHeader = "k,bound,empirical,ratio";

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Hash of a run's canonical config, excluding the output location.
inline std::string config_hash(const ExperimentConfig& c) {
  ExperimentConfig copy = c;
  copy.output_dir = ".";
  copy.workers = 1;
  return fnv1a_hex(to_text(copy));
}

inline std::string trajectory_csv(const Trajectory& t) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const IterateRecord& r : t.records) {
    out += std::to_string(r.k) + ',' + format_double(r.dist_sq) + ',' + format_double(r.gap) + ',' +
           std::to_string(r.component) + ',' + std::to_string(r.inner_iterations) + ',' +
           format_double(r.psi_grad_sq) + ',' + format_double(r.step_norm_sq) + '\n';
  }
  return out;
}

inline std::string bound_csv(const DominanceReport& rep) {
  std::string out = kBoundHeader;
  out += '\n';
  for (const DominanceRow& r : rep.rows)
    out += std::to_string(r.k) + ',' + format_double(r.bound) + ',' + format_double(r.empirical) + ',' +
           format_double(r.ratio) + '\n';
  return out;
}

inline void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

inline void append_line(const fs::path& path, std::string_view line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open " + path.string() + " for appending");
  out << line << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Manifest description of a problem instance.
inline json problem_json(const ProblemInstance& p) {
  const ProblemConstants c = p.known_constants();
  return {{"kind", std::string(to_string(p.kind()))},
          {"n", p.num_components()},
          {"d", p.dimension()},
          {"s", p.power()},
          {"lambda", p.lambda()},
          {"spread", p.spread()},
          {"seed", p.seed()},
          {"interpolating", p.interpolating()},
          {"constants",
           {{"L0", optional_json(c.L0)},
            {"L1", optional_json(c.L1)},
            {"mu", optional_json(c.mu)},
            {"sigma_star_sq", optional_json(c.sigma_star_sq)},
            {"delta_star", optional_json(c.delta_star)}}}};
}

/// One manifest.jsonl line: full single-run config, problem, outcome.
inline json manifest_record(const ExperimentConfig& single_run, const ProblemInstance& p,
                            const Trajectory& t, const std::string& csv_name) {
  json cfg = json::object();
  for (const auto& [k, v] : to_key_values(single_run)) cfg[k] = v;
  json outcome = {{"kind", to_string(t.outcome)}};
  if (t.outcome.at_k) outcome["at_k"] = *t.outcome.at_k;
  return {{"csv", csv_name},
          {"hash", config_hash(single_run)},
          {"config", cfg},
          {"problem", problem_json(p)},
          {"outcome", outcome},
          {"iterations_to_rtol", t.iterations_to_rtol ? json(*t.iterations_to_rtol) : json(nullptr)},
          {"final_dist_sq", t.records.back().dist_sq},
          {"total_inner_iterations", t.total_inner_iterations},
          {"outer_steps", t.outer_steps},
          {"measured_c", optional_json(t.measured_c)}};
}

/// Rebuilds the run config from a manifest line.
inline ExperimentConfig config_from_manifest(const json& record) {
  ConfigMap map;
  int line = 0;
  for (const auto& [k, v] : record.at("config").items()) map.emplace(k, ConfigEntry{v.get<std::string>(), ++line});
  return parse_config(map);
}

/// Minimal CSV table: header names plus string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    return header.size();
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw IoError(path.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace sppm::harness

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

// sppm: run, sweep, verify and plot stochastic proximal point experiments.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sppm/harness/commands.hpp"

int main(int argc, char** argv) {
  using namespace sppm::harness;
  CLI::App app{"Stochastic proximal point experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string dir;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<double> rtol;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config, "Experiment config file")->required();
    sub->add_option("--out", out, "Output directory (overrides output_dir)");
    sub->add_option("--workers", workers, "Worker threads (overrides workers)");
    sub->add_option("--rtol", rtol, "Relative convergence threshold (overrides rtol)");
  };
  CLI::App* run = app.add_subcommand("run", "Execute a single run");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Execute a sweep grid and plot it");
  add_common(sweep);
  CLI::App* verify = app.add_subcommand("verify", "Check invariants and bounds");
  add_common(verify);
  CLI::App* plot = app.add_subcommand("plot", "Regenerate SVG plots from sweep CSVs");
  plot->add_option("dir", dir, "Directory holding aggregate_<panel>.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const Overrides o{out, workers, rtol};
  if (run->parsed()) return cmd_run(config, o);
  if (sweep->parsed()) return cmd_sweep(config, o);
  if (verify->parsed()) return cmd_verify(config, o);
  return cmd_plot(dir);
}

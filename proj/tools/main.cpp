// Copyright 2026 The scorewatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scorewatch/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"scorewatch: drift monitoring for model score streams"};
  app.require_subcommand(1);

  scorewatch::MonitorArgs monitor;
  std::uint64_t seed = 0;
  auto* mon = app.add_subcommand("monitor", "replay a scored event stream and explain alarms");
  mon->add_option("--input", monitor.input, "event stream (CSV or JSON lines)")->required();
  mon->add_option("--schema", monitor.schema, "feature schema JSON")->required();
  mon->add_option("--config", monitor.config, "key = value config file")->required();
  mon->add_option("--out", monitor.out, "run directory")->required();
  auto* seed_opt = mon->add_option("--seed", seed, "seed for every random choice");
  mon->add_flag("--debug-landmark", monitor.debug_landmark, "add the exact landmark percentile column");

  std::filesystem::path spec, out;
  auto* gen = app.add_subcommand("generate", "write a synthetic stream with labelled drifts");
  gen->add_option("--spec", spec, "synthetic spec JSON")->required();
  gen->add_option("--out", out, "output CSV path")->required();

  std::filesystem::path run;
  std::size_t alarm = 0;
  auto* rep = app.add_subcommand("report", "print an alarm report as Markdown");
  rep->add_option("--run", run, "run directory")->required();
  rep->add_option("--alarm", alarm, "alarm id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*mon) {
    if (*seed_opt) monitor.seed = seed;
    return scorewatch::cmd_monitor(monitor, std::cerr);
  }
  if (*gen) return scorewatch::cmd_generate(spec, out, std::cerr);
  return scorewatch::cmd_report(run, alarm, std::cout, std::cerr);
}

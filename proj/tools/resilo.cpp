/*
 Copyright 2026 The resilo Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "resilo/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  using namespace resilo;
  CLI::App app{"resilience metrics for controlled discrete-time systems"};
  app.require_subcommand(1);

  std::string config, out_dir = ".", alpha_path, which;
  auto *exact = app.add_subcommand("exact", "exact resilience for linear systems");
  exact->add_option("config", config, "problem config (JSON)")->required();
  exact->add_option("-o,--out", out_dir, "output directory");

  auto *scenario = app.add_subcommand("scenario", "scenario-based resilience");
  scenario->add_option("config", config, "problem config (JSON)")->required();
  scenario->add_option("-o,--out", out_dir, "output directory");

  int k = 0, M = 0;
  double beta = 0.0;
  auto *bound = app.add_subcommand("bound", "risk bound b(k) for M scenarios");
  bound->add_option("k", k)->required();
  bound->add_option("M", M)->required();
  bound->add_option("beta", beta)->required();

  SimulateOptions sim;
  auto *simulate = app.add_subcommand("simulate", "roll out a fixed controller");
  simulate->add_option("config", config, "problem config (JSON)")->required();
  simulate->add_option("alpha", alpha_path, "JSON with an \"alpha\" array")->required();
  simulate->add_option("--eps", sim.eps, "disturbance magnitude")->required();
  simulate->add_option("--count", sim.count, "random runs");
  simulate->add_option("--seed", sim.seed, "sampling seed");
  simulate->add_flag("--vertex", sim.vertex, "sample box corners only");
  simulate->add_option("-o,--out", out_dir, "output directory");

  CasestudyOptions cs;
  std::string kind = "linear";
  auto *casestudy = app.add_subcommand("casestudy", "builtin experiments");
  casestudy->add_option("which", which, "robot or acc")
      ->required()
      ->check(CLI::IsMember({"robot", "acc"}));
  casestudy->add_option("--controller", kind, "acc controller: linear or poly2")
      ->check(CLI::IsMember({"linear", "poly2"}));
  casestudy->add_option("--scenarios", cs.scenarios, "acc scenario count");
  casestudy->add_option("--seed", cs.seed, "seed");
  casestudy->add_option("-o,--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*exact)
    return cmd_exact(config, out_dir, std::cout, std::cerr);
  if (*scenario)
    return cmd_scenario(config, out_dir, std::cout, std::cerr);
  if (*bound)
    return cmd_bound(k, M, beta, std::cout, std::cerr);
  if (*simulate)
    return cmd_simulate(config, alpha_path, sim, out_dir, std::cout, std::cerr);
  cs.polynomial = kind == "poly2";
  return cmd_casestudy(which, cs, out_dir, std::cout, std::cerr);
}

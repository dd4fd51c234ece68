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
#ifndef RESILO_COMMANDS_HPP
#define RESILO_COMMANDS_HPP

#include "resilo/config.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace resilo {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,              // bad arguments, config or I/O
  kExitNominalInfeasible = 2,
  kExitNotProduct = 3,         // spec needs the scenario path
  kExitDeterminism = 4,
};

/// RFC 4180 CSV with header run_id,k,x_1..x_n,u_1..u_m; the input cells of
/// the final state row are empty.
void write_trajectories_csv(const std::string &path,
                            const std::vector<std::pair<int, Trajectory>> &runs,
                            int state_dim, int input_dim);

Json exact_report(const ProblemConfig &cfg, const ResilienceResult &r,
                  double solve_seconds);
Json scenario_report(const ProblemConfig &cfg, const ScenarioSolution &sol,
                     const ComplexityResult &cx,
                     const std::vector<ScenarioCertificate> &certs,
                     double solve_seconds);

int cmd_exact(const std::string &config_path, const std::string &out_dir,
              std::ostream &out, std::ostream &err);
int cmd_scenario(const std::string &config_path, const std::string &out_dir,
                 std::ostream &out, std::ostream &err);
int cmd_bound(int k, int M, double beta, std::ostream &out, std::ostream &err);

struct SimulateOptions {
  double eps = 0.0;
  int count = 100;
  std::uint64_t seed = 0;
  bool vertex = false; // draw disturbances from the corners of the box
};

/// `alpha_path` is a JSON file with an "alpha" array (a report works).
int cmd_simulate(const std::string &config_path, const std::string &alpha_path,
                 const SimulateOptions &opt, const std::string &out_dir,
                 std::ostream &out, std::ostream &err);

struct CasestudyOptions {
  bool polynomial = false; // acc only
  int scenarios = 100;     // acc only
  std::uint64_t seed = 0;
};

int cmd_casestudy(const std::string &which, const CasestudyOptions &opt,
                  const std::string &out_dir, std::ostream &out,
                  std::ostream &err);

} // namespace resilo

#endif // RESILO_COMMANDS_HPP

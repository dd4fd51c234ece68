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
#ifndef RESILO_CONFIG_HPP
#define RESILO_CONFIG_HPP

#include "resilo/dynamics.hpp"
#include "resilo/linear_exact.hpp"
#include "resilo/scenario.hpp"
#include "resilo/specs.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace resilo {

using Json = nlohmann::json;

struct SystemConfig {
  std::string type = "linear"; // "linear" or "builtin"
  MatrixXd A, B;               // linear only
  std::string id;              // builtin only
  ParamMap params;             // builtin only

  SystemModel build() const;
  bool operator==(const SystemConfig &o) const;
};

struct ControllerConfig {
  ControllerTemplate::Kind kind = ControllerTemplate::Kind::kLinear;
  int degree = 1;
  std::optional<VectorXd> alpha; // fixed parameters

  ControllerTemplate make(int state_dim, int input_dim) const;
  bool operator==(const ControllerConfig &o) const;
};

struct SolverSettings {
  std::uint64_t seed = 0;
  int scenarios = 100;
  std::vector<double> betas{1e-2};
  int random_starts = 8;
  int resolve_random_starts = 0;
  int max_evals = 2000;
  int max_restarts = 10;
  int grid_points = 64;
  double feas_tol = 1e-9;

  SearchConfig search() const;
  ScenarioSolverConfig scenario() const;
  bool operator==(const SolverSettings &o) const = default;
};

/// A complete, dimension-checked problem description.
struct ProblemConfig {
  SystemConfig system;
  ControllerConfig controller;
  SpecExpr spec = SpecExpr::all_of({});
  VectorXd x0;
  int horizon = 0;
  std::optional<InputBox> inputs;
  SolverSettings solver;

  int state_dim() const { return static_cast<int>(x0.size()); }
  InputBox input_box(int input_dim) const;
  bool operator==(const ProblemConfig &o) const;
};

/// Strict parse: unknown keys, wrong types and inconsistent dimensions
/// throw ConfigError.
ProblemConfig parse_config(const Json &j);
ProblemConfig load_config(const std::string &path);

Json to_json(const ProblemConfig &cfg);
Json spec_to_json(const SpecExpr &spec);
SpecExpr spec_from_json(const Json &j);

/// Sorted-key compact dump; equal configs give identical bytes.
std::string canonical_dump(const ProblemConfig &cfg);
/// FNV-1a 64 of the canonical dump, 16 hex digits.
std::string config_hash(const ProblemConfig &cfg);

/// Number, or the strings "inf" / "-inf" / "nan" for non-finite values.
Json json_number(double v);
double number_from_json(const Json &j, const std::string &where);
Json json_vector(const VectorXd &v);
Json json_matrix(const MatrixXd &m);

/// Shortest round-trip decimal, locale independent.
std::string format_double(double v);

/// Builtin configurations behind `casestudy`.
ProblemConfig robot_config();
ProblemConfig acc_config(bool polynomial, int scenarios, std::uint64_t seed);

} // namespace resilo

#endif // RESILO_CONFIG_HPP

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
#ifndef RESILO_CASESTUDIES_HPP
#define RESILO_CASESTUDIES_HPP

#include "resilo/dynamics.hpp"
#include "resilo/linear_exact.hpp"
#include "resilo/scenario.hpp"
#include "resilo/specs.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace resilo {

/// Planar robot, x+ = x + u + d, visiting R1 then R2 while staying in R3.
struct RobotCase {
  SystemModel system = SystemModel::linear(MatrixXd::Identity(2, 2),
                                           MatrixXd::Identity(2, 2));
  VectorXd x0 = (VectorXd(2) << 0.0, 0.2).finished();
  int horizon = 6;
  Polytope r1 = Polytope::box((VectorXd(2) << -0.3, 0.6).finished(),
                              (VectorXd(2) << 0.3, 1.25).finished());
  Polytope r2 = Polytope::box((VectorXd(2) << 0.8, 1.2).finished(),
                              (VectorXd(2) << 1.5, 1.75).finished());
  Polytope r3 = Polytope::box((VectorXd(2) << -1.0, 0.0).finished(),
                              (VectorXd(2) << 1.7, 2.0).finished());

  /// next^2 R1 and always[4,6] R2 and always[0,6] R3
  SpecExpr spec() const;
  StageSpec stage_spec() const;
};

/// Search defaults that reliably reach the robot optimum.
SearchConfig robot_search_config(std::uint64_t seed = 0);

struct RobotExperiment {
  RobotCase problem;
  ResilienceResult result;
  Trajectory nominal;
  std::vector<Trajectory> within;  // random disturbances at eps
  int within_passed = 0;
  Trajectory exceeding;            // worst vertex of the binding row at 1.2 eps
  bool exceeding_violates = false;
};

RobotExperiment robot_experiment(const SearchConfig &cfg, int count = 100,
                                 std::uint64_t rollout_seed = 1);

/// Adaptive cruise control: state (headway h, speed v), input wheel force F.
struct AccParams {
  double mass = 1370.0;
  double f0 = 51.0709;
  double f1 = 0.3494;
  double f2 = 0.4161;
  double force_min = -4031.9;
  double force_max = 2687.9;
  double tau = 0.5;   // sampling period
  double v0 = 15.0;   // lead vehicle speed
  double s_v = 2.0;   // lead-speed disturbance per unit delta
  double s_f = 2732.0; // force disturbance per unit delta
};

/// Builds the ACC model from named overrides of AccParams; unknown names
/// throw ConfigError.
AccParams acc_params(const ParamMap &overrides);
SystemModel acc_system(const AccParams &p);

namespace detail {
void register_builtin_dynamics(DynamicsRegistry &registry);
} // namespace detail

struct AccCase {
  AccParams params;
  VectorXd x0 = (VectorXd(2) << 60.0, 15.0).finished();
  int horizon = 4;

  /// at(B1, 3) and at(B2, 4) with squared-norm ball margins.
  SpecExpr spec() const;
  InputBox inputs() const;
  ScenarioProblem problem(const ControllerTemplate &controller) const;
};

enum class AccController { kLinear, kPoly2 };

struct AccExperiment {
  ScenarioProblem problem;
  ScenarioSet scenarios;
  ScenarioSolution solution;
  ComplexityResult complexity;
  std::vector<ScenarioCertificate> certificates; // one per beta
};

AccExperiment acc_experiment(const AccCase &acc, AccController kind, int M,
                             std::uint64_t seed,
                             const std::vector<double> &betas,
                             const ScenarioSolverConfig &cfg);

} // namespace resilo

#endif // RESILO_CASESTUDIES_HPP

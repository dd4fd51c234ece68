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
#ifndef RESILO_SCENARIO_HPP
#define RESILO_SCENARIO_HPP

#include "resilo/common.hpp"
#include "resilo/dynamics.hpp"
#include "resilo/linear_exact.hpp"
#include "resilo/nelder_mead.hpp"
#include "resilo/specs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace resilo {

/// M i.i.d. normalised disturbance sequences, each an n x N matrix with
/// entries uniform on [-1, 1).
struct ScenarioSet {
  int state_dim = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::vector<MatrixXd> deltas;

  int size() const { return static_cast<int>(deltas.size()); }
};

/// Counter-based uniform draw on [-1, 1) keyed by (seed, scenario, step,
/// coordinate); independent of how many scenarios are drawn.
double scenario_coordinate(std::uint64_t seed, std::uint64_t scenario, int step,
                           int coord);

/// Scenarios [first, first + M) of the stream selected by `seed`.
ScenarioSet sample_scenarios(int state_dim, int horizon, int M,
                             std::uint64_t seed, std::uint64_t first = 0);

/// Everything the scenario program needs besides the scenarios.
struct ScenarioProblem {
  SystemModel system;
  ControllerTemplate controller;
  VectorXd x0;
  SpecExpr spec;
  InputBox inputs;
  int horizon = 0;

  void check() const;
};

struct FeasibilityCheck {
  bool feasible = false;
  double margin = -kInf; // min(spec margin, input-box margin)
};

/// Rolls out under d = eps * delta and scores spec and input constraints.
/// Divergent rollouts are infeasible with margin -inf.
FeasibilityCheck scenario_feasible(const ScenarioProblem &problem,
                                   const ParamVector &alpha, double eps,
                                   const MatrixXd &delta);

struct ScenarioSolverConfig {
  int random_starts = 8;
  std::uint64_t seed = 0;
  /// Random starts in later working-set rounds (the incumbent is always one).
  int resolve_random_starts = 0;
  NelderMeadOptions nelder_mead;
  int grid_points = 64;
  double eps_initial = 1.0;
  double eps_cap = 1048576.0;
  double bisection_rel_tol = 1e-12;
  double feas_tol = 1e-9;
  /// Per-input scale of the search coordinates; <= 0 picks the half-width
  /// of a finite input box and 1 otherwise.
  double input_scale = 0.0;
  int threads = 0;
};

/**
 * Affine change of variables used by the outer search: search coordinates
 * z are controller coefficients in the monomial basis of (x - x0), scaled
 * per input. to_params maps back to the raw parameter layout.
 */
class SearchCoordinates {
public:
  SearchCoordinates(const ScenarioProblem &problem,
                    const ScenarioSolverConfig &cfg);
  ParamVector to_params(const VectorXd &z) const;
  VectorXd from_params(const ParamVector &alpha) const;
  int size() const { return static_cast<int>(scale_.size()) * basis_; }

private:
  ControllerTemplate tmpl_;
  VectorXd scale_;    // per input
  int basis_ = 0;     // monomials per input
  MatrixXd shift_;    // basis(x - x0) = shift_ * basis(x)
  MatrixXd unshift_;  // inverse of shift_
};

struct InnerEpsilon {
  double epsilon = 0.0;
  Status status = Status::kFeasible;
  int violations = 0;          // nominal violations when infeasible
  double max_violation = 0.0;  // -nominal margin when infeasible
};

/**
 * Largest eps (monotone envelope) with every listed scenario feasible for a
 * fixed controller: doubling bracket from eps_initial, a uniform grid over
 * the bracket, the first infeasible grid point, then bisection in the cell
 * below it. The result is always a feasible point.
 */
InnerEpsilon max_feasible_epsilon(const ScenarioProblem &problem,
                                  const ParamVector &alpha,
                                  const ScenarioSet &scenarios,
                                  const std::vector<int> &active,
                                  const ScenarioSolverConfig &cfg);

struct WorkingSetRound {
  int added = -1; // scenario position added before this round's solve
  double epsilon = 0.0;
  Status status = Status::kFeasible;
  VectorXd z;     // search coordinates of the round's optimum
  std::vector<StartTrace> starts;
};

struct ScenarioSolution {
  double epsilon = 0.0;
  ParamVector alpha;
  Status status = Status::kNominalInfeasible;
  std::vector<int> active;         // positions of the scenarios used
  std::vector<int> working_set;    // positions in the order they were added
  VectorXd margins;                // per active scenario at the optimum
  std::vector<WorkingSetRound> rounds;
};

/**
 * Solves max eps s.t. every scenario is feasible, over (eps, alpha).
 *
 * Constraint generation around the nested search: the working set starts
 * with the first active scenario; each round maximises the inner envelope
 * over the working set with a multi-start simplex search in search
 * coordinates, then adds the most violated remaining scenario (lowest
 * position on ties) until none is violated. Deterministic for a fixed
 * scenario list and configuration.
 */
ScenarioSolution solve_scenario_program(const ScenarioProblem &problem,
                                        const ScenarioSet &scenarios,
                                        const ScenarioSolverConfig &cfg);

/// Same, restricted to the listed scenario positions (sorted ascending).
ScenarioSolution solve_scenario_program(const ScenarioProblem &problem,
                                        const ScenarioSet &scenarios,
                                        std::vector<int> active,
                                        const ScenarioSolverConfig &cfg);

struct ComplexityResult {
  int complexity = 0;
  std::vector<int> support; // positions
  std::vector<int> resolved; // positions whose removal was actually re-solved
};

/**
 * Support constraints by leave-one-out re-solving: i is support when
 * dropping it moves eps by more than 1e-7 or alpha by more than 1e-6
 * (infinity norm). Scenarios outside the working set leave every round of
 * the solver unchanged and are skipped unless `exhaustive` is set. Throws
 * DeterminismViolation if re-solving the full set changes the optimum.
 */
ComplexityResult complexity(const ScenarioProblem &problem,
                            const ScenarioSolution &sol,
                            const ScenarioSet &scenarios,
                            const ScenarioSolverConfig &cfg,
                            bool exhaustive = false);

struct ScenarioCertificate {
  int scenarios = 0;
  int complexity = 0;
  double beta = 0.0;
  double bound = 1.0;
  std::vector<int> support;
  int feasible_raw = 0;       // margins >= 0
  int feasible_with_tol = 0;  // margins >= -feas_tol
  std::string statement;
};

ScenarioCertificate make_certificate(const ScenarioSolution &sol,
                                     const ComplexityResult &cx, double beta,
                                     double feas_tol = 1e-9);

/// complexity() followed by the risk bound for one confidence level.
ScenarioCertificate certify(const ScenarioProblem &problem,
                            const ScenarioSolution &sol,
                            const ScenarioSet &scenarios, double beta,
                            const ScenarioSolverConfig &cfg);

/// Fraction of `count` fresh scenarios (stream positions starting at
/// `first`) that the solution violates.
double empirical_violation_rate(const ScenarioProblem &problem,
                                const ScenarioSolution &sol, int count,
                                std::uint64_t seed, std::uint64_t first);

} // namespace resilo

#endif // RESILO_SCENARIO_HPP

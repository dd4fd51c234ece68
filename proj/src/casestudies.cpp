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
#include "resilo/casestudies.hpp"

#include <cmath>
#include <random>

namespace resilo {

SpecExpr RobotCase::spec() const {
  return SpecExpr::all_of({SpecExpr::next(2, r1), SpecExpr::always(4, 6, r2),
                           SpecExpr::always(0, 6, r3)});
}

StageSpec RobotCase::stage_spec() const {
  return to_stage_spec(spec(), horizon, 2);
}

SearchConfig robot_search_config(std::uint64_t seed) {
  SearchConfig cfg;
  cfg.seed = seed;
  // The landscape is piecewise linear with many kinks; a wider start pool
  // finds the optimum basin reliably.
  cfg.random_starts = 32;
  return cfg;
}

RobotExperiment robot_experiment(const SearchConfig &cfg, int count,
                                 std::uint64_t rollout_seed) {
  RobotExperiment ex;
  const RobotCase &rc = ex.problem;
  const StageSpec stages = rc.stage_spec();
  const SpecExpr spec = rc.spec();
  const auto tmpl = ControllerTemplate::linear(2, 2);
  ex.result = synthesize_linear(rc.system, stages, rc.x0, cfg);
  const ParamVector &alpha = ex.result.alpha;

  ex.nominal = rollout(rc.system, tmpl, alpha, rc.x0,
                       DisturbanceSeq::zero(2, rc.horizon));
  if (ex.result.status == Status::kNominalInfeasible)
    return ex;

  const double eps = std::isfinite(ex.result.epsilon) ? ex.result.epsilon : 1.0;
  std::mt19937_64 rng(rollout_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int r = 0; r < count; ++r) {
    MatrixXd delta(2, rc.horizon);
    for (Eigen::Index j = 0; j < delta.size(); ++j)
      delta.data()[j] = unif(rng);
    Trajectory t = rollout(rc.system, tmpl, alpha, rc.x0,
                           DisturbanceSeq::normalized(std::move(delta), eps));
    if (check_traj(spec, t))
      ++ex.within_passed;
    ex.within.push_back(std::move(t));
  }

  const auto *lin = rc.system.linear_part();
  const FarkasMatrices mats =
      build_farkas(*lin, stages, rc.x0, linear_gain(alpha, 2, 2),
                   linear_offset(alpha, 2, 2));
  const InnerResilience inner = fixed_controller_resilience(mats);
  if (inner.binding_row >= 0) {
    const MatrixXd d = worst_case_disturbance(mats, inner.binding_row,
                                              1.2 * eps, 2, rc.horizon);
    ex.exceeding =
        rollout(rc.system, tmpl, alpha, rc.x0, DisturbanceSeq::raw(d));
    ex.exceeding_violates = !check_traj(spec, ex.exceeding);
  }
  return ex;
}

AccParams acc_params(const ParamMap &overrides) {
  AccParams p;
  const std::pair<const char *, double *> fields[] = {
      {"mass", &p.mass},       {"f0", &p.f0},
      {"f1", &p.f1},           {"f2", &p.f2},
      {"force_min", &p.force_min}, {"force_max", &p.force_max},
      {"tau", &p.tau},         {"v0", &p.v0},
      {"s_v", &p.s_v},         {"s_f", &p.s_f}};
  for (const auto &[name, value] : overrides) {
    bool found = false;
    for (const auto &[key, slot] : fields)
      if (name == key) {
        *slot = value;
        found = true;
      }
    if (!found)
      throw ConfigError("unknown acc parameter '" + name + "'");
  }
  if (!(p.mass > 0.0) || !(p.tau > 0.0))
    throw ConfigError("acc mass and tau must be positive");
  return p;
}

SystemModel acc_system(const AccParams &p) {
  auto map = [p](const Eigen::Ref<const VectorXd> &x,
                 const Eigen::Ref<const VectorXd> &u, Eigen::Ref<VectorXd> out) {
    const double h = x(0), v = x(1);
    const double resist = p.f0 + p.f1 * v + p.f2 * v * v;
    out(0) = h + p.tau * (p.v0 - v);
    out(1) = v + p.tau / p.mass * (u(0) - resist);
  };
  VectorXd gain(2);
  gain << p.tau * p.s_v, p.tau * p.s_f / p.mass;
  return SystemModel::nonlinear("acc", 2, 1, map).with_disturbance_gain(gain);
}

namespace detail {
void register_builtin_dynamics(DynamicsRegistry &registry) {
  registry.add("acc", [](const ParamMap &params) {
    return acc_system(acc_params(params));
  });
}
} // namespace detail

SpecExpr AccCase::spec() const {
  const double r = std::sqrt(0.1);
  Ball b1{(VectorXd(2) << 58.75, 16.4).finished(), r};
  Ball b2{(VectorXd(2) << 57.75, 15.6).finished(), r};
  return SpecExpr::all_of({SpecExpr::at(b1, 3), SpecExpr::at(b2, 4)});
}

InputBox AccCase::inputs() const {
  return InputBox::make(VectorXd::Constant(1, params.force_min),
                        VectorXd::Constant(1, params.force_max));
}

ScenarioProblem AccCase::problem(const ControllerTemplate &controller) const {
  ScenarioProblem p{acc_system(params), controller, x0, spec(), inputs(),
                    horizon};
  p.check();
  return p;
}

AccExperiment acc_experiment(const AccCase &acc, AccController kind, int M,
                             std::uint64_t seed,
                             const std::vector<double> &betas,
                             const ScenarioSolverConfig &cfg) {
  const auto tmpl = kind == AccController::kLinear
                        ? ControllerTemplate::linear(2, 1)
                        : ControllerTemplate::polynomial(2, 1, 2);
  AccExperiment ex{acc.problem(tmpl), sample_scenarios(2, acc.horizon, M, seed),
                   {}, {}, {}};
  ex.solution = solve_scenario_program(ex.problem, ex.scenarios, cfg);
  ex.complexity = complexity(ex.problem, ex.solution, ex.scenarios, cfg);
  for (double beta : betas)
    ex.certificates.push_back(
        make_certificate(ex.solution, ex.complexity, beta, cfg.feas_tol));
  return ex;
}

} // namespace resilo

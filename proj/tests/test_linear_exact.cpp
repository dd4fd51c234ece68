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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resilo/casestudies.hpp"
#include "resilo/linear_exact.hpp"
#include "support/properties.hpp"

using namespace resilo;

namespace {
SystemModel integrator() {
  return SystemModel::linear(MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1));
}
Polytope unit() {
  return Polytope::box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0));
}
} // namespace

TEST_CASE("scalar integrator matrices by hand") {
  const auto spec = to_stage_spec(SpecExpr::always(0, 1, unit()), 1, 1);
  const auto mats = build_farkas(*integrator().linear_part(), spec, VectorXd::Zero(1),
                                 MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  MatrixXd E(4, 2);
  E << 0, 0, 0, 0, 0, 1, 0, -1;
  CHECK(mats.E == E);
  CHECK(mats.F == VectorXd::Ones(4));
  const auto inner = fixed_controller_resilience(mats);
  CHECK(inner.epsilon == 1.0);
  CHECK(inner.status == Status::kExact);
}

TEST_CASE("1/N integrator family") {
  const auto r = testing::integrator_family();
  INFO(r.detail);
  CHECK(r.ok);
  CHECK(r.cases == 8);
}

TEST_CASE("vertex oracle on the N = 4 integrator") {
  const auto spec = to_stage_spec(SpecExpr::always(0, 4, unit()), 4, 1);
  CHECK(vertex_oracle_resilience(integrator(), spec, VectorXd::Zero(1),
                                 ParamVector(VectorXd::Zero(2))) ==
        doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("Farkas value matches the vertex oracle") {
  const auto r = testing::oracle_equivalence(200);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("status edge cases") {
  const auto sys = integrator();
  const auto free = to_stage_spec(SpecExpr::all_of({}), 3, 1);
  auto r = evaluate_linear_controller(sys, free, VectorXd::Zero(1),
                                      ParamVector(VectorXd::Zero(2)));
  CHECK(r.status == Status::kUnbounded);
  CHECK(r.epsilon == kInf);

  const auto start = to_stage_spec(
      SpecExpr::at(Polytope::box(VectorXd::Ones(1), VectorXd::Constant(1, 2.0)), 0), 2, 1);
  r = synthesize_linear(sys, start, VectorXd::Zero(1));
  CHECK(r.status == Status::kNominalInfeasible);
  CHECK(r.epsilon == 0.0);

  // Only x(0) is constrained: disturbances never reach it.
  const auto only0 = to_stage_spec(SpecExpr::at(unit(), 0), 2, 1);
  r = evaluate_linear_controller(sys, only0, VectorXd::Zero(1), ParamVector(VectorXd::Zero(2)));
  CHECK(r.status == Status::kUnbounded);
}

TEST_CASE("deadbeat control resets the integrator every step") {
  const auto spec = to_stage_spec(SpecExpr::always(0, 5, unit()), 5, 1);
  const auto r = synthesize_linear(integrator(), spec, VectorXd::Zero(1));
  CHECK(r.status == Status::kExact);
  CHECK(r.epsilon == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exact path rejects what it cannot certify") {
  const auto spec = to_stage_spec(SpecExpr::always(0, 2, unit()), 2, 1);
  const auto bounded = InputBox::make(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(synthesize_linear(integrator(), spec, VectorXd::Zero(1), bounded), Error);
  CHECK_NOTHROW(synthesize_linear(integrator(), spec, VectorXd::Zero(1), InputBox::unbounded(1)));
  CHECK_THROWS_AS(synthesize_linear(acc_system(AccParams{}), spec, VectorXd::Zero(1)), Error);
  const auto big = to_stage_spec(SpecExpr::always(0, 7, Polytope::box(VectorXd::Constant(2, -1.0),
                                                                      VectorXd::Constant(2, 1.0))),
                                 7, 2);
  CHECK_THROWS_AS(vertex_oracle_resilience(SystemModel::linear(MatrixXd::Identity(2, 2),
                                                               MatrixXd::Identity(2, 2)),
                                           big, VectorXd::Zero(2), ParamVector(VectorXd::Zero(6))),
                  OracleTooLarge);
}

TEST_CASE("worst-case vertex attains the binding row") {
  testing::Rng rng(31);
  for (int c = 0; c < 50; ++c) {
    const auto inst = testing::random_linear_instance(rng);
    const int n = inst.system.state_dim(), m = inst.system.input_dim();
    const auto mats = build_farkas(*inst.system.linear_part(), inst.spec, inst.x0,
                                   linear_gain(inst.alpha, m, n),
                                   linear_offset(inst.alpha, m, n));
    const auto inner = fixed_controller_resilience(mats);
    if (inner.binding_row < 0)
      continue;
    const int N = inst.spec.horizon();
    const MatrixXd d = worst_case_disturbance(mats, inner.binding_row, 1.01 * inner.epsilon, n, N);
    CHECK(d.cwiseAbs().maxCoeff() <= 1.01 * inner.epsilon * (1 + 1e-12));
    const auto t = rollout(inst.system, ControllerTemplate::linear(n, m), inst.alpha, inst.x0,
                           DisturbanceSeq::raw(d));
    CHECK_FALSE(inst.spec.satisfied(t));
  }
}

TEST_CASE("robot synthesis") {
  const RobotCase rc;
  const auto r = synthesize_linear(rc.system, rc.stage_spec(), rc.x0, robot_search_config());
  CHECK(r.status == Status::kExact);
  CHECK(r.epsilon >= 0.0676);
  // The returned value is the exact resilience of the returned controller.
  const auto again = evaluate_linear_controller(rc.system, rc.stage_spec(), rc.x0, r.alpha);
  CHECK(again.epsilon == r.epsilon);
}

TEST_CASE("synthesis is independent of the worker count") {
  const RobotCase rc;
  auto cfg = robot_search_config(4);
  cfg.random_starts = 6;
  cfg.threads = 1;
  const auto a = synthesize_linear(rc.system, rc.stage_spec(), rc.x0, cfg);
  cfg.threads = 3;
  const auto b = synthesize_linear(rc.system, rc.stage_spec(), rc.x0, cfg);
  CHECK(a.alpha == b.alpha);
  CHECK(a.epsilon == b.epsilon);
  CHECK(a.best_start == b.best_start);
}

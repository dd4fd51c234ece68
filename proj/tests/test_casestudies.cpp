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
#include "support/properties.hpp"

using namespace resilo;

TEST_CASE("robot regions nest inside the workspace") {
  const RobotCase rc;
  for (const Polytope *r : {&rc.r1, &rc.r2}) {
    CHECK(r->rows() == 4);
    // Box corners from the row data: x <= hi, -x <= -lo.
    VectorXd lo(2), hi(2);
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 2; ++i) {
        if (r->G(j, i) > 0)
          hi(i) = r->H(j);
        if (r->G(j, i) < 0)
          lo(i) = -r->H(j);
      }
    for (double x : {lo(0), hi(0)})
      for (double y : {lo(1), hi(1)})
        CHECK(rc.r3.contains((VectorXd(2) << x, y).finished()));
  }
  CHECK(rc.r3.contains(rc.x0));
}

TEST_CASE("robot stage spec") {
  const RobotCase rc;
  const auto s = rc.stage_spec();
  REQUIRE(s.stages.size() == 7);
  CHECK(s.stages[0].rows() == 4);
  CHECK(s.stages[1].rows() == 4);
  CHECK(s.stages[2].rows() == 8);
  CHECK(s.stages[3].rows() == 4);
  for (int k = 4; k <= 6; ++k)
    CHECK(s.stages[k].rows() == 8);
}

TEST_CASE("robot experiment") {
  const auto ex = robot_experiment(robot_search_config());
  CHECK(ex.result.status == Status::kExact);
  CHECK(ex.result.epsilon >= 0.0686 - 1e-3);
  CHECK(check_traj(ex.problem.spec(), ex.nominal));
  CHECK(ex.within.size() == 100);
  CHECK(ex.within_passed == 100);
  CHECK(ex.exceeding_violates);
}

TEST_CASE("acc case data") {
  const AccCase acc;
  const auto spec = acc.spec();
  CHECK(spec.has_ball());
  CHECK(spec.max_time() == 4);
  CHECK(acc.inputs().lower(0) == -4031.9);
  CHECK(acc.inputs().upper(0) == 2687.9);
  CHECK_THROWS_AS(acc_params({{"mass", -1.0}}), ConfigError);
  CHECK(acc_params({{"v0", 12.0}}).v0 == 12.0);
}

TEST_CASE("acc linear experiment") {
  ScenarioSolverConfig cfg;
  const auto ex = acc_experiment(AccCase{}, AccController::kLinear, 40, 0,
                                 {1e-2, 1e-4}, cfg);
  CHECK(ex.solution.status == Status::kFeasible);
  CHECK(ex.solution.epsilon > 0.0);
  CHECK(ex.solution.margins.minCoeff() >= -1e-9);
  REQUIRE(ex.certificates.size() == 2);
  CHECK(ex.certificates[0].bound <= ex.certificates[1].bound);
  CHECK(ex.certificates[0].complexity == ex.complexity.complexity);
}

TEST_CASE("acc polynomial experiment") {
  ScenarioSolverConfig cfg;
  const auto ex = acc_experiment(AccCase{}, AccController::kPoly2, 30, 1, {1e-2}, cfg);
  CHECK(ex.solution.status == Status::kFeasible);
  CHECK(ex.solution.epsilon > 0.0);
  CHECK(ex.solution.alpha.size() == 6);
  CHECK(ex.certificates[0].bound > 0.0);
  CHECK(ex.certificates[0].bound <= 1.0);
}

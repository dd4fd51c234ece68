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

#include "resilo/specs.hpp"
#include "support/properties.hpp"

using namespace resilo;

namespace {
Polytope unit_box(int n) {
  return Polytope::box(VectorXd::Constant(n, -1.0), VectorXd::Constant(n, 1.0));
}
} // namespace

TEST_CASE("margin, check_traj and direct semantics agree") {
  const auto r = testing::margin_check_agreement(1000);
  INFO(r.detail);
  CHECK(r.ok);
  CHECK(r.cases == 1000);
}

TEST_CASE("desugaring preserves semantics for every window") {
  const auto r = testing::desugar_exhaustive();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("stage specs agree with check_traj") {
  const auto r = testing::stage_spec_agreement(500);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("box polytopes skip infinite bounds") {
  VectorXd lo(2), hi(2);
  lo << -1.0, -kInf;
  hi << 2.0, 3.0;
  const auto p = Polytope::box(lo, hi);
  CHECK(p.rows() == 3);
  CHECK(p.contains((VectorXd(2) << 0.0, -1e9).finished()));
  CHECK_FALSE(p.contains((VectorXd(2) << 0.0, 3.5).finished()));
  CHECK(p.margin((VectorXd(2) << 0.0, 0.0).finished()) == 1.0);
  CHECK(Polytope::unconstrained(2).margin(VectorXd::Zero(2)) == kInf);
}

TEST_CASE("ball margins are squared") {
  const Ball b{VectorXd::Zero(2), 2.0};
  CHECK(b.margin((VectorXd(2) << 1.0, 0.0).finished()) == 3.0);
  CHECK(b.contains((VectorXd(2) << 2.0, 0.0).finished()));
}

TEST_CASE("empty conjunction and disjunction") {
  const auto t = testing::states_only(MatrixXd::Zero(1, 3));
  CHECK(check_traj(SpecExpr::all_of({}), t));
  CHECK(margin(SpecExpr::all_of({}), t) == kInf);
  CHECK_FALSE(check_traj(SpecExpr::any_of({}), t));
  CHECK(margin(SpecExpr::any_of({}), t) == -kInf);
}

TEST_CASE("time indices are validated") {
  CHECK_THROWS_AS(validate(SpecExpr::always(0, 5, unit_box(1)), 4), SpecError);
  CHECK_THROWS_AS(SpecExpr::always(3, 2, unit_box(1)), SpecError);
  CHECK_NOTHROW(validate(SpecExpr::next(4, unit_box(1)), 4));
}

TEST_CASE("non-product specs are rejected by to_stage_spec") {
  const auto box = unit_box(1);
  CHECK_THROWS_AS(to_stage_spec(SpecExpr::any_of({SpecExpr::at(box, 1)}), 2, 1),
                  NotProductRepresentable);
  CHECK_THROWS_AS(to_stage_spec(SpecExpr::eventually(0, 2, box), 2, 1),
                  NotProductRepresentable);
  CHECK_THROWS_AS(to_stage_spec(SpecExpr::at(Ball{VectorXd::Zero(1), 1.0}, 1), 2, 1),
                  NotProductRepresentable);
  try {
    to_stage_spec(SpecExpr::eventually(0, 2, box), 2, 1);
  } catch (const NotProductRepresentable &e) {
    CHECK(std::string(e.what()).find("scenario") != std::string::npos);
  }
}

TEST_CASE("stage spec stacks constraints per step") {
  const auto a = unit_box(2);
  const auto b = Polytope::box(VectorXd::Zero(2), VectorXd::Constant(2, 3.0));
  const auto s = to_stage_spec(
      SpecExpr::all_of({SpecExpr::always(0, 3, a), SpecExpr::next(2, b)}), 3, 2);
  REQUIRE(s.stages.size() == 4);
  CHECK(s.stages[0].rows() == 4);
  CHECK(s.stages[2].rows() == 8);
  const auto state_box = Polytope::box(VectorXd::Constant(2, -5.0), VectorXd::Constant(2, 5.0));
  const auto boxed = to_stage_spec(SpecExpr::next(1, b), 3, 2, state_box);
  CHECK(boxed.stages[0].rows() == 4);
  CHECK(boxed.stages[1].rows() == 8);
}

TEST_CASE("stage monotonicity: looser H never breaks satisfaction") {
  testing::Rng rng(21);
  for (int c = 0; c < 200; ++c) {
    const int n = testing::uniform_int(rng, 1, 3), N = testing::uniform_int(rng, 0, 4);
    StageSpec tight, loose;
    for (int k = 0; k <= N; ++k) {
      const auto p = testing::random_polytope(rng, n);
      tight.stages.push_back(p);
      Polytope q = p;
      for (Eigen::Index j = 0; j < q.H.size(); ++j)
        q.H(j) += testing::uniform(rng, 0.0, 0.5);
      loose.stages.push_back(q);
    }
    const auto t = testing::states_only(testing::random_matrix(rng, n, N + 1, -1, 1));
    if (tight.satisfied(t))
      CHECK(loose.satisfied(t));
  }
}

TEST_CASE("input box margin") {
  const auto box = InputBox::make((VectorXd(2) << -1.0, -kInf).finished(),
                                  (VectorXd(2) << 2.0, kInf).finished());
  CHECK(box.margin((VectorXd(2) << 0.5, 1e6).finished()) == 1.5);
  CHECK(box.margin((VectorXd(2) << 3.0, 0.0).finished()) == -1.0);
  CHECK(InputBox::unbounded(2).is_unbounded());
  CHECK_FALSE(box.is_unbounded());
  CHECK_THROWS_AS(InputBox::make(VectorXd::Ones(1), VectorXd::Zero(1)), SpecError);
}

TEST_CASE("violation counting picks the best disjunct") {
  const auto t = testing::states_only((MatrixXd(1, 2) << 5.0, 5.0).finished());
  const auto box = unit_box(1);
  const auto e = SpecExpr::any_of({SpecExpr::always(0, 1, box), SpecExpr::at(box, 1)});
  CHECK(count_violations(e, t) == 1);
  CHECK(count_violations(SpecExpr::always(0, 1, box), t) == 2);
}

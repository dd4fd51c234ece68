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

#include "resilo/risk_bound.hpp"
#include "support/properties.hpp"

using namespace resilo;

TEST_CASE("reported bounds") {
  struct Row { int k, M; double b[3]; };
  const Row rows[] = {{4, 10, {0.851, 0.936, 0.971}},
                      {8, 100, {0.202, 0.259, 0.307}},
                      {9, 500, {0.046, 0.059, 0.072}}};
  const double betas[] = {1e-2, 1e-4, 1e-6};
  for (const auto &r : rows)
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(risk_bound(r.k, r.M, betas[i]) - r.b[i]) <= 5e-3);
}

TEST_CASE("bound at k = M is one") {
  CHECK(risk_bound(10, 10, 0.5) == 1.0);
  CHECK(risk_bound(1, 1, 1e-6) == 1.0);
}

TEST_CASE("root is a zero of the residual") {
  for (int k : {0, 3, 8}) {
    const double b = risk_bound(k, 100, 1e-2);
    CHECK(b > 0.0);
    CHECK(b < 1.0);
    CHECK(std::abs(risk_polynomial_log_residual(k, 100, 1e-2, 1.0 - b)) < 1e-6);
  }
}

TEST_CASE("monotonicity grid") {
  const auto r = testing::risk_bound_grid();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(risk_bound(11, 10, 0.1), Error);
  CHECK_THROWS_AS(risk_bound(-1, 10, 0.1), Error);
  CHECK_THROWS_AS(risk_bound(1, 10, 0.0), Error);
  CHECK_THROWS_AS(risk_bound(1, 10, 1.5), Error);
}

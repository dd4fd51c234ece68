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
#ifndef RESILO_COMMON_HPP
#define RESILO_COMMON_HPP

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace resilo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Parameter vector or matrix does not match the shape its consumer expects.
class ShapeError : public Error {
public:
  using Error::Error;
};

// A nonlinear map produced a non-finite state.
class RolloutDivergence : public Error {
public:
  RolloutDivergence(int step, const std::string &what)
      : Error(what), step_(step) {}
  int step() const { return step_; }

private:
  int step_;
};

// Malformed specification (time outside the horizon, M1 > M2, ...).
class SpecError : public Error {
public:
  using Error::Error;
};

// A disjunctive specification was handed to the exact (product-form) path.
class NotProductRepresentable : public SpecError {
public:
  using SpecError::SpecError;
};

class OracleTooLarge : public Error {
public:
  using Error::Error;
};

class NumericalFailure : public Error {
public:
  using Error::Error;
};

// Re-solving an identical scenario program produced a different optimum.
class DeterminismViolation : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Outcome classification shared by the exact and the scenario paths.
enum class Status {
  kExact,              // exact inner value for the returned controller
  kFeasible,           // scenario program solved, all scenarios satisfied
  kNominalInfeasible,  // no controller makes the nominal run satisfy the spec
  kUnbounded,          // no finite disturbance bound is binding
};

inline const char *to_string(Status s) {
  switch (s) {
  case Status::kExact:
    return "exact";
  case Status::kFeasible:
    return "feasible";
  case Status::kNominalInfeasible:
    return "nominal_infeasible";
  case Status::kUnbounded:
    return "unbounded";
  }
  return "unknown";
}

} // namespace resilo

#endif // RESILO_COMMON_HPP

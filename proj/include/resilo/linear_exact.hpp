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
#ifndef RESILO_LINEAR_EXACT_HPP
#define RESILO_LINEAR_EXACT_HPP

#include "resilo/common.hpp"
#include "resilo/dynamics.hpp"
#include "resilo/nelder_mead.hpp"
#include "resilo/specs.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace resilo {

/**
 * Data of the Farkas reformulation for one linear controller.
 *
 * With Y = [0; d_0; ...; d_{N-1}] / eps, the stage constraints read
 * E Y <= F / eps for all Y with Ab Y <= Bb, where Ab = [I; -I] and Bb = 1
 * describe |Y|_inf <= 1. Block row k of E is
 * [0, G_k Abar^{k-1}, ..., G_k, 0, ...] and
 * F_k = H_k - G_k Abar^k x - G_k sum_{i<k} Abar^i B alpha2, Abar = A + B alpha1.
 */
struct FarkasMatrices {
  MatrixXd Ab;
  VectorXd Bb;
  MatrixXd E;
  VectorXd F;
  std::vector<int> row_stage; // stage index of each row of E and F
  std::vector<int> row_local; // row index inside that stage
};

FarkasMatrices build_farkas(const LinearDynamics &dyn, const StageSpec &spec,
                            const VectorXd &x0, const MatrixXd &alpha1,
                            const VectorXd &alpha2);

struct InnerResilience {
  double epsilon = 0.0;
  Status status = Status::kExact;
  int binding_row = -1;   // row attaining the minimum ratio
  VectorXd weights;       // |row_r(E)|_1
  int violated_rows = 0;  // rows with F_r < -tol
  double max_violation = 0.0;
};

/**
 * Largest eps for the fixed controller encoded in `mats`.
 *
 * Minimising P Bb over P >= 0 with P Ab = E gives |row_r(E)|_1 per row, so
 * eps = min_r F_r / W_r over rows with W_r > 0; any F_r < -feas_tol makes
 * the nominal run infeasible and all-zero weights make eps unbounded.
 */
InnerResilience fixed_controller_resilience(const FarkasMatrices &mats,
                                            double feas_tol = 1e-9);

struct SearchConfig {
  int random_starts = 8;
  std::uint64_t seed = 0;
  double random_scale = 1.0; // random starts are uniform in [-scale, scale]
  NelderMeadOptions nelder_mead;
  double feas_tol = 1e-9;
  int threads = 0; // 0: RESILO_THREADS or machine parallelism
};

struct RowDiagnostic {
  int stage = 0;
  int row = 0;
  double slack = 0.0;
  double weight = 0.0;
  double ratio = kInf; // slack / weight, +inf when weight is zero
};

struct StartTrace {
  int start = 0;
  std::string kind; // "zero", "heuristic", "warm", "random"
  double initial_value = 0.0;
  double final_value = 0.0;
  int evals = 0;
  int restarts = 0;
};

struct ResilienceResult {
  double epsilon = 0.0;
  ParamVector alpha;
  Status status = Status::kNominalInfeasible;
  std::vector<RowDiagnostic> rows;
  std::vector<StartTrace> trace;
  int best_start = -1;
};

/// Exact resilience and row diagnostics for one linear controller.
ResilienceResult evaluate_linear_controller(const SystemModel &sys,
                                            const StageSpec &spec,
                                            const VectorXd &x0,
                                            const ParamVector &alpha,
                                            double feas_tol = 1e-9);

/**
 * Maximises the exact inner resilience over (alpha1, alpha2) with a
 * multi-start simplex search. Starts: zero, -B^+ A with alpha2 steering x(1)
 * to the centre of the first constrained stage, then `random_starts` draws.
 * The returned epsilon is the exact value at the returned alpha and hence a
 * certified lower bound on the optimal resilience.
 */
ResilienceResult synthesize_linear(const SystemModel &sys,
                                   const StageSpec &spec, const VectorXd &x0,
                                   const SearchConfig &cfg = {});

/// As above, rejecting any finite input bound.
ResilienceResult synthesize_linear(const SystemModel &sys,
                                   const StageSpec &spec, const VectorXd &x0,
                                   const InputBox &inputs,
                                   const SearchConfig &cfg = {});

struct OracleConfig {
  double rel_tol = 1e-8;
  int max_vertex_exponent = 12; // n * N bound
  double cap = 1048576.0;       // bracket limit before reporting +inf
};

/**
 * Brute-force resilience of a fixed linear controller: bisection on eps
 * where each probe rolls out every disturbance sequence with entries in
 * {-eps, +eps}. Affine stage constraints attain their worst case at such
 * vertices, so this is exact up to the bisection tolerance.
 */
double vertex_oracle_resilience(const SystemModel &sys, const StageSpec &spec,
                                const VectorXd &x0, const ParamVector &alpha,
                                const OracleConfig &cfg = {});

/// Vertex disturbance (n x N) maximising row `row` of E at magnitude eps.
MatrixXd worst_case_disturbance(const FarkasMatrices &mats, int row,
                                double eps, int state_dim, int horizon);

} // namespace resilo

#endif // RESILO_LINEAR_EXACT_HPP

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
#ifndef RESILO_SPECS_HPP
#define RESILO_SPECS_HPP

#include "resilo/common.hpp"
#include "resilo/dynamics.hpp"

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace resilo {

/// {x | G x <= H}. Zero rows encode the whole state space.
struct Polytope {
  MatrixXd G;
  VectorXd H;

  /// Axis-aligned box; infinite bounds produce no row.
  static Polytope box(const VectorXd &lower, const VectorXd &upper);
  static Polytope unconstrained(int state_dim);

  int rows() const { return static_cast<int>(G.rows()); }
  int dim() const { return static_cast<int>(G.cols()); }
  bool contains(const Eigen::Ref<const VectorXd> &x) const;
  /// min_j (H_j - G_j x); +inf without rows.
  double margin(const Eigen::Ref<const VectorXd> &x) const;

  bool operator==(const Polytope &o) const;
};

/// Closed Euclidean ball; usable only on the scenario path.
struct Ball {
  VectorXd center;
  double radius = 0.0;

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const Eigen::Ref<const VectorXd> &x) const;
  /// radius^2 - |x - center|^2
  double margin(const Eigen::Ref<const VectorXd> &x) const;

  bool operator==(const Ball &o) const {
    return radius == o.radius && center.size() == o.center.size() &&
           center == o.center;
  }
};

using Region = std::variant<Polytope, Ball>;

int region_dim(const Region &r);

/// Componentwise input bounds; entries may be infinite.
struct InputBox {
  VectorXd lower;
  VectorXd upper;

  static InputBox unbounded(int input_dim);
  static InputBox make(VectorXd lower, VectorXd upper);

  bool is_unbounded() const;
  /// min over coordinates of min(u - lower, upper - u).
  double margin(const Eigen::Ref<const VectorXd> &u) const;
};

/**
 * Boolean temporal formula over region atoms with a finite horizon.
 *
 * `at(A, k)` is the membership atom x(k) in A; the temporal forms are sugar
 * removed by desugar(): next(M, A) is at(A, M), always(M1, M2, A) the
 * conjunction and eventually(M1, M2, A) the disjunction of at(A, i) over
 * M1 <= i <= M2.
 */
class SpecExpr {
public:
  enum class Op { kAt, kAnd, kOr, kNext, kAlways, kEventually };

  static SpecExpr at(Region region, int time);
  static SpecExpr next(int steps, Region region);
  static SpecExpr always(int from, int to, Region region);
  static SpecExpr eventually(int from, int to, Region region);
  static SpecExpr all_of(std::vector<SpecExpr> children);
  static SpecExpr any_of(std::vector<SpecExpr> children);

  Op op() const { return node_->op; }
  /// Atom and temporal nodes only.
  const Region &region() const { return node_->region; }
  /// at: both equal the time; next: both equal the step count.
  int from() const { return node_->from; }
  int to() const { return node_->to; }
  const std::vector<SpecExpr> &children() const { return node_->children; }

  /// Largest referenced time index (-1 for an empty conjunction).
  int max_time() const;
  bool has_disjunction() const;
  bool has_ball() const;

  bool operator==(const SpecExpr &o) const;

private:
  struct Node {
    Op op;
    Region region;
    int from = 0;
    int to = 0;
    std::vector<SpecExpr> children;
  };
  explicit SpecExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Per-step product Gamma_0 x ... x Gamma_N.
struct StageSpec {
  std::vector<Polytope> stages;

  int horizon() const { return static_cast<int>(stages.size()) - 1; }
  int state_dim() const { return stages.empty() ? 0 : stages.front().dim(); }
  bool satisfied(const Trajectory &traj) const;
};

/// Throws SpecError when a time index falls outside [0, horizon].
void validate(const SpecExpr &expr, int horizon);

/// Rewrites temporal sugar into And/Or/at. With a horizon, validates first.
SpecExpr desugar(const SpecExpr &expr, std::optional<int> horizon = {});

/**
 * Stacks the rows of every polytope atom active at each step (plus the
 * optional state box at every step). Throws NotProductRepresentable on
 * disjunctions or ball atoms.
 */
StageSpec to_stage_spec(const SpecExpr &expr, int horizon, int state_dim,
                        const std::optional<Polytope> &state_box = {});

/// Closed (boundary-inclusive) satisfaction of `expr` by the states of traj.
bool check_traj(const SpecExpr &expr, const Trajectory &traj);

/// Quantitative margin: min over And, max over Or; >= 0 iff check_traj.
double margin(const SpecExpr &expr, const Trajectory &traj);

/// Number of violated atoms (min over Or branches); a search penalty.
int count_violations(const SpecExpr &expr, const Trajectory &traj);

} // namespace resilo

#endif // RESILO_SPECS_HPP

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
#ifndef RESILO_DYNAMICS_HPP
#define RESILO_DYNAMICS_HPP

#include "resilo/common.hpp"
#include "resilo/monomials.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace resilo {

/// x(k+1) = A x(k) + B u(k) + d(k)
struct LinearDynamics {
  MatrixXd A;
  MatrixXd B;
};

/// Writes f(x, u) into `out` (already sized to the state dimension).
using StepFn = std::function<void(const Eigen::Ref<const VectorXd> &x,
                                  const Eigen::Ref<const VectorXd> &u,
                                  Eigen::Ref<VectorXd> out)>;

/// x(k+1) = f(x(k), u(k)) + d(k) with f selected by name.
struct NonlinearDynamics {
  std::string id;
  StepFn map;
};

/**
 * A discrete-time controlled system with additive disturbance.
 *
 * The disturbance enters as `gain .* d(k)`; the gain defaults to ones and
 * lets builtin models route a normalised disturbance into physical channels.
 */
class SystemModel {
public:
  static SystemModel linear(MatrixXd A, MatrixXd B);
  static SystemModel nonlinear(std::string id, int state_dim, int input_dim,
                               StepFn map);

  SystemModel with_disturbance_gain(VectorXd gain) const;

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  bool is_linear() const {
    return std::holds_alternative<LinearDynamics>(dynamics_);
  }
  /// Null for nonlinear systems.
  const LinearDynamics *linear_part() const {
    return std::get_if<LinearDynamics>(&dynamics_);
  }
  /// "linear" or the builtin map identifier.
  std::string id() const;
  const VectorXd &disturbance_gain() const { return gain_; }
  bool has_unit_gain() const { return (gain_.array() == 1.0).all(); }

  /// out = f(x, u), without disturbance.
  void step(const Eigen::Ref<const VectorXd> &x,
            const Eigen::Ref<const VectorXd> &u, Eigen::Ref<VectorXd> out) const;

private:
  SystemModel() = default;
  int state_dim_ = 0;
  int input_dim_ = 0;
  std::variant<LinearDynamics, NonlinearDynamics> dynamics_;
  VectorXd gain_;
};

using ParamMap = std::map<std::string, double>;

/// Named builtin nonlinear maps. `global()` comes preloaded with "acc".
class DynamicsRegistry {
public:
  using Factory = std::function<SystemModel(const ParamMap &)>;

  static DynamicsRegistry &global();

  void add(const std::string &id, Factory factory);
  bool contains(const std::string &id) const;
  SystemModel make(const std::string &id, const ParamMap &params) const;
  std::vector<std::string> ids() const;

private:
  mutable std::mutex mutex_;
  std::map<std::string, Factory> factories_;
};

/// Flattened controller parameters alpha.
class ParamVector {
public:
  ParamVector() = default;
  explicit ParamVector(VectorXd values) : values_(std::move(values)) {}

  const VectorXd &values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_(i); }
  bool operator==(const ParamVector &o) const {
    return values_.size() == o.values_.size() && values_ == o.values_;
  }

private:
  VectorXd values_;
};

/**
 * Feedback law template pi_alpha.
 *
 * Linear: u = alpha1 x + alpha2, alpha = [alpha1 row-major (m x n), alpha2].
 * Polynomial of degree l: u = alpha xi(x) with alpha an m x C(n+l, n) matrix
 * stored row-major and xi the graded-lex monomial basis.
 */
class ControllerTemplate {
public:
  enum class Kind { kLinear, kPolynomial };

  static ControllerTemplate linear(int state_dim, int input_dim);
  static ControllerTemplate polynomial(int state_dim, int input_dim, int degree);

  Kind kind() const { return kind_; }
  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  /// 1 for linear templates.
  int degree() const { return degree_; }
  int param_count() const;
  /// Monomial exponents (polynomial templates only).
  const std::vector<Exponent> &exponents() const { return *exponents_; }

  void check(const ParamVector &alpha) const;

  bool operator==(const ControllerTemplate &o) const {
    return kind_ == o.kind_ && state_dim_ == o.state_dim_ &&
           input_dim_ == o.input_dim_ && degree_ == o.degree_;
  }

private:
  Kind kind_ = Kind::kLinear;
  int state_dim_ = 0;
  int input_dim_ = 0;
  int degree_ = 1;
  std::shared_ptr<const std::vector<Exponent>> exponents_;
};

ParamVector make_linear_params(const MatrixXd &gain, const VectorXd &offset);
MatrixXd linear_gain(const ParamVector &alpha, int input_dim, int state_dim);
VectorXd linear_offset(const ParamVector &alpha, int input_dim, int state_dim);

/// Degree-1 polynomial parameters reproducing the given linear law exactly.
ParamVector linear_to_polynomial(const ParamVector &alpha, int input_dim,
                                 int state_dim);
ParamVector polynomial_to_linear(const ParamVector &alpha, int input_dim,
                                 int state_dim);

VectorXd controller_eval(const ControllerTemplate &tmpl,
                         const ParamVector &alpha,
                         const Eigen::Ref<const VectorXd> &x);

/// Allocation-free repeated controller evaluation. Not thread-safe.
class ControllerEvaluator {
public:
  ControllerEvaluator(const ControllerTemplate &tmpl, const ParamVector &alpha);
  void operator()(const Eigen::Ref<const VectorXd> &x,
                  Eigen::Ref<VectorXd> u);

private:
  ControllerTemplate tmpl_;
  MatrixXd gain_;   // m x n, or m x D for polynomials
  VectorXd offset_; // linear only
  VectorXd basis_;
};

/// Closed-loop state/input sequence x(0..N), u(0..N-1), stored column-wise.
struct Trajectory {
  MatrixXd states; // n x (N+1)
  MatrixXd inputs; // m x N
  int horizon() const { return static_cast<int>(inputs.cols()); }
};

/**
 * Disturbance sequence d(0..N-1), columns of an n x N matrix.
 *
 * Normalised sequences store delta with |delta_k|_inf <= 1 and a magnitude
 * eps >= 0, the applied disturbance being eps * delta_k.
 */
class DisturbanceSeq {
public:
  static DisturbanceSeq raw(MatrixXd d);
  static DisturbanceSeq normalized(MatrixXd delta, double eps);
  static DisturbanceSeq zero(int state_dim, int horizon);

  int horizon() const { return static_cast<int>(d_.cols()); }
  int state_dim() const { return static_cast<int>(d_.rows()); }
  bool is_normalized() const { return normalized_; }
  double scale() const { return scale_; }
  const MatrixXd &values() const { return d_; }

private:
  DisturbanceSeq(MatrixXd d, double scale, bool normalized)
      : d_(std::move(d)), scale_(scale), normalized_(normalized) {}
  MatrixXd d_;
  double scale_ = 1.0;
  bool normalized_ = false;
};

Trajectory rollout(const SystemModel &sys, const ControllerTemplate &tmpl,
                   const ParamVector &alpha, const VectorXd &x0,
                   const DisturbanceSeq &dist);

/**
 * Hot-loop rollout into a preallocated trajectory; `disturbance` is n x N and
 * is scaled by `scale` before the system gain is applied. Returns the index
 * of the first step producing a non-finite state, or -1.
 */
int rollout_into(const SystemModel &sys, ControllerEvaluator &controller,
                 const Eigen::Ref<const VectorXd> &x0,
                 const Eigen::Ref<const MatrixXd> &disturbance, double scale,
                 Trajectory &out);

} // namespace resilo

#endif // RESILO_DYNAMICS_HPP

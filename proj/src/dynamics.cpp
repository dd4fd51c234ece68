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
#include "resilo/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace resilo {

namespace detail {
// Defined next to the case-study models.
void register_builtin_dynamics(DynamicsRegistry &registry);
} // namespace detail

SystemModel SystemModel::linear(MatrixXd A, MatrixXd B) {
  if (A.rows() == 0 || A.rows() != A.cols())
    throw ShapeError("A must be a nonempty square matrix");
  if (B.rows() != A.rows() || B.cols() == 0)
    throw ShapeError("B must have as many rows as A and at least one column");
  SystemModel s;
  s.state_dim_ = static_cast<int>(A.rows());
  s.input_dim_ = static_cast<int>(B.cols());
  s.gain_ = VectorXd::Ones(A.rows());
  s.dynamics_ = LinearDynamics{std::move(A), std::move(B)};
  return s;
}

SystemModel SystemModel::nonlinear(std::string id, int state_dim,
                                   int input_dim, StepFn map) {
  if (state_dim <= 0 || input_dim <= 0)
    throw ShapeError("state and input dimensions must be positive");
  if (!map)
    throw ShapeError("nonlinear dynamics need a map");
  SystemModel s;
  s.state_dim_ = state_dim;
  s.input_dim_ = input_dim;
  s.gain_ = VectorXd::Ones(state_dim);
  s.dynamics_ = NonlinearDynamics{std::move(id), std::move(map)};
  return s;
}

SystemModel SystemModel::with_disturbance_gain(VectorXd gain) const {
  if (gain.size() != state_dim_)
    throw ShapeError("disturbance gain must have the state dimension");
  SystemModel s = *this;
  s.gain_ = std::move(gain);
  return s;
}

std::string SystemModel::id() const {
  if (const auto *nl = std::get_if<NonlinearDynamics>(&dynamics_))
    return nl->id;
  return "linear";
}

void SystemModel::step(const Eigen::Ref<const VectorXd> &x,
                       const Eigen::Ref<const VectorXd> &u,
                       Eigen::Ref<VectorXd> out) const {
  if (const auto *lin = std::get_if<LinearDynamics>(&dynamics_)) {
    out.noalias() = lin->A * x;
    out.noalias() += lin->B * u;
  } else {
    std::get<NonlinearDynamics>(dynamics_).map(x, u, out);
  }
}

DynamicsRegistry &DynamicsRegistry::global() {
  static DynamicsRegistry *registry = [] {
    auto *r = new DynamicsRegistry;
    detail::register_builtin_dynamics(*r);
    return r;
  }();
  return *registry;
}

void DynamicsRegistry::add(const std::string &id, Factory factory) {
  std::lock_guard<std::mutex> lock(mutex_);
  factories_[id] = std::move(factory);
}

bool DynamicsRegistry::contains(const std::string &id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return factories_.count(id) != 0;
}

SystemModel DynamicsRegistry::make(const std::string &id,
                                   const ParamMap &params) const {
  Factory f;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = factories_.find(id);
    if (it == factories_.end())
      throw ConfigError("unknown builtin dynamics '" + id + "'");
    f = it->second;
  }
  return f(params);
}

std::vector<std::string> DynamicsRegistry::ids() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> out;
  for (const auto &[k, v] : factories_)
    out.push_back(k);
  return out;
}

ControllerTemplate ControllerTemplate::linear(int state_dim, int input_dim) {
  if (state_dim <= 0 || input_dim <= 0)
    throw ShapeError("controller dimensions must be positive");
  ControllerTemplate t;
  t.kind_ = Kind::kLinear;
  t.state_dim_ = state_dim;
  t.input_dim_ = input_dim;
  t.degree_ = 1;
  return t;
}

ControllerTemplate ControllerTemplate::polynomial(int state_dim, int input_dim,
                                                  int degree) {
  if (state_dim <= 0 || input_dim <= 0)
    throw ShapeError("controller dimensions must be positive");
  if (degree < 0)
    throw ShapeError("polynomial degree must be nonnegative");
  ControllerTemplate t;
  t.kind_ = Kind::kPolynomial;
  t.state_dim_ = state_dim;
  t.input_dim_ = input_dim;
  t.degree_ = degree;
  t.exponents_ = std::make_shared<const std::vector<Exponent>>(
      monomial_exponents(state_dim, degree));
  return t;
}

int ControllerTemplate::param_count() const {
  if (kind_ == Kind::kLinear)
    return input_dim_ * state_dim_ + input_dim_;
  return input_dim_ * monomial_count(state_dim_, degree_);
}

void ControllerTemplate::check(const ParamVector &alpha) const {
  if (alpha.size() != param_count()) {
    std::ostringstream os;
    os << "parameter vector has length " << alpha.size() << ", template needs "
       << param_count();
    throw ShapeError(os.str());
  }
}

ParamVector make_linear_params(const MatrixXd &gain, const VectorXd &offset) {
  if (gain.rows() != offset.size())
    throw ShapeError("gain rows must match offset length");
  const Eigen::Index m = gain.rows(), n = gain.cols();
  VectorXd v(m * n + m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      v(i * n + j) = gain(i, j);
  v.tail(m) = offset;
  return ParamVector(std::move(v));
}

MatrixXd linear_gain(const ParamVector &alpha, int input_dim, int state_dim) {
  if (alpha.size() != input_dim * state_dim + input_dim)
    throw ShapeError("linear parameter vector has the wrong length");
  MatrixXd g(input_dim, state_dim);
  for (int i = 0; i < input_dim; ++i)
    for (int j = 0; j < state_dim; ++j)
      g(i, j) = alpha[i * state_dim + j];
  return g;
}

VectorXd linear_offset(const ParamVector &alpha, int input_dim, int state_dim) {
  if (alpha.size() != input_dim * state_dim + input_dim)
    throw ShapeError("linear parameter vector has the wrong length");
  return alpha.values().tail(input_dim);
}

ParamVector linear_to_polynomial(const ParamVector &alpha, int input_dim,
                                 int state_dim) {
  const MatrixXd g = linear_gain(alpha, input_dim, state_dim);
  const VectorXd c = linear_offset(alpha, input_dim, state_dim);
  // Degree-1 basis order is [1, x_1, ..., x_n].
  const int D = state_dim + 1;
  VectorXd v(input_dim * D);
  for (int i = 0; i < input_dim; ++i) {
    v(i * D) = c(i);
    for (int j = 0; j < state_dim; ++j)
      v(i * D + 1 + j) = g(i, j);
  }
  return ParamVector(std::move(v));
}

ParamVector polynomial_to_linear(const ParamVector &alpha, int input_dim,
                                 int state_dim) {
  const int D = state_dim + 1;
  if (alpha.size() != input_dim * D)
    throw ShapeError("degree-1 polynomial parameter vector has the wrong length");
  MatrixXd g(input_dim, state_dim);
  VectorXd c(input_dim);
  for (int i = 0; i < input_dim; ++i) {
    c(i) = alpha[i * D];
    for (int j = 0; j < state_dim; ++j)
      g(i, j) = alpha[i * D + 1 + j];
  }
  return make_linear_params(g, c);
}

ControllerEvaluator::ControllerEvaluator(const ControllerTemplate &tmpl,
                                         const ParamVector &alpha)
    : tmpl_(tmpl) {
  tmpl.check(alpha);
  const int m = tmpl.input_dim(), n = tmpl.state_dim();
  if (tmpl.kind() == ControllerTemplate::Kind::kLinear) {
    gain_ = linear_gain(alpha, m, n);
    offset_ = linear_offset(alpha, m, n);
  } else {
    const int D = monomial_count(n, tmpl.degree());
    gain_.resize(m, D);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < D; ++j)
        gain_(i, j) = alpha[i * D + j];
    basis_.resize(D);
  }
}

void ControllerEvaluator::operator()(const Eigen::Ref<const VectorXd> &x,
                                     Eigen::Ref<VectorXd> u) {
  if (tmpl_.kind() == ControllerTemplate::Kind::kLinear) {
    u.noalias() = gain_ * x;
    u += offset_;
  } else {
    monomial_basis_into(x, tmpl_.exponents(), basis_);
    u.noalias() = gain_ * basis_;
  }
}

VectorXd controller_eval(const ControllerTemplate &tmpl,
                         const ParamVector &alpha,
                         const Eigen::Ref<const VectorXd> &x) {
  if (x.size() != tmpl.state_dim())
    throw ShapeError("state has the wrong dimension for the controller");
  ControllerEvaluator eval(tmpl, alpha);
  VectorXd u(tmpl.input_dim());
  eval(x, u);
  return u;
}

DisturbanceSeq DisturbanceSeq::raw(MatrixXd d) {
  return DisturbanceSeq(std::move(d), 1.0, false);
}

DisturbanceSeq DisturbanceSeq::normalized(MatrixXd delta, double eps) {
  if (!(eps >= 0.0))
    throw ShapeError("disturbance magnitude must be nonnegative");
  if (delta.size() > 0 && delta.cwiseAbs().maxCoeff() > 1.0)
    throw ShapeError("normalized disturbance must satisfy |delta|_inf <= 1");
  return DisturbanceSeq(std::move(delta), eps, true);
}

DisturbanceSeq DisturbanceSeq::zero(int state_dim, int horizon) {
  return DisturbanceSeq(MatrixXd::Zero(state_dim, horizon), 1.0, false);
}

int rollout_into(const SystemModel &sys, ControllerEvaluator &controller,
                 const Eigen::Ref<const VectorXd> &x0,
                 const Eigen::Ref<const MatrixXd> &disturbance, double scale,
                 Trajectory &out) {
  const auto N = disturbance.cols();
  const auto n = sys.state_dim();
  if (out.states.rows() != n || out.states.cols() != N + 1)
    out.states.resize(n, N + 1);
  if (out.inputs.rows() != sys.input_dim() || out.inputs.cols() != N)
    out.inputs.resize(sys.input_dim(), N);
  out.states.col(0) = x0;
  const VectorXd &gain = sys.disturbance_gain();
  for (Eigen::Index k = 0; k < N; ++k) {
    controller(out.states.col(k), out.inputs.col(k));
    auto next = out.states.col(k + 1);
    sys.step(out.states.col(k), out.inputs.col(k), next);
    next.array() += gain.array() * (scale * disturbance.col(k).array());
    if (!next.allFinite())
      return static_cast<int>(k);
  }
  return -1;
}

Trajectory rollout(const SystemModel &sys, const ControllerTemplate &tmpl,
                   const ParamVector &alpha, const VectorXd &x0,
                   const DisturbanceSeq &dist) {
  if (x0.size() != sys.state_dim())
    throw ShapeError("initial state has the wrong dimension");
  if (dist.state_dim() != sys.state_dim())
    throw ShapeError("disturbance has the wrong dimension");
  if (tmpl.state_dim() != sys.state_dim() ||
      tmpl.input_dim() != sys.input_dim())
    throw ShapeError("controller template does not match the system");
  ControllerEvaluator controller(tmpl, alpha);
  Trajectory traj;
  const int failed =
      rollout_into(sys, controller, x0, dist.values(), dist.scale(), traj);
  if (failed >= 0) {
    std::ostringstream os;
    os << "rollout diverged at step " << failed;
    throw RolloutDivergence(failed, os.str());
  }
  return traj;
}

} // namespace resilo

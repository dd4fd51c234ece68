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
#include "resilo/linear_exact.hpp"

#include "resilo/parallel.hpp"

#include <cmath>
#include <random>

namespace resilo {

FarkasMatrices build_farkas(const LinearDynamics &dyn, const StageSpec &spec,
                            const VectorXd &x0, const MatrixXd &alpha1,
                            const VectorXd &alpha2) {
  const auto n = dyn.A.rows();
  const auto m = dyn.B.cols();
  if (alpha1.rows() != m || alpha1.cols() != n || alpha2.size() != m)
    throw ShapeError("controller parameters do not match the system");
  if (x0.size() != n)
    throw ShapeError("initial state has the wrong dimension");
  if (spec.stages.empty())
    throw SpecError("stage spec needs at least one stage");
  const int N = spec.horizon();
  for (const auto &s : spec.stages)
    if (s.dim() != n)
      throw SpecError("stage dimension does not match the state");

  const MatrixXd Abar = dyn.A + dyn.B * alpha1;
  std::vector<MatrixXd> pow(static_cast<std::size_t>(N) + 1);
  pow[0] = MatrixXd::Identity(n, n);
  for (int k = 1; k <= N; ++k)
    pow[static_cast<std::size_t>(k)] = Abar * pow[static_cast<std::size_t>(k - 1)];

  Eigen::Index q = 0;
  for (const auto &s : spec.stages)
    q += s.rows();
  const Eigen::Index cols = n * (N + 1);

  FarkasMatrices out;
  out.Ab.resize(2 * cols, cols);
  out.Ab << MatrixXd::Identity(cols, cols), -MatrixXd::Identity(cols, cols);
  out.Bb = VectorXd::Ones(2 * cols);
  out.E = MatrixXd::Zero(q, cols);
  out.F.resize(q);
  out.row_stage.reserve(static_cast<std::size_t>(q));
  out.row_local.reserve(static_cast<std::size_t>(q));

  const VectorXd Balpha2 = dyn.B * alpha2;
  VectorXd drift = VectorXd::Zero(n); // sum_{i<k} Abar^i B alpha2
  Eigen::Index r = 0;
  for (int k = 0; k <= N; ++k) {
    const Polytope &st = spec.stages[static_cast<std::size_t>(k)];
    const auto qk = st.rows();
    if (k > 0)
      drift += pow[static_cast<std::size_t>(k - 1)] * Balpha2;
    if (qk > 0) {
      for (int j = 1; j <= k; ++j)
        out.E.block(r, j * n, qk, n) = st.G * pow[static_cast<std::size_t>(k - j)];
      out.F.segment(r, qk) =
          st.H - st.G * (pow[static_cast<std::size_t>(k)] * x0) - st.G * drift;
    }
    for (Eigen::Index i = 0; i < qk; ++i) {
      out.row_stage.push_back(k);
      out.row_local.push_back(static_cast<int>(i));
    }
    r += qk;
  }
  return out;
}

InnerResilience fixed_controller_resilience(const FarkasMatrices &mats,
                                            double feas_tol) {
  InnerResilience res;
  res.weights = mats.E.rows() > 0 ? VectorXd(mats.E.cwiseAbs().rowwise().sum())
                                  : VectorXd(0);
  for (Eigen::Index r = 0; r < mats.F.size(); ++r) {
    if (mats.F(r) < -feas_tol) {
      ++res.violated_rows;
      res.max_violation = std::max(res.max_violation, -mats.F(r));
    }
  }
  if (res.violated_rows > 0) {
    res.epsilon = 0.0;
    res.status = Status::kNominalInfeasible;
    return res;
  }
  double best = kInf;
  for (Eigen::Index r = 0; r < mats.F.size(); ++r) {
    if (res.weights(r) > 0.0) {
      const double ratio = std::max(0.0, mats.F(r)) / res.weights(r);
      if (ratio < best) {
        best = ratio;
        res.binding_row = static_cast<int>(r);
      }
    }
  }
  res.epsilon = best;
  res.status = std::isinf(best) ? Status::kUnbounded : Status::kExact;
  return res;
}

namespace {

ResilienceResult result_from(const FarkasMatrices &mats,
                             const InnerResilience &inner,
                             const ParamVector &alpha) {
  ResilienceResult out;
  out.epsilon = inner.epsilon;
  out.status = inner.status;
  out.alpha = alpha;
  out.rows.reserve(static_cast<std::size_t>(mats.F.size()));
  for (Eigen::Index r = 0; r < mats.F.size(); ++r) {
    RowDiagnostic d;
    d.stage = mats.row_stage[static_cast<std::size_t>(r)];
    d.row = mats.row_local[static_cast<std::size_t>(r)];
    d.slack = mats.F(r);
    d.weight = inner.weights(r);
    d.ratio = d.weight > 0.0 ? d.slack / d.weight : kInf;
    out.rows.push_back(d);
  }
  return out;
}

const LinearDynamics &require_linear(const SystemModel &sys) {
  const LinearDynamics *lin = sys.linear_part();
  if (!lin)
    throw Error("the exact path needs linear dynamics; use the scenario path");
  if (!sys.has_unit_gain())
    throw Error("the exact path needs a unit disturbance gain");
  return *lin;
}

// Centre of the axis-aligned bounds implied by single-coordinate rows.
VectorXd box_center(const Polytope &p, const VectorXd &fallback) {
  const auto n = fallback.size();
  VectorXd lo = VectorXd::Constant(n, -kInf), hi = VectorXd::Constant(n, kInf);
  for (Eigen::Index r = 0; r < p.G.rows(); ++r) {
    Eigen::Index idx = -1;
    int nonzero = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (p.G(r, j) != 0.0) {
        idx = j;
        ++nonzero;
      }
    if (nonzero != 1)
      continue;
    const double bound = p.H(r) / p.G(r, idx);
    if (p.G(r, idx) > 0.0)
      hi(idx) = std::min(hi(idx), bound);
    else
      lo(idx) = std::max(lo(idx), bound);
  }
  VectorXd c = fallback;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(lo(j)) && std::isfinite(hi(j)))
      c(j) = 0.5 * (lo(j) + hi(j));
    else if (std::isfinite(lo(j)))
      c(j) = lo(j);
    else if (std::isfinite(hi(j)))
      c(j) = hi(j);
  }
  return c;
}

// Prefers larger epsilon, then smaller |alpha|_2, then the earlier start.
bool better(const ResilienceResult &a, const ResilienceResult &b) {
  if (a.epsilon != b.epsilon)
    return a.epsilon > b.epsilon;
  return a.alpha.values().norm() < b.alpha.values().norm();
}

} // namespace

ResilienceResult evaluate_linear_controller(const SystemModel &sys,
                                            const StageSpec &spec,
                                            const VectorXd &x0,
                                            const ParamVector &alpha,
                                            double feas_tol) {
  const LinearDynamics &lin = require_linear(sys);
  const int m = sys.input_dim(), n = sys.state_dim();
  const auto mats = build_farkas(lin, spec, x0, linear_gain(alpha, m, n),
                                 linear_offset(alpha, m, n));
  return result_from(mats, fixed_controller_resilience(mats, feas_tol), alpha);
}

ResilienceResult synthesize_linear(const SystemModel &sys,
                                   const StageSpec &spec, const VectorXd &x0,
                                   const InputBox &inputs,
                                   const SearchConfig &cfg) {
  if (!inputs.is_unbounded())
    throw Error("input constraints are not supported by the exact path; use "
                "the scenario path (`scenario` command)");
  return synthesize_linear(sys, spec, x0, cfg);
}

ResilienceResult synthesize_linear(const SystemModel &sys,
                                   const StageSpec &spec, const VectorXd &x0,
                                   const SearchConfig &cfg) {
  const LinearDynamics &lin = require_linear(sys);
  const int n = sys.state_dim(), m = sys.input_dim();
  const int d = m * n + m;

  // Stage 0 does not depend on the controller.
  if (!spec.stages.empty() && spec.stages.front().margin(x0) < -cfg.feas_tol) {
    auto res = evaluate_linear_controller(sys, spec, x0,
                                          ParamVector(VectorXd::Zero(d)),
                                          cfg.feas_tol);
    res.status = Status::kNominalInfeasible;
    res.epsilon = 0.0;
    return res;
  }

  std::vector<std::pair<std::string, VectorXd>> starts;
  starts.emplace_back("zero", VectorXd::Zero(d));
  {
    const MatrixXd Bpinv = lin.B.completeOrthogonalDecomposition().pseudoInverse();
    const MatrixXd gain = -Bpinv * lin.A;
    VectorXd target = x0;
    for (int k = 1; k <= spec.horizon(); ++k)
      if (spec.stages[static_cast<std::size_t>(k)].rows() > 0) {
        target = box_center(spec.stages[static_cast<std::size_t>(k)], x0);
        break;
      }
    const VectorXd offset = Bpinv * (target - (lin.A + lin.B * gain) * x0);
    starts.emplace_back("heuristic", make_linear_params(gain, offset).values());
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-cfg.random_scale,
                                              cfg.random_scale);
  for (int s = 0; s < cfg.random_starts; ++s) {
    VectorXd z(d);
    for (int i = 0; i < d; ++i)
      z(i) = unif(rng);
    starts.emplace_back("random", std::move(z));
  }

  // Negated inner resilience; infeasible controllers pay violated-row count
  // plus the largest violation.
  auto objective = [&](const VectorXd &z) {
    const ParamVector alpha(z);
    const auto mats = build_farkas(lin, spec, x0, linear_gain(alpha, m, n),
                                   linear_offset(alpha, m, n));
    const auto inner = fixed_controller_resilience(mats, cfg.feas_tol);
    if (inner.status == Status::kNominalInfeasible)
      return static_cast<double>(inner.violated_rows) + inner.max_violation;
    return -inner.epsilon;
  };

  std::vector<ResilienceResult> per_start(starts.size());
  parallel_for(
      static_cast<int>(starts.size()),
      [&](int s) {
        const auto &[kind, z0] = starts[static_cast<std::size_t>(s)];
        const double f0 = objective(z0);
        const auto nm = nelder_mead_minimize(objective, z0, cfg.nelder_mead);
        auto res = evaluate_linear_controller(sys, spec, x0, ParamVector(nm.x),
                                              cfg.feas_tol);
        res.trace.push_back(StartTrace{s, kind, -f0, -nm.f, nm.evals, nm.restarts});
        per_start[static_cast<std::size_t>(s)] = std::move(res);
      },
      cfg.threads);

  int best = 0;
  for (int s = 1; s < static_cast<int>(per_start.size()); ++s)
    if (better(per_start[static_cast<std::size_t>(s)],
               per_start[static_cast<std::size_t>(best)]))
      best = s;

  ResilienceResult out = per_start[static_cast<std::size_t>(best)];
  out.trace.clear();
  for (auto &r : per_start)
    out.trace.push_back(r.trace.front());
  out.best_start = best;
  if (out.status == Status::kNominalInfeasible)
    out.epsilon = 0.0;
  return out;
}

namespace {

class VertexSearch {
public:
  VertexSearch(const SystemModel &sys, const StageSpec &spec,
               const ControllerTemplate &tmpl, const ParamVector &alpha)
      : sys_(sys), spec_(spec), controller_(tmpl, alpha),
        n_(sys.state_dim()), N_(spec.horizon()) {
    xs_.resize(static_cast<std::size_t>(N_) + 1, VectorXd(n_));
    u_.resize(sys.input_dim());
    base_.resize(n_);
  }

  bool all_vertices_feasible(const VectorXd &x0, double eps) {
    xs_[0] = x0;
    eps_ = eps;
    return visit(0);
  }

private:
  bool visit(int k) {
    const VectorXd &x = xs_[static_cast<std::size_t>(k)];
    if (!spec_.stages[static_cast<std::size_t>(k)].contains(x))
      return false;
    if (k == N_)
      return true;
    controller_(x, u_);
    sys_.step(x, u_, base_);
    const VectorXd base = base_;
    const auto patterns = 1u << n_;
    for (unsigned s = 0; s < patterns; ++s) {
      VectorXd &next = xs_[static_cast<std::size_t>(k + 1)];
      for (int i = 0; i < n_; ++i) {
        const double d = ((s >> i) & 1u) ? eps_ : -eps_;
        next(i) = base(i) + sys_.disturbance_gain()(i) * d;
      }
      if (!visit(k + 1))
        return false;
    }
    return true;
  }

  const SystemModel &sys_;
  const StageSpec &spec_;
  ControllerEvaluator controller_;
  int n_;
  int N_;
  double eps_ = 0.0;
  std::vector<VectorXd> xs_;
  VectorXd u_;
  VectorXd base_;
};

} // namespace

double vertex_oracle_resilience(const SystemModel &sys, const StageSpec &spec,
                                const VectorXd &x0, const ParamVector &alpha,
                                const OracleConfig &cfg) {
  if (sys.state_dim() * spec.horizon() > cfg.max_vertex_exponent)
    throw OracleTooLarge("vertex oracle needs n * N <= " +
                         std::to_string(cfg.max_vertex_exponent));
  VertexSearch search(sys, spec,
                      ControllerTemplate::linear(sys.state_dim(), sys.input_dim()),
                      alpha);
  if (!search.all_vertices_feasible(x0, 0.0))
    return 0.0;
  double lo = 0.0, hi = 1.0;
  while (search.all_vertices_feasible(x0, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > cfg.cap)
      return kInf;
  }
  for (int it = 0; it < 2000 && hi - lo > cfg.rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    if (search.all_vertices_feasible(x0, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

MatrixXd worst_case_disturbance(const FarkasMatrices &mats, int row, double eps,
                                int state_dim, int horizon) {
  MatrixXd d(state_dim, horizon);
  for (int j = 0; j < horizon; ++j)
    for (int i = 0; i < state_dim; ++i) {
      const double e = mats.E(row, (j + 1) * state_dim + i);
      d(i, j) = e >= 0.0 ? eps : -eps;
    }
  return d;
}

} // namespace resilo

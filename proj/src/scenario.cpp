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
#include "resilo/scenario.hpp"

#include "resilo/parallel.hpp"
#include "resilo/risk_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace resilo {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace

double scenario_coordinate(std::uint64_t seed, std::uint64_t scenario, int step,
                           int coord) {
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ scenario);
  h = splitmix(h ^ ((static_cast<std::uint64_t>(static_cast<std::uint32_t>(step)) << 32) |
                    static_cast<std::uint32_t>(coord)));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53; // [0, 1)
  return 2.0 * u - 1.0;
}

ScenarioSet sample_scenarios(int state_dim, int horizon, int M,
                             std::uint64_t seed, std::uint64_t first) {
  if (M < 0 || state_dim <= 0 || horizon < 0)
    throw Error("invalid scenario set dimensions");
  ScenarioSet set;
  set.state_dim = state_dim;
  set.horizon = horizon;
  set.seed = seed;
  set.deltas.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    MatrixXd d(state_dim, horizon);
    for (int k = 0; k < horizon; ++k)
      for (int j = 0; j < state_dim; ++j)
        d(j, k) = scenario_coordinate(seed, first + static_cast<std::uint64_t>(i), k, j);
    set.deltas.push_back(std::move(d));
  }
  return set;
}

void ScenarioProblem::check() const {
  const int n = system.state_dim(), m = system.input_dim();
  if (controller.state_dim() != n || controller.input_dim() != m)
    throw ShapeError("controller template does not match the system");
  if (x0.size() != n)
    throw ShapeError("initial state has the wrong dimension");
  if (inputs.lower.size() != m || inputs.upper.size() != m)
    throw ShapeError("input box has the wrong dimension");
  if (horizon < 0)
    throw SpecError("horizon must be nonnegative");
  validate(spec, horizon);
}

namespace {

// Rollout + scoring with reusable buffers for one controller.
class Scorer {
public:
  Scorer(const ScenarioProblem &p, const ParamVector &alpha)
      : p_(p), controller_(p.controller, alpha),
        zero_(MatrixXd::Zero(p.system.state_dim(), p.horizon)) {}

  double margin(double eps, const MatrixXd &delta) {
    if (rollout_into(p_.system, controller_, p_.x0, delta, eps, traj_) >= 0)
      return -kInf;
    double m = resilo::margin(p_.spec, traj_);
    for (Eigen::Index k = 0; k < traj_.inputs.cols(); ++k)
      m = std::min(m, p_.inputs.margin(traj_.inputs.col(k)));
    return m;
  }

  // Nominal margin and the number of violated atoms and input entries.
  std::pair<double, int> nominal() {
    const double m = margin(0.0, zero_);
    if (m >= 0.0)
      return {m, 0};
    if (!traj_.states.allFinite())
      return {m, 1 << 20};
    int count = count_violations(p_.spec, traj_);
    for (Eigen::Index k = 0; k < traj_.inputs.cols(); ++k)
      for (Eigen::Index i = 0; i < traj_.inputs.rows(); ++i) {
        const double u = traj_.inputs(i, k);
        if (u < p_.inputs.lower(i) || u > p_.inputs.upper(i))
          ++count;
      }
    return {m, count};
  }

private:
  const ScenarioProblem &p_;
  ControllerEvaluator controller_;
  MatrixXd zero_;
  Trajectory traj_;
};

} // namespace

FeasibilityCheck scenario_feasible(const ScenarioProblem &problem,
                                   const ParamVector &alpha, double eps,
                                   const MatrixXd &delta) {
  if (delta.rows() != problem.system.state_dim() ||
      delta.cols() != problem.horizon)
    throw ShapeError("scenario has the wrong shape");
  Scorer scorer(problem, alpha);
  const double m = scorer.margin(eps, delta);
  return {m >= 0.0, m};
}

SearchCoordinates::SearchCoordinates(const ScenarioProblem &problem,
                                     const ScenarioSolverConfig &cfg)
    : tmpl_(problem.controller) {
  const int m = tmpl_.input_dim(), n = tmpl_.state_dim();
  scale_.resize(m);
  for (int i = 0; i < m; ++i) {
    const double lo = problem.inputs.lower(i), hi = problem.inputs.upper(i);
    if (cfg.input_scale > 0.0)
      scale_(i) = cfg.input_scale;
    else if (std::isfinite(lo) && std::isfinite(hi) && hi > lo)
      scale_(i) = 0.5 * (hi - lo);
    else
      scale_(i) = 1.0;
  }
  const int degree = tmpl_.degree();
  basis_ = monomial_count(n, degree);
  shift_ = monomial_shift_transform(problem.x0, degree);
  unshift_ = monomial_shift_transform(-problem.x0, degree);
}

ParamVector SearchCoordinates::to_params(const VectorXd &z) const {
  const int m = tmpl_.input_dim();
  MatrixXd centred(m, basis_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < basis_; ++j)
      centred(i, j) = scale_(i) * z(i * basis_ + j);
  const MatrixXd raw = centred * shift_;
  VectorXd flat(m * basis_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < basis_; ++j)
      flat(i * basis_ + j) = raw(i, j);
  ParamVector poly(std::move(flat));
  if (tmpl_.kind() == ControllerTemplate::Kind::kLinear)
    return polynomial_to_linear(poly, m, tmpl_.state_dim());
  return poly;
}

VectorXd SearchCoordinates::from_params(const ParamVector &alpha) const {
  tmpl_.check(alpha);
  const int m = tmpl_.input_dim();
  const ParamVector poly =
      tmpl_.kind() == ControllerTemplate::Kind::kLinear
          ? linear_to_polynomial(alpha, m, tmpl_.state_dim())
          : alpha;
  MatrixXd raw(m, basis_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < basis_; ++j)
      raw(i, j) = poly[i * basis_ + j];
  const MatrixXd centred = raw * unshift_;
  VectorXd z(m * basis_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < basis_; ++j)
      z(i * basis_ + j) = centred(i, j) / scale_(i);
  return z;
}

InnerEpsilon max_feasible_epsilon(const ScenarioProblem &problem,
                                  const ParamVector &alpha,
                                  const ScenarioSet &scenarios,
                                  const std::vector<int> &active,
                                  const ScenarioSolverConfig &cfg) {
  Scorer scorer(problem, alpha);
  InnerEpsilon out;
  const auto [m0, violations] = scorer.nominal();
  if (!(m0 >= 0.0)) {
    out.status = Status::kNominalInfeasible;
    out.violations = violations;
    out.max_violation = std::isfinite(m0) ? -m0 : 1e12;
    return out;
  }
  if (active.empty()) {
    out.epsilon = kInf;
    out.status = Status::kUnbounded;
    return out;
  }
  auto all_feasible = [&](double eps) {
    for (int pos : active)
      if (!(scorer.margin(eps, scenarios.deltas[static_cast<std::size_t>(pos)]) >= 0.0))
        return false;
    return true;
  };

  double hi = cfg.eps_initial;
  while (all_feasible(hi)) {
    hi *= 2.0;
    if (hi > cfg.eps_cap) {
      out.epsilon = kInf;
      out.status = Status::kUnbounded;
      return out;
    }
  }
  const int G = std::max(1, cfg.grid_points);
  int first_bad = G;
  for (int j = 1; j < G; ++j)
    if (!all_feasible(hi * j / G)) {
      first_bad = j;
      break;
    }
  double lo = hi * (first_bad - 1) / G;
  double up = hi * first_bad / G;
  for (int it = 0; it < 200 && up - lo > cfg.bisection_rel_tol * up; ++it) {
    const double mid = 0.5 * (lo + up);
    if (mid <= lo || mid >= up)
      break;
    if (all_feasible(mid))
      lo = mid;
    else
      up = mid;
  }
  out.epsilon = lo;
  out.status = Status::kFeasible;
  return out;
}

namespace {

struct StartOutcome {
  VectorXd z;
  double value = kInf; // minimised objective
  ParamVector alpha;
  StartTrace trace;
};

class ConstraintGeneration {
public:
  ConstraintGeneration(const ScenarioProblem &problem,
                       const ScenarioSet &scenarios,
                       const ScenarioSolverConfig &cfg)
      : problem_(problem), scenarios_(scenarios), cfg_(cfg),
        coords_(problem, cfg) {}

  // Runs from a prefix of rounds (empty: from scratch).
  ScenarioSolution run(const std::vector<int> &active,
                       std::vector<WorkingSetRound> rounds) const {
    std::vector<int> working;
    for (const auto &r : rounds)
      working.push_back(r.added);
    if (rounds.empty()) {
      WorkingSetRound first;
      if (!active.empty()) {
        first.added = active.front();
        working.push_back(first.added);
      }
      solve_round(working, std::nullopt, first);
      rounds.push_back(std::move(first));
    }
    VectorXd margins;
    while (true) {
      const WorkingSetRound &last = rounds.back();
      margins = margins_at(last, active);
      if (last.status == Status::kNominalInfeasible)
        break;
      int pick = -1;
      double worst = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const int pos = active[a];
        if (std::find(working.begin(), working.end(), pos) != working.end())
          continue;
        const double m = margins(static_cast<Eigen::Index>(a));
        if (m < worst) {
          worst = m;
          pick = pos;
        }
      }
      if (pick < 0)
        break;
      working.push_back(pick);
      WorkingSetRound next;
      next.added = pick;
      solve_round(working, last.z, next);
      rounds.push_back(std::move(next));
    }

    ScenarioSolution sol;
    const WorkingSetRound &last = rounds.back();
    sol.status = last.status;
    sol.alpha = coords_.to_params(last.z);
    sol.epsilon = last.status == Status::kNominalInfeasible ? 0.0 : last.epsilon;
    sol.active = active;
    sol.working_set = working;
    sol.margins = margins;
    sol.rounds = std::move(rounds);
    return sol;
  }

private:
  VectorXd margins_at(const WorkingSetRound &round,
                      const std::vector<int> &active) const {
    const ParamVector alpha = coords_.to_params(round.z);
    const double eps = round.status == Status::kUnbounded ? cfg_.eps_cap
                       : round.status == Status::kNominalInfeasible ? 0.0
                                                                     : round.epsilon;
    Scorer scorer(problem_, alpha);
    VectorXd out(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a)
      out(static_cast<Eigen::Index>(a)) =
          scorer.margin(eps, scenarios_.deltas[static_cast<std::size_t>(active[a])]);
    return out;
  }

  double objective(const VectorXd &z, const std::vector<int> &working) const {
    const ParamVector alpha = coords_.to_params(z);
    const auto inner =
        max_feasible_epsilon(problem_, alpha, scenarios_, working, cfg_);
    if (inner.status == Status::kNominalInfeasible)
      return static_cast<double>(inner.violations) + inner.max_violation;
    return -inner.epsilon;
  }

  void solve_round(const std::vector<int> &working,
                   const std::optional<VectorXd> &warm,
                   WorkingSetRound &round) const {
    const int d = coords_.size();
    std::vector<std::pair<std::string, VectorXd>> starts;
    int randoms = cfg_.random_starts;
    if (warm) {
      starts.emplace_back("warm", *warm);
      randoms = cfg_.resolve_random_starts;
    } else {
      starts.emplace_back("zero", VectorXd::Zero(d));
    }
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int s = 0; s < randoms; ++s) {
      VectorXd z(d);
      for (int i = 0; i < d; ++i)
        z(i) = unif(rng);
      starts.emplace_back("random", std::move(z));
    }

    std::vector<StartOutcome> outcomes(starts.size());
    parallel_for(
        static_cast<int>(starts.size()),
        [&](int s) {
          const auto &[kind, z0] = starts[static_cast<std::size_t>(s)];
          auto f = [&](const VectorXd &z) { return objective(z, working); };
          const double f0 = f(z0);
          const auto nm = nelder_mead_minimize(f, z0, cfg_.nelder_mead);
          StartOutcome &o = outcomes[static_cast<std::size_t>(s)];
          o.z = nm.x;
          o.value = nm.f;
          o.alpha = coords_.to_params(nm.x);
          o.trace = StartTrace{s, kind, -f0, -nm.f, nm.evals, nm.restarts};
        },
        cfg_.threads);

    std::size_t best = 0;
    for (std::size_t s = 1; s < outcomes.size(); ++s) {
      const auto &a = outcomes[s], &b = outcomes[best];
      if (a.value < b.value ||
          (a.value == b.value &&
           a.alpha.values().norm() < b.alpha.values().norm()))
        best = s;
    }
    round.z = outcomes[best].z;
    for (const auto &o : outcomes)
      round.starts.push_back(o.trace);
    const auto inner = max_feasible_epsilon(
        problem_, outcomes[best].alpha, scenarios_, working, cfg_);
    round.status = inner.status;
    round.epsilon = inner.epsilon;
  }

  const ScenarioProblem &problem_;
  const ScenarioSet &scenarios_;
  const ScenarioSolverConfig &cfg_;
  SearchCoordinates coords_;
};

std::vector<int> all_positions(const ScenarioSet &s) {
  std::vector<int> v(static_cast<std::size_t>(s.size()));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

bool same_optimum(const ScenarioSolution &a, const ScenarioSolution &b) {
  if (a.status != b.status || a.alpha.size() != b.alpha.size())
    return false;
  const bool eps_same =
      a.epsilon == b.epsilon ||
      (std::isfinite(a.epsilon) && std::isfinite(b.epsilon) &&
       std::abs(a.epsilon - b.epsilon) <= 1e-7);
  if (!eps_same)
    return false;
  return (a.alpha.values() - b.alpha.values()).cwiseAbs().maxCoeff() <= 1e-6;
}

} // namespace

ScenarioSolution solve_scenario_program(const ScenarioProblem &problem,
                                        const ScenarioSet &scenarios,
                                        const ScenarioSolverConfig &cfg) {
  return solve_scenario_program(problem, scenarios, all_positions(scenarios), cfg);
}

ScenarioSolution solve_scenario_program(const ScenarioProblem &problem,
                                        const ScenarioSet &scenarios,
                                        std::vector<int> active,
                                        const ScenarioSolverConfig &cfg) {
  problem.check();
  if (scenarios.size() > 0 && (scenarios.state_dim != problem.system.state_dim() ||
                               scenarios.horizon != problem.horizon))
    throw ShapeError("scenario set does not match the problem");
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  for (int pos : active)
    if (pos < 0 || pos >= scenarios.size())
      throw Error("scenario position out of range");
  ConstraintGeneration cg(problem, scenarios, cfg);
  return cg.run(active, {});
}

ComplexityResult complexity(const ScenarioProblem &problem,
                            const ScenarioSolution &sol,
                            const ScenarioSet &scenarios,
                            const ScenarioSolverConfig &cfg, bool exhaustive) {
  ConstraintGeneration cg(problem, scenarios, cfg);
  const ScenarioSolution again = cg.run(sol.active, {});
  if (again.epsilon != sol.epsilon || !(again.alpha == sol.alpha) ||
      again.status != sol.status)
    throw DeterminismViolation(
        "re-solving the full scenario set changed the optimum");

  ComplexityResult out;
  const std::vector<int> candidates = exhaustive ? sol.active : sol.working_set;
  for (int pos : candidates) {
    std::vector<int> reduced;
    reduced.reserve(sol.active.size());
    for (int a : sol.active)
      if (a != pos)
        reduced.push_back(a);
    // Rounds before `pos` entered the working set never looked at it.
    std::vector<WorkingSetRound> prefix;
    if (!exhaustive && !sol.active.empty() && pos != sol.active.front()) {
      for (const auto &r : sol.rounds) {
        if (r.added == pos)
          break;
        prefix.push_back(r);
      }
    }
    const ScenarioSolution loo = cg.run(reduced, std::move(prefix));
    out.resolved.push_back(pos);
    if (!same_optimum(loo, sol))
      out.support.push_back(pos);
  }
  std::sort(out.support.begin(), out.support.end());
  out.complexity = static_cast<int>(out.support.size());
  return out;
}

ScenarioCertificate make_certificate(const ScenarioSolution &sol,
                                     const ComplexityResult &cx, double beta,
                                     double feas_tol) {
  ScenarioCertificate c;
  c.scenarios = static_cast<int>(sol.active.size());
  c.complexity = cx.complexity;
  c.beta = beta;
  c.bound = risk_bound(cx.complexity, c.scenarios, beta);
  c.support = cx.support;
  for (Eigen::Index i = 0; i < sol.margins.size(); ++i) {
    if (sol.margins(i) >= 0.0)
      ++c.feasible_raw;
    if (sol.margins(i) >= -feas_tol)
      ++c.feasible_with_tol;
  }
  std::ostringstream os;
  os << "with confidence " << 1.0 - beta
     << ", the probability that a fresh disturbance scenario violates the "
        "solution is below "
     << c.bound << " (complexity " << c.complexity << " of " << c.scenarios
     << " scenarios)";
  c.statement = os.str();
  return c;
}

ScenarioCertificate certify(const ScenarioProblem &problem,
                            const ScenarioSolution &sol,
                            const ScenarioSet &scenarios, double beta,
                            const ScenarioSolverConfig &cfg) {
  return make_certificate(sol, complexity(problem, sol, scenarios, cfg), beta,
                          cfg.feas_tol);
}

double empirical_violation_rate(const ScenarioProblem &problem,
                                const ScenarioSolution &sol, int count,
                                std::uint64_t seed, std::uint64_t first) {
  if (count <= 0)
    return 0.0;
  Scorer scorer(problem, sol.alpha);
  const int n = problem.system.state_dim(), N = problem.horizon;
  MatrixXd delta(n, N);
  int violated = 0;
  for (int i = 0; i < count; ++i) {
    for (int k = 0; k < N; ++k)
      for (int j = 0; j < n; ++j)
        delta(j, k) = scenario_coordinate(seed, first + static_cast<std::uint64_t>(i), k, j);
    if (!(scorer.margin(sol.epsilon, delta) >= 0.0))
      ++violated;
  }
  return static_cast<double>(violated) / count;
}

} // namespace resilo

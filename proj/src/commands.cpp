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
#include "resilo/commands.hpp"

#include "resilo/casestudies.hpp"
#include "resilo/risk_bound.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace resilo {

namespace {

constexpr const char *kSchema = "resilo.report/1";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn> int guarded(std::ostream &err, Fn &&fn) {
  try {
    return fn();
  } catch (const NotProductRepresentable &e) {
    err << "error: " << e.what() << "\n";
    return kExitNotProduct;
  } catch (const DeterminismViolation &e) {
    err << "error: " << e.what() << "\n";
    return kExitDeterminism;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

std::filesystem::path prepare_dir(const std::string &dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_json(const std::filesystem::path &path, const Json &j) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

Json starts_json(const std::vector<StartTrace> &trace) {
  Json a = Json::array();
  for (const auto &t : trace)
    a.push_back({{"start", t.start},
                 {"kind", t.kind},
                 {"initial_value", json_number(t.initial_value)},
                 {"final_value", json_number(t.final_value)},
                 {"evals", t.evals},
                 {"restarts", t.restarts}});
  return a;
}

Json base_report(const ProblemConfig &cfg, const char *method) {
  return Json{{"schema", kSchema},
              {"method", method},
              {"config_hash", config_hash(cfg)},
              {"config", to_json(cfg)}};
}

// alpha1 / alpha2 for linear laws, the coefficient matrix otherwise.
void add_alpha(Json &j, const ControllerTemplate &tmpl, const ParamVector &alpha) {
  j["alpha"] = json_vector(alpha.values());
  if (alpha.size() != tmpl.param_count())
    return;
  const int m = tmpl.input_dim(), n = tmpl.state_dim();
  if (tmpl.kind() == ControllerTemplate::Kind::kLinear) {
    j["alpha1"] = json_matrix(linear_gain(alpha, m, n));
    j["alpha2"] = json_vector(linear_offset(alpha, m, n));
  } else {
    const int D = tmpl.param_count() / m;
    j["alpha_matrix"] =
        json_matrix(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                   Eigen::Dynamic, Eigen::RowMajor>>(
            alpha.values().data(), m, D));
  }
}

ControllerTemplate template_for(const ProblemConfig &cfg, const SystemModel &sys) {
  return cfg.controller.make(sys.state_dim(), sys.input_dim());
}

bool within_inputs(const InputBox &box, const Trajectory &t) {
  for (Eigen::Index k = 0; k < t.inputs.cols(); ++k)
    if (!(box.margin(t.inputs.col(k)) >= 0.0))
      return false;
  return true;
}

void print_epsilon(std::ostream &out, Status status, double eps) {
  out << "status: " << to_string(status) << "\n"
      << "epsilon: " << format_double(eps) << "\n";
}

int run_exact(const ProblemConfig &cfg, const std::string &out_dir,
              std::ostream &out, Json extra = {},
              std::vector<std::pair<int, Trajectory>> runs = {},
              const ResilienceResult *precomputed = nullptr) {
  const auto t0 = Clock::now();
  const SystemModel sys = cfg.system.build();
  if (!sys.is_linear())
    throw ConfigError("the exact path needs a linear system; use the "
                      "`scenario` command for nonlinear dynamics");
  if (cfg.controller.kind != ControllerTemplate::Kind::kLinear)
    throw ConfigError("the exact path needs a linear controller; use the "
                      "`scenario` command for polynomial controllers");
  const int n = sys.state_dim(), m = sys.input_dim();
  const StageSpec stages = to_stage_spec(cfg.spec, cfg.horizon, n);
  ResilienceResult r;
  if (precomputed)
    r = *precomputed;
  else if (cfg.controller.alpha)
    r = evaluate_linear_controller(sys, stages, cfg.x0,
                                   ParamVector(*cfg.controller.alpha),
                                   cfg.solver.feas_tol);
  else
    r = synthesize_linear(sys, stages, cfg.x0, cfg.input_box(m),
                          cfg.solver.search());
  const double solve = seconds_since(t0);

  Json report = exact_report(cfg, r, solve);
  for (auto &[k, v] : extra.items())
    report[k] = v;
  const auto dir = prepare_dir(out_dir);
  if (runs.empty() && r.alpha.size() > 0)
    runs.emplace_back(0, rollout(sys, template_for(cfg, sys), r.alpha, cfg.x0,
                                 DisturbanceSeq::zero(n, cfg.horizon)));
  write_trajectories_csv((dir / "trajectories.csv").string(), runs, n, m);
  report["timings"]["total_seconds"] = seconds_since(t0);
  write_json(dir / "report.json", report);
  print_epsilon(out, r.status, r.epsilon);
  return r.status == Status::kNominalInfeasible ? kExitNominalInfeasible : kExitOk;
}

int run_scenario(const ProblemConfig &cfg, const std::string &out_dir,
                 std::ostream &out) {
  const auto t0 = Clock::now();
  if (cfg.controller.alpha)
    throw ConfigError("the scenario command synthesizes the controller; "
                      "evaluate a fixed alpha with `simulate`");
  const SystemModel sys = cfg.system.build();
  const int n = sys.state_dim(), m = sys.input_dim();
  ScenarioProblem problem{sys, template_for(cfg, sys), cfg.x0, cfg.spec,
                          cfg.input_box(m), cfg.horizon};
  problem.check();
  const ScenarioSet scenarios =
      sample_scenarios(n, cfg.horizon, cfg.solver.scenarios, cfg.solver.seed);
  const ScenarioSolverConfig sc = cfg.solver.scenario();
  const ScenarioSolution sol = solve_scenario_program(problem, scenarios, sc);
  ComplexityResult cx;
  std::vector<ScenarioCertificate> certs;
  if (sol.status != Status::kNominalInfeasible) {
    cx = complexity(problem, sol, scenarios, sc);
    for (double beta : cfg.solver.betas)
      certs.push_back(make_certificate(sol, cx, beta, sc.feas_tol));
  }
  const double solve = seconds_since(t0);

  Json report = scenario_report(cfg, sol, cx, certs, solve);
  std::vector<std::pair<int, Trajectory>> runs;
  const ControllerTemplate tmpl = template_for(cfg, sys);
  if (sol.alpha.size() > 0) {
    runs.emplace_back(0, rollout(sys, tmpl, sol.alpha, cfg.x0,
                                 DisturbanceSeq::zero(n, cfg.horizon)));
    if (sol.status == Status::kFeasible)
      for (int i = 0; i < scenarios.size(); ++i) {
        try {
          runs.emplace_back(i + 1, rollout(sys, tmpl, sol.alpha, cfg.x0,
                                           DisturbanceSeq::normalized(
                                               scenarios.deltas[i], sol.epsilon)));
        } catch (const RolloutDivergence &) {
        }
      }
  }
  const auto dir = prepare_dir(out_dir);
  write_trajectories_csv((dir / "trajectories.csv").string(), runs, n, m);
  report["timings"]["total_seconds"] = seconds_since(t0);
  write_json(dir / "report.json", report);

  print_epsilon(out, sol.status, sol.epsilon);
  if (sol.status != Status::kNominalInfeasible) {
    out << "complexity: " << cx.complexity << " of " << scenarios.size() << "\n";
    for (const auto &c : certs)
      out << "bound(beta=" << format_double(c.beta) << "): " << format_double(c.bound)
          << "\n";
  }
  return sol.status == Status::kNominalInfeasible ? kExitNominalInfeasible : kExitOk;
}

} // namespace

void write_trajectories_csv(const std::string &path,
                            const std::vector<std::pair<int, Trajectory>> &runs,
                            int state_dim, int input_dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot write '" + path + "'");
  out << "run_id,k";
  for (int i = 1; i <= state_dim; ++i)
    out << ",x_" << i;
  for (int i = 1; i <= input_dim; ++i)
    out << ",u_" << i;
  out << "\r\n";
  for (const auto &[id, t] : runs) {
    for (Eigen::Index k = 0; k < t.states.cols(); ++k) {
      out << id << "," << k;
      for (Eigen::Index i = 0; i < t.states.rows(); ++i)
        out << "," << format_double(t.states(i, k));
      for (Eigen::Index i = 0; i < input_dim; ++i) {
        out << ",";
        if (k < t.inputs.cols())
          out << format_double(t.inputs(i, k));
      }
      out << "\r\n";
    }
  }
}

Json exact_report(const ProblemConfig &cfg, const ResilienceResult &r,
                  double solve_seconds) {
  Json j = base_report(cfg, "exact");
  j["status"] = to_string(r.status);
  j["epsilon"] = json_number(r.epsilon);
  const SystemModel sys = cfg.system.build();
  add_alpha(j, template_for(cfg, sys), r.alpha);
  Json rows = Json::array();
  for (const auto &d : r.rows)
    rows.push_back({{"stage", d.stage},
                    {"row", d.row},
                    {"slack", json_number(d.slack)},
                    {"weight", json_number(d.weight)},
                    {"ratio", json_number(d.ratio)}});
  j["rows"] = rows;
  j["starts"] = starts_json(r.trace);
  j["best_start"] = r.best_start;
  j["timings"] = {{"solve_seconds", solve_seconds}};
  return j;
}

Json scenario_report(const ProblemConfig &cfg, const ScenarioSolution &sol,
                     const ComplexityResult &cx,
                     const std::vector<ScenarioCertificate> &certs,
                     double solve_seconds) {
  Json j = base_report(cfg, "scenario");
  j["status"] = to_string(sol.status);
  j["epsilon"] = json_number(sol.epsilon);
  const SystemModel sys = cfg.system.build();
  const ControllerTemplate tmpl = template_for(cfg, sys);
  add_alpha(j, tmpl, sol.alpha);
  j["scenarios"] = static_cast<int>(sol.active.size());
  j["seed"] = cfg.solver.seed;
  j["complexity"] = cx.complexity;
  j["support"] = cx.support;
  j["working_set"] = sol.working_set;
  j["min_margin"] =
      json_number(sol.margins.size() ? sol.margins.minCoeff() : kInf);

  Json table;
  table["epsilon"] = j["epsilon"];
  if (j.contains("alpha1")) {
    table["alpha1"] = j["alpha1"];
    table["alpha2"] = j["alpha2"];
  } else {
    table["alpha"] = j.contains("alpha_matrix") ? j["alpha_matrix"] : j["alpha"];
  }
  table["complexity"] = cx.complexity;
  Json bounds = Json::object();
  Json cert_list = Json::array();
  for (const auto &c : certs) {
    bounds[format_double(c.beta)] = c.bound;
    cert_list.push_back({{"beta", c.beta},
                         {"bound", c.bound},
                         {"complexity", c.complexity},
                         {"scenarios", c.scenarios},
                         {"feasible_raw", c.feasible_raw},
                         {"feasible_with_tol", c.feasible_with_tol},
                         {"statement", c.statement}});
  }
  table["bound"] = bounds;
  j["table"] = table;
  j["certificates"] = cert_list;

  Json rounds = Json::array();
  for (const auto &r : sol.rounds)
    rounds.push_back({{"added", r.added},
                      {"epsilon", json_number(r.epsilon)},
                      {"status", to_string(r.status)},
                      {"starts", starts_json(r.starts)}});
  j["rounds"] = rounds;
  j["timings"] = {{"solve_seconds", solve_seconds}};
  return j;
}

int cmd_exact(const std::string &config_path, const std::string &out_dir,
              std::ostream &out, std::ostream &err) {
  return guarded(err, [&] { return run_exact(load_config(config_path), out_dir, out); });
}

int cmd_scenario(const std::string &config_path, const std::string &out_dir,
                 std::ostream &out, std::ostream &err) {
  return guarded(err,
                 [&] { return run_scenario(load_config(config_path), out_dir, out); });
}

int cmd_bound(int k, int M, double beta, std::ostream &out, std::ostream &err) {
  if (M < 1 || k < 0 || k > M || !(beta > 0.0 && beta < 1.0)) {
    err << "usage: bound K M BETA with 0 <= K <= M, M >= 1 and 0 < BETA < 1\n";
    return kExitUsage;
  }
  return guarded(err, [&] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", risk_bound(k, M, beta));
    out << buf << "\n";
    return kExitOk;
  });
}

int cmd_simulate(const std::string &config_path, const std::string &alpha_path,
                 const SimulateOptions &opt, const std::string &out_dir,
                 std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    const ProblemConfig cfg = load_config(config_path);
    if (!(opt.eps >= 0.0) || !std::isfinite(opt.eps))
      throw ConfigError("--eps must be a finite nonnegative number");
    if (opt.count < 0)
      throw ConfigError("--count must be nonnegative");
    std::ifstream in(alpha_path);
    if (!in)
      throw ConfigError("cannot open alpha file '" + alpha_path + "'");
    Json aj;
    try {
      aj = Json::parse(in);
    } catch (const Json::exception &e) {
      throw ConfigError("invalid JSON in '" + alpha_path + "': " + e.what());
    }
    const Json &arr = aj.is_object() ? aj.at("alpha") : aj;
    VectorXd a(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      a(static_cast<Eigen::Index>(i)) = number_from_json(arr[i], "alpha");
    const SystemModel sys = cfg.system.build();
    const ControllerTemplate tmpl = template_for(cfg, sys);
    const ParamVector alpha(a);
    try {
      tmpl.check(alpha);
    } catch (const ShapeError &e) {
      throw ConfigError(std::string("alpha file: ") + e.what());
    }
    const int n = sys.state_dim(), m = sys.input_dim(), N = cfg.horizon;
    const InputBox box = cfg.input_box(m);

    std::vector<std::pair<int, Trajectory>> runs;
    int passed = 0, failed = 0;
    auto score = [&](int id, const DisturbanceSeq &d) {
      try {
        Trajectory t = rollout(sys, tmpl, alpha, cfg.x0, d);
        if (check_traj(cfg.spec, t) && within_inputs(box, t))
          ++passed;
        else
          ++failed;
        runs.emplace_back(id, std::move(t));
      } catch (const RolloutDivergence &) {
        ++failed;
      }
    };
    score(0, DisturbanceSeq::zero(n, N));
    if (opt.eps > 0.0) {
      std::mt19937_64 rng(opt.seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      for (int r = 1; r <= opt.count; ++r) {
        MatrixXd delta(n, N);
        for (Eigen::Index i = 0; i < delta.size(); ++i) {
          const double u = unif(rng);
          delta.data()[i] = opt.vertex ? (u < 0.0 ? -1.0 : 1.0) : u;
        }
        score(r, DisturbanceSeq::normalized(std::move(delta), opt.eps));
      }
    }
    const auto dir = prepare_dir(out_dir);
    write_trajectories_csv((dir / "trajectories.csv").string(), runs, n, m);
    Json report = base_report(cfg, "simulate");
    report["epsilon"] = opt.eps;
    report["count"] = opt.count;
    report["seed"] = opt.seed;
    report["vertex"] = opt.vertex;
    report["runs"] = passed + failed;
    report["passed"] = passed;
    report["failed"] = failed;
    add_alpha(report, tmpl, alpha);
    write_json(dir / "report.json", report);
    out << "passed " << passed << "/" << passed + failed << "\n";
    return kExitOk;
  });
}

int cmd_casestudy(const std::string &which, const CasestudyOptions &opt,
                  const std::string &out_dir, std::ostream &out,
                  std::ostream &err) {
  return guarded(err, [&] {
    if (which == "robot") {
      ProblemConfig cfg = robot_config();
      cfg.solver.seed = opt.seed;
      const auto t0 = Clock::now();
      RobotExperiment ex = robot_experiment(cfg.solver.search());
      std::vector<std::pair<int, Trajectory>> runs;
      runs.emplace_back(0, ex.nominal);
      for (std::size_t i = 0; i < ex.within.size(); ++i)
        runs.emplace_back(static_cast<int>(i) + 1, ex.within[i]);
      if (ex.exceeding.states.size() > 0)
        runs.emplace_back(static_cast<int>(ex.within.size()) + 1, ex.exceeding);
      Json extra;
      extra["experiment"] = {
          {"within_runs", static_cast<int>(ex.within.size())},
          {"within_passed", ex.within_passed},
          {"exceeding_run", static_cast<int>(ex.within.size()) + 1},
          {"exceeding_epsilon", json_number(1.2 * ex.result.epsilon)},
          {"exceeding_violates", ex.exceeding_violates},
          {"experiment_seconds", seconds_since(t0)}};
      const int code = run_exact(cfg, out_dir, out, extra, runs, &ex.result);
      out << "within-epsilon runs passing: " << ex.within_passed << "/"
          << ex.within.size() << "\n"
          << "vertex run at 1.2 epsilon violates: "
          << (ex.exceeding_violates ? "yes" : "no") << "\n";
      return code;
    }
    if (which == "acc")
      return run_scenario(acc_config(opt.polynomial, opt.scenarios, opt.seed),
                          out_dir, out);
    throw ConfigError("unknown case study '" + which + "' (robot or acc)");
  });
}

} // namespace resilo

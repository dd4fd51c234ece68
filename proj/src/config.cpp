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
#include "resilo/config.hpp"

#include "resilo/casestudies.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace resilo {

namespace {

void check_keys(const Json &j, const std::set<std::string> &allowed,
                const std::string &where) {
  if (!j.is_object())
    throw ConfigError(where + " must be an object");
  for (const auto &[key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const Json &require(const Json &j, const std::string &key,
                    const std::string &where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("missing key '" + key + "' in " + where);
  return *it;
}

int int_from_json(const Json &j, const std::string &where) {
  if (!j.is_number_integer())
    throw ConfigError(where + " must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < -(1LL << 30) || v > (1LL << 30))
    throw ConfigError(where + " is out of range");
  return static_cast<int>(v);
}

VectorXd vector_from_json(const Json &j, const std::string &where) {
  if (!j.is_array())
    throw ConfigError(where + " must be an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        number_from_json(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

MatrixXd matrix_from_json(const Json &j, const std::string &where) {
  if (!j.is_array())
    throw ConfigError(where + " must be an array of rows");
  if (j.empty())
    return MatrixXd(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(where + " must be rectangular");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_from_json(j[r][c], where);
  }
  return m;
}

Region region_from_json(const Json &j, const std::string &where) {
  check_keys(j, {"box", "polytope", "ball"}, where);
  if (j.size() != 1)
    throw ConfigError(where + " needs exactly one of box, polytope, ball");
  if (j.contains("box")) {
    const Json &b = j["box"];
    check_keys(b, {"lower", "upper"}, where + ".box");
    VectorXd lo = vector_from_json(require(b, "lower", where), where + ".box.lower");
    VectorXd hi = vector_from_json(require(b, "upper", where), where + ".box.upper");
    if (lo.size() != hi.size() || lo.size() == 0)
      throw ConfigError(where + ".box bounds must have equal nonzero length");
    if ((lo.array() > hi.array()).any())
      throw ConfigError(where + ".box has lower > upper");
    return Polytope::box(lo, hi);
  }
  if (j.contains("polytope")) {
    const Json &p = j["polytope"];
    check_keys(p, {"G", "H", "dim"}, where + ".polytope");
    MatrixXd G = matrix_from_json(require(p, "G", where), where + ".polytope.G");
    VectorXd H = vector_from_json(require(p, "H", where), where + ".polytope.H");
    if (G.rows() == 0) {
      const int dim = int_from_json(require(p, "dim", where + ".polytope"),
                                    where + ".polytope.dim");
      if (dim <= 0 || H.size() != 0)
        throw ConfigError(where + ".polytope is malformed");
      return Polytope::unconstrained(dim);
    }
    if (p.contains("dim") &&
        int_from_json(p["dim"], where + ".polytope.dim") != G.cols())
      throw ConfigError(where + ".polytope.dim disagrees with G");
    if (H.size() != G.rows())
      throw ConfigError(where + ".polytope: H must have one entry per row of G");
    return Polytope{std::move(G), std::move(H)};
  }
  const Json &b = j["ball"];
  check_keys(b, {"center", "radius"}, where + ".ball");
  Ball ball{vector_from_json(require(b, "center", where), where + ".ball.center"),
            number_from_json(require(b, "radius", where), where + ".ball.radius")};
  if (ball.center.size() == 0 || !(ball.radius >= 0.0))
    throw ConfigError(where + ".ball is malformed");
  return ball;
}

Json region_to_json(const Region &r) {
  if (const auto *p = std::get_if<Polytope>(&r)) {
    Json body{{"G", json_matrix(p->G)}, {"H", json_vector(p->H)}};
    if (p->rows() == 0)
      body["dim"] = p->dim();
    return Json{{"polytope", body}};
  }
  const auto &b = std::get<Ball>(r);
  return Json{{"ball", {{"center", json_vector(b.center)},
                        {"radius", json_number(b.radius)}}}};
}

bool same_matrix(const MatrixXd &a, const MatrixXd &b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

} // namespace

Json json_number(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const Json &j, const std::string &where) {
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const auto &s = j.get_ref<const std::string &>();
    if (s == "inf")
      return kInf;
    if (s == "-inf")
      return -kInf;
  }
  throw ConfigError(where + " must be a number, \"inf\" or \"-inf\"");
}

Json json_vector(const VectorXd &v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    a.push_back(json_number(v(i)));
  return a;
}

Json json_matrix(const MatrixXd &m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    a.push_back(json_vector(m.row(r).transpose()));
  return a;
}

std::string format_double(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SystemModel SystemConfig::build() const {
  if (type == "linear")
    return SystemModel::linear(A, B);
  return DynamicsRegistry::global().make(id, params);
}

bool SystemConfig::operator==(const SystemConfig &o) const {
  return type == o.type && same_matrix(A, o.A) && same_matrix(B, o.B) &&
         id == o.id && params == o.params;
}

ControllerTemplate ControllerConfig::make(int state_dim, int input_dim) const {
  return kind == ControllerTemplate::Kind::kLinear
             ? ControllerTemplate::linear(state_dim, input_dim)
             : ControllerTemplate::polynomial(state_dim, input_dim, degree);
}

bool ControllerConfig::operator==(const ControllerConfig &o) const {
  if (kind != o.kind || degree != o.degree || alpha.has_value() != o.alpha.has_value())
    return false;
  return !alpha || (alpha->size() == o.alpha->size() && *alpha == *o.alpha);
}

SearchConfig SolverSettings::search() const {
  SearchConfig c;
  c.seed = seed;
  c.random_starts = random_starts;
  c.nelder_mead.max_evals = max_evals;
  c.nelder_mead.max_restarts = max_restarts;
  c.feas_tol = feas_tol;
  return c;
}

ScenarioSolverConfig SolverSettings::scenario() const {
  ScenarioSolverConfig c;
  c.seed = seed;
  c.random_starts = random_starts;
  c.resolve_random_starts = resolve_random_starts;
  c.nelder_mead.max_evals = max_evals;
  c.nelder_mead.max_restarts = max_restarts;
  c.grid_points = grid_points;
  c.feas_tol = feas_tol;
  return c;
}

InputBox ProblemConfig::input_box(int input_dim) const {
  return inputs ? *inputs : InputBox::unbounded(input_dim);
}

bool ProblemConfig::operator==(const ProblemConfig &o) const {
  const bool same_inputs =
      inputs.has_value() == o.inputs.has_value() &&
      (!inputs || (same_matrix(inputs->lower, o.inputs->lower) &&
                   same_matrix(inputs->upper, o.inputs->upper)));
  return system == o.system && controller == o.controller && spec == o.spec &&
         same_matrix(x0, o.x0) && horizon == o.horizon && same_inputs &&
         solver == o.solver;
}

Json spec_to_json(const SpecExpr &spec) {
  using Op = SpecExpr::Op;
  switch (spec.op()) {
  case Op::kAnd:
  case Op::kOr: {
    Json args = Json::array();
    for (const auto &c : spec.children())
      args.push_back(spec_to_json(c));
    return Json{{"op", spec.op() == Op::kAnd ? "and" : "or"}, {"args", args}};
  }
  case Op::kAt:
    return Json{{"op", "at"}, {"time", spec.from()},
                {"set", region_to_json(spec.region())}};
  case Op::kNext:
    return Json{{"op", "next"}, {"steps", spec.from()},
                {"set", region_to_json(spec.region())}};
  case Op::kAlways:
  case Op::kEventually:
    return Json{{"op", spec.op() == Op::kAlways ? "always" : "eventually"},
                {"from", spec.from()},
                {"to", spec.to()},
                {"set", region_to_json(spec.region())}};
  }
  throw SpecError("unknown spec operator");
}

SpecExpr spec_from_json(const Json &j) {
  const std::string where = "spec";
  if (!j.is_object())
    throw ConfigError("spec nodes must be objects");
  const Json &opj = require(j, "op", where);
  if (!opj.is_string())
    throw ConfigError("spec op must be a string");
  const std::string op = opj.get<std::string>();
  if (op == "and" || op == "or") {
    check_keys(j, {"op", "args"}, "spec." + op);
    const Json &args = require(j, "args", where);
    if (!args.is_array())
      throw ConfigError("spec." + op + ".args must be an array");
    std::vector<SpecExpr> children;
    for (const auto &a : args)
      children.push_back(spec_from_json(a));
    return op == "and" ? SpecExpr::all_of(std::move(children))
                       : SpecExpr::any_of(std::move(children));
  }
  if (op == "at") {
    check_keys(j, {"op", "time", "set"}, "spec.at");
    return SpecExpr::at(region_from_json(require(j, "set", where), "spec.at.set"),
                        int_from_json(require(j, "time", where), "spec.at.time"));
  }
  if (op == "next") {
    check_keys(j, {"op", "steps", "set"}, "spec.next");
    return SpecExpr::next(
        int_from_json(require(j, "steps", where), "spec.next.steps"),
        region_from_json(require(j, "set", where), "spec.next.set"));
  }
  if (op == "always" || op == "eventually") {
    check_keys(j, {"op", "from", "to", "set"}, "spec." + op);
    const int from = int_from_json(require(j, "from", where), "spec." + op + ".from");
    const int to = int_from_json(require(j, "to", where), "spec." + op + ".to");
    Region r = region_from_json(require(j, "set", where), "spec." + op + ".set");
    return op == "always" ? SpecExpr::always(from, to, std::move(r))
                          : SpecExpr::eventually(from, to, std::move(r));
  }
  throw ConfigError("unknown spec op '" + op + "'");
}

namespace {

void check_spec_dims(const SpecExpr &s, int n) {
  if (s.op() == SpecExpr::Op::kAnd || s.op() == SpecExpr::Op::kOr) {
    for (const auto &c : s.children())
      check_spec_dims(c, n);
    return;
  }
  if (region_dim(s.region()) != n)
    throw ConfigError("spec set dimension " + std::to_string(region_dim(s.region())) +
                      " differs from the state dimension " + std::to_string(n));
}

} // namespace

ProblemConfig parse_config(const Json &j) {
  check_keys(j, {"system", "controller", "spec", "x0", "horizon", "inputs", "solver"},
             "config");
  ProblemConfig cfg;

  const Json &sys = require(j, "system", "config");
  check_keys(sys, {"type", "A", "B", "id", "params"}, "system");
  const Json &type = require(sys, "type", "system");
  if (!type.is_string())
    throw ConfigError("system.type must be a string");
  cfg.system.type = type.get<std::string>();
  if (cfg.system.type == "linear") {
    if (sys.contains("id") || sys.contains("params"))
      throw ConfigError("linear systems take only A and B");
    cfg.system.A = matrix_from_json(require(sys, "A", "system"), "system.A");
    cfg.system.B = matrix_from_json(require(sys, "B", "system"), "system.B");
  } else if (cfg.system.type == "builtin") {
    if (sys.contains("A") || sys.contains("B"))
      throw ConfigError("builtin systems take only id and params");
    const Json &id = require(sys, "id", "system");
    if (!id.is_string())
      throw ConfigError("system.id must be a string");
    cfg.system.id = id.get<std::string>();
    if (!DynamicsRegistry::global().contains(cfg.system.id))
      throw ConfigError("unknown builtin system '" + cfg.system.id + "'");
    if (sys.contains("params")) {
      if (!sys["params"].is_object())
        throw ConfigError("system.params must be an object");
      for (const auto &[k, v] : sys["params"].items())
        cfg.system.params[k] = number_from_json(v, "system.params." + k);
    }
  } else {
    throw ConfigError("system.type must be \"linear\" or \"builtin\"");
  }
  SystemModel model = [&] {
    try {
      return cfg.system.build();
    } catch (const ConfigError &) {
      throw;
    } catch (const Error &e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
  }();
  const int n = model.state_dim(), m = model.input_dim();

  const Json &ctrl = require(j, "controller", "config");
  check_keys(ctrl, {"kind", "degree", "alpha"}, "controller");
  const Json &kind = require(ctrl, "kind", "controller");
  if (kind == "linear") {
    cfg.controller.kind = ControllerTemplate::Kind::kLinear;
    if (ctrl.contains("degree") && int_from_json(ctrl["degree"], "controller.degree") != 1)
      throw ConfigError("linear controllers have degree 1");
  } else if (kind == "polynomial") {
    cfg.controller.kind = ControllerTemplate::Kind::kPolynomial;
    cfg.controller.degree =
        int_from_json(require(ctrl, "degree", "controller"), "controller.degree");
    if (cfg.controller.degree < 1 || cfg.controller.degree > 8)
      throw ConfigError("controller.degree must be in [1, 8]");
  } else {
    throw ConfigError("controller.kind must be \"linear\" or \"polynomial\"");
  }
  if (ctrl.contains("alpha")) {
    cfg.controller.alpha = vector_from_json(ctrl["alpha"], "controller.alpha");
    if (cfg.controller.alpha->size() != cfg.controller.make(n, m).param_count())
      throw ConfigError("controller.alpha has the wrong length");
  }

  cfg.x0 = vector_from_json(require(j, "x0", "config"), "x0");
  if (cfg.x0.size() != n)
    throw ConfigError("x0 must have the state dimension " + std::to_string(n));
  if (!cfg.x0.allFinite())
    throw ConfigError("x0 must be finite");
  cfg.horizon = int_from_json(require(j, "horizon", "config"), "horizon");
  if (cfg.horizon < 0)
    throw ConfigError("horizon must be nonnegative");

  cfg.spec = spec_from_json(require(j, "spec", "config"));
  check_spec_dims(cfg.spec, n);
  try {
    validate(cfg.spec, cfg.horizon);
  } catch (const SpecError &e) {
    throw ConfigError(std::string("spec: ") + e.what());
  }

  if (j.contains("inputs")) {
    const Json &in = j["inputs"];
    check_keys(in, {"lower", "upper"}, "inputs");
    VectorXd lo = vector_from_json(require(in, "lower", "inputs"), "inputs.lower");
    VectorXd hi = vector_from_json(require(in, "upper", "inputs"), "inputs.upper");
    if (lo.size() != m || hi.size() != m)
      throw ConfigError("inputs bounds must have the input dimension " +
                        std::to_string(m));
    try {
      cfg.inputs = InputBox::make(std::move(lo), std::move(hi));
    } catch (const Error &e) {
      throw ConfigError(std::string("inputs: ") + e.what());
    }
  }

  if (j.contains("solver")) {
    const Json &s = j["solver"];
    check_keys(s, {"seed", "scenarios", "betas", "random_starts",
                   "resolve_random_starts", "max_evals", "max_restarts",
                   "grid_points", "feas_tol"},
               "solver");
    SolverSettings &o = cfg.solver;
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned())
        throw ConfigError("solver.seed must be a nonnegative integer");
      o.seed = s["seed"].get<std::uint64_t>();
    }
    auto positive = [&](const char *key, int &slot, int lo) {
      if (s.contains(key)) {
        slot = int_from_json(s[key], std::string("solver.") + key);
        if (slot < lo)
          throw ConfigError(std::string("solver.") + key + " must be >= " +
                            std::to_string(lo));
      }
    };
    positive("scenarios", o.scenarios, 0);
    positive("random_starts", o.random_starts, 0);
    positive("resolve_random_starts", o.resolve_random_starts, 0);
    positive("max_evals", o.max_evals, 1);
    positive("max_restarts", o.max_restarts, 0);
    positive("grid_points", o.grid_points, 1);
    if (s.contains("feas_tol")) {
      o.feas_tol = number_from_json(s["feas_tol"], "solver.feas_tol");
      if (!(o.feas_tol >= 0.0) || !std::isfinite(o.feas_tol))
        throw ConfigError("solver.feas_tol must be a finite nonnegative number");
    }
    if (s.contains("betas")) {
      const VectorXd b = vector_from_json(s["betas"], "solver.betas");
      o.betas.assign(b.data(), b.data() + b.size());
      for (double beta : o.betas)
        if (!(beta > 0.0 && beta < 1.0))
          throw ConfigError("solver.betas entries must lie in (0, 1)");
    }
  }
  return cfg;
}

ProblemConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception &e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

Json to_json(const ProblemConfig &cfg) {
  Json j;
  if (cfg.system.type == "linear") {
    j["system"] = {{"type", "linear"},
                   {"A", json_matrix(cfg.system.A)},
                   {"B", json_matrix(cfg.system.B)}};
  } else {
    Json params = Json::object();
    for (const auto &[k, v] : cfg.system.params)
      params[k] = json_number(v);
    j["system"] = {{"type", cfg.system.type}, {"id", cfg.system.id}, {"params", params}};
  }
  Json ctrl;
  if (cfg.controller.kind == ControllerTemplate::Kind::kLinear) {
    ctrl["kind"] = "linear";
  } else {
    ctrl["kind"] = "polynomial";
    ctrl["degree"] = cfg.controller.degree;
  }
  if (cfg.controller.alpha)
    ctrl["alpha"] = json_vector(*cfg.controller.alpha);
  j["controller"] = ctrl;
  j["spec"] = spec_to_json(cfg.spec);
  j["x0"] = json_vector(cfg.x0);
  j["horizon"] = cfg.horizon;
  if (cfg.inputs)
    j["inputs"] = {{"lower", json_vector(cfg.inputs->lower)},
                   {"upper", json_vector(cfg.inputs->upper)}};
  const SolverSettings &s = cfg.solver;
  Json betas = Json::array();
  for (double b : s.betas)
    betas.push_back(b);
  j["solver"] = {{"seed", s.seed},
                 {"scenarios", s.scenarios},
                 {"betas", betas},
                 {"random_starts", s.random_starts},
                 {"resolve_random_starts", s.resolve_random_starts},
                 {"max_evals", s.max_evals},
                 {"max_restarts", s.max_restarts},
                 {"grid_points", s.grid_points},
                 {"feas_tol", s.feas_tol}};
  return j;
}

std::string canonical_dump(const ProblemConfig &cfg) { return to_json(cfg).dump(); }

std::string config_hash(const ProblemConfig &cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_dump(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProblemConfig robot_config() {
  RobotCase rc;
  ProblemConfig cfg;
  cfg.system.type = "linear";
  cfg.system.A = rc.system.linear_part()->A;
  cfg.system.B = rc.system.linear_part()->B;
  cfg.spec = rc.spec();
  cfg.x0 = rc.x0;
  cfg.horizon = rc.horizon;
  cfg.solver.random_starts = robot_search_config().random_starts;
  return cfg;
}

ProblemConfig acc_config(bool polynomial, int scenarios, std::uint64_t seed) {
  AccCase acc;
  const AccParams &p = acc.params;
  ProblemConfig cfg;
  cfg.system.type = "builtin";
  cfg.system.id = "acc";
  cfg.system.params = {{"mass", p.mass}, {"f0", p.f0}, {"f1", p.f1},
                       {"f2", p.f2},     {"tau", p.tau}, {"v0", p.v0},
                       {"s_v", p.s_v},   {"s_f", p.s_f}};
  if (polynomial) {
    cfg.controller.kind = ControllerTemplate::Kind::kPolynomial;
    cfg.controller.degree = 2;
  }
  cfg.spec = acc.spec();
  cfg.x0 = acc.x0;
  cfg.horizon = acc.horizon;
  cfg.inputs = acc.inputs();
  cfg.solver.seed = seed;
  cfg.solver.scenarios = scenarios;
  cfg.solver.betas = {1e-2, 1e-4, 1e-6};
  return cfg;
}

} // namespace resilo

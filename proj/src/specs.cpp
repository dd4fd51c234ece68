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
#include "resilo/specs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resilo {

Polytope Polytope::box(const VectorXd &lower, const VectorXd &upper) {
  if (lower.size() != upper.size())
    throw SpecError("box bounds must have equal length");
  const auto n = lower.size();
  MatrixXd G = MatrixXd::Zero(2 * n, n);
  VectorXd H(2 * n);
  Eigen::Index q = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower(i) > upper(i))
      throw SpecError("box lower bound exceeds upper bound");
    if (std::isfinite(upper(i))) {
      G(q, i) = 1.0;
      H(q++) = upper(i);
    }
    if (std::isfinite(lower(i))) {
      G(q, i) = -1.0;
      H(q++) = -lower(i);
    }
  }
  return Polytope{G.topRows(q), H.head(q)};
}

Polytope Polytope::unconstrained(int state_dim) {
  return Polytope{MatrixXd(0, state_dim), VectorXd(0)};
}

bool Polytope::contains(const Eigen::Ref<const VectorXd> &x) const {
  if (G.rows() == 0)
    return true;
  if (!x.allFinite())
    return false;
  const VectorXd v = G * x;
  return (v.array() <= H.array()).all();
}

double Polytope::margin(const Eigen::Ref<const VectorXd> &x) const {
  if (G.rows() == 0)
    return kInf;
  if (!x.allFinite())
    return -kInf;
  const VectorXd v = G * x;
  return (H - v).minCoeff();
}

bool Polytope::operator==(const Polytope &o) const {
  return G.rows() == o.G.rows() && G.cols() == o.G.cols() && G == o.G &&
         H == o.H;
}

bool Ball::contains(const Eigen::Ref<const VectorXd> &x) const {
  if (!x.allFinite())
    return false;
  return (x - center).squaredNorm() <= radius * radius;
}

double Ball::margin(const Eigen::Ref<const VectorXd> &x) const {
  if (!x.allFinite())
    return -kInf;
  return radius * radius - (x - center).squaredNorm();
}

int region_dim(const Region &r) {
  return std::visit([](const auto &s) { return s.dim(); }, r);
}

InputBox InputBox::unbounded(int input_dim) {
  return InputBox{VectorXd::Constant(input_dim, -kInf),
                  VectorXd::Constant(input_dim, kInf)};
}

InputBox InputBox::make(VectorXd lower, VectorXd upper) {
  if (lower.size() != upper.size())
    throw SpecError("input box bounds must have equal length");
  if ((lower.array() > upper.array()).any())
    throw SpecError("input box lower bound exceeds upper bound");
  return InputBox{std::move(lower), std::move(upper)};
}

bool InputBox::is_unbounded() const {
  return (lower.array() == -kInf).all() && (upper.array() == kInf).all();
}

double InputBox::margin(const Eigen::Ref<const VectorXd> &u) const {
  double m = kInf;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::isnan(u(i)))
      return -kInf;
    m = std::min(m, std::min(u(i) - lower(i), upper(i) - u(i)));
  }
  return m;
}

SpecExpr SpecExpr::at(Region region, int time) {
  if (time < 0)
    throw SpecError("time index must be nonnegative");
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kAt, std::move(region), time, time, {}}));
}

SpecExpr SpecExpr::next(int steps, Region region) {
  if (steps < 0)
    throw SpecError("next needs a nonnegative step count");
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kNext, std::move(region), steps, steps, {}}));
}

SpecExpr SpecExpr::always(int from, int to, Region region) {
  if (from < 0 || from > to)
    throw SpecError("always needs 0 <= from <= to");
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kAlways, std::move(region), from, to, {}}));
}

SpecExpr SpecExpr::eventually(int from, int to, Region region) {
  if (from < 0 || from > to)
    throw SpecError("eventually needs 0 <= from <= to");
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kEventually, std::move(region), from, to, {}}));
}

SpecExpr SpecExpr::all_of(std::vector<SpecExpr> children) {
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kAnd, Polytope{}, 0, 0, std::move(children)}));
}

SpecExpr SpecExpr::any_of(std::vector<SpecExpr> children) {
  return SpecExpr(std::make_shared<const Node>(
      Node{Op::kOr, Polytope{}, 0, 0, std::move(children)}));
}

int SpecExpr::max_time() const {
  switch (op()) {
  case Op::kAnd:
  case Op::kOr: {
    int t = -1;
    for (const auto &c : children())
      t = std::max(t, c.max_time());
    return t;
  }
  default:
    return to();
  }
}

bool SpecExpr::has_disjunction() const {
  if (op() == Op::kOr || op() == Op::kEventually)
    return true;
  return std::any_of(children().begin(), children().end(),
                     [](const SpecExpr &c) { return c.has_disjunction(); });
}

bool SpecExpr::has_ball() const {
  if (op() == Op::kAnd || op() == Op::kOr)
    return std::any_of(children().begin(), children().end(),
                       [](const SpecExpr &c) { return c.has_ball(); });
  return std::holds_alternative<Ball>(region());
}

bool SpecExpr::operator==(const SpecExpr &o) const {
  if (node_ == o.node_)
    return true;
  if (op() != o.op())
    return false;
  if (op() == Op::kAnd || op() == Op::kOr)
    return children() == o.children();
  return from() == o.from() && to() == o.to() && region() == o.region();
}

bool StageSpec::satisfied(const Trajectory &traj) const {
  if (traj.states.cols() != static_cast<Eigen::Index>(stages.size()))
    throw SpecError("trajectory length does not match the stage spec");
  for (std::size_t k = 0; k < stages.size(); ++k)
    if (!stages[k].contains(traj.states.col(static_cast<Eigen::Index>(k))))
      return false;
  return true;
}

void validate(const SpecExpr &expr, int horizon) {
  const int t = expr.max_time();
  if (t > horizon) {
    std::ostringstream os;
    os << "specification references time " << t << " beyond horizon "
       << horizon;
    throw SpecError(os.str());
  }
}

SpecExpr desugar(const SpecExpr &expr, std::optional<int> horizon) {
  if (horizon)
    validate(expr, *horizon);
  using Op = SpecExpr::Op;
  switch (expr.op()) {
  case Op::kAt:
    return expr;
  case Op::kNext:
    return SpecExpr::at(expr.region(), expr.from());
  case Op::kAlways:
  case Op::kEventually: {
    std::vector<SpecExpr> atoms;
    for (int i = expr.from(); i <= expr.to(); ++i)
      atoms.push_back(SpecExpr::at(expr.region(), i));
    return expr.op() == Op::kAlways ? SpecExpr::all_of(std::move(atoms))
                                    : SpecExpr::any_of(std::move(atoms));
  }
  case Op::kAnd:
  case Op::kOr: {
    std::vector<SpecExpr> out;
    out.reserve(expr.children().size());
    for (const auto &c : expr.children())
      out.push_back(desugar(c));
    return expr.op() == Op::kAnd ? SpecExpr::all_of(std::move(out))
                                 : SpecExpr::any_of(std::move(out));
  }
  }
  return expr;
}

namespace {

void collect_stage_rows(const SpecExpr &e, std::vector<std::vector<const Polytope *>> &per_step) {
  using Op = SpecExpr::Op;
  switch (e.op()) {
  case Op::kOr:
  case Op::kEventually:
    throw NotProductRepresentable(
        "disjunctive specification has no product form; use the scenario "
        "path (`scenario` command)");
  case Op::kAnd:
    for (const auto &c : e.children())
      collect_stage_rows(c, per_step);
    return;
  default:
    break;
  }
  const auto *poly = std::get_if<Polytope>(&e.region());
  if (!poly)
    throw NotProductRepresentable(
        "ball atoms are not polytopes; use the scenario path (`scenario` "
        "command)");
  for (int k = e.from(); k <= e.to(); ++k)
    per_step[static_cast<std::size_t>(k)].push_back(poly);
}

} // namespace

StageSpec to_stage_spec(const SpecExpr &expr, int horizon, int state_dim,
                        const std::optional<Polytope> &state_box) {
  if (horizon < 0)
    throw SpecError("horizon must be nonnegative");
  validate(expr, horizon);
  std::vector<std::vector<const Polytope *>> per_step(
      static_cast<std::size_t>(horizon) + 1);
  collect_stage_rows(expr, per_step);
  StageSpec out;
  out.stages.reserve(per_step.size());
  for (auto &atoms : per_step) {
    if (state_box)
      atoms.push_back(&*state_box);
    int q = 0;
    for (const Polytope *p : atoms) {
      if (p->dim() != state_dim)
        throw SpecError("polytope dimension does not match the state");
      q += p->rows();
    }
    Polytope stage{MatrixXd(q, state_dim), VectorXd(q)};
    int r = 0;
    for (const Polytope *p : atoms) {
      stage.G.middleRows(r, p->rows()) = p->G;
      stage.H.segment(r, p->rows()) = p->H;
      r += p->rows();
    }
    out.stages.push_back(std::move(stage));
  }
  return out;
}

namespace {

auto state_at(const Trajectory &traj, int k) {
  if (k >= traj.states.cols())
    throw SpecError("specification time exceeds the trajectory horizon");
  return traj.states.col(k);
}

template <typename AtomFn, typename AndFn, typename OrFn, typename T>
T fold(const SpecExpr &e, const Trajectory &traj, AtomFn atom, AndFn and_fn,
       OrFn or_fn, T and_unit, T or_unit) {
  using Op = SpecExpr::Op;
  switch (e.op()) {
  case Op::kAt:
  case Op::kNext:
    return atom(e.region(), state_at(traj, e.from()));
  case Op::kAlways:
  case Op::kEventually: {
    const bool conj = e.op() == Op::kAlways;
    T acc = conj ? and_unit : or_unit;
    for (int i = e.from(); i <= e.to(); ++i) {
      const T v = atom(e.region(), state_at(traj, i));
      acc = conj ? and_fn(acc, v) : or_fn(acc, v);
    }
    return acc;
  }
  case Op::kAnd: {
    T acc = and_unit;
    for (const auto &c : e.children())
      acc = and_fn(acc, fold(c, traj, atom, and_fn, or_fn, and_unit, or_unit));
    return acc;
  }
  case Op::kOr: {
    T acc = or_unit;
    for (const auto &c : e.children())
      acc = or_fn(acc, fold(c, traj, atom, and_fn, or_fn, and_unit, or_unit));
    return acc;
  }
  }
  return and_unit;
}

} // namespace

bool check_traj(const SpecExpr &expr, const Trajectory &traj) {
  return fold(
      expr, traj,
      [](const Region &r, const auto &x) {
        return std::visit([&](const auto &s) { return s.contains(x); }, r);
      },
      [](bool a, bool b) { return a && b; },
      [](bool a, bool b) { return a || b; }, true, false);
}

double margin(const SpecExpr &expr, const Trajectory &traj) {
  return fold(
      expr, traj,
      [](const Region &r, const auto &x) {
        return std::visit([&](const auto &s) { return s.margin(x); }, r);
      },
      [](double a, double b) { return std::min(a, b); },
      [](double a, double b) { return std::max(a, b); }, kInf, -kInf);
}

int count_violations(const SpecExpr &expr, const Trajectory &traj) {
  constexpr int kNone = 1 << 20;
  return fold(
      expr, traj,
      [](const Region &r, const auto &x) {
        return std::visit([&](const auto &s) { return s.contains(x) ? 0 : 1; },
                          r);
      },
      [](int a, int b) { return a + b; },
      [](int a, int b) { return std::min(a, b); }, 0, kNone);
}

} // namespace resilo

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
#ifndef RESILO_NELDER_MEAD_HPP
#define RESILO_NELDER_MEAD_HPP

#include "resilo/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace resilo {

struct NelderMeadOptions {
  double initial_step = 0.1;
  int max_evals = 2000;       // per simplex run
  double diameter_tol = 1e-6; // infinity-norm spread around the best vertex
  int max_restarts = 10;      // fresh simplices around the incumbent
  double restart_gain = 1e-12;
};

struct NelderMeadResult {
  VectorXd x;
  double f = kInf;
  int evals = 0;
  int restarts = 0;
};

namespace detail {

template <typename F> double nm_value(F &f, const VectorXd &x) {
  const double v = f(x);
  return std::isnan(v) ? kInf : v;
}

// One simplex run (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
template <typename F>
NelderMeadResult nelder_mead_once(F &f, const VectorXd &x0, double f0,
                                  const NelderMeadOptions &opt) {
  const auto d = x0.size();
  std::vector<VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(d + 1), f0);
  int evals = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    auto &p = pts[static_cast<std::size_t>(i + 1)];
    p(i) += opt.initial_step * std::max(1.0, std::abs(x0(i)));
    vals[static_cast<std::size_t>(i + 1)] = nm_value(f, p);
    ++evals;
  }
  std::vector<std::size_t> order(pts.size());
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return vals[a] < vals[b];
    });
    std::vector<VectorXd> p2;
    std::vector<double> v2;
    for (auto i : order) {
      p2.push_back(pts[i]);
      v2.push_back(vals[i]);
    }
    pts.swap(p2);
    vals.swap(v2);
  };
  sort_simplex();
  while (evals < opt.max_evals) {
    double diameter = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      diameter = std::max(diameter, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    if (diameter < opt.diameter_tol)
      break;
    const std::size_t worst = pts.size() - 1;
    VectorXd centroid = VectorXd::Zero(d);
    for (std::size_t i = 0; i < worst; ++i)
      centroid += pts[i];
    centroid /= static_cast<double>(d);

    const VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = nm_value(f, xr);
    ++evals;
    if (fr < vals[0]) {
      const VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = nm_value(f, xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const VectorXd xc = outside ? VectorXd(centroid + 0.5 * (xr - centroid))
                                  : VectorXd(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = nm_value(f, xc);
      ++evals;
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = nm_value(f, pts[i]);
          ++evals;
        }
      }
    }
    sort_simplex();
  }
  return {pts[0], vals[0], evals, 0};
}

} // namespace detail

/**
 * Derivative-free minimisation of f over R^d.
 *
 * Runs the simplex method from x0 and restarts a fresh simplex around the
 * incumbent until a restart gains less than `restart_gain` or
 * `max_restarts` is reached. Fully deterministic; NaN values count as +inf.
 */
template <typename F>
NelderMeadResult nelder_mead_minimize(F &&f, const VectorXd &x0,
                                      const NelderMeadOptions &opt = {}) {
  NelderMeadResult best{x0, detail::nm_value(f, x0), 1, 0};
  if (x0.size() == 0 || best.f == -kInf)
    return best;
  for (int r = 0; r <= opt.max_restarts; ++r) {
    auto run = detail::nelder_mead_once(f, best.x, best.f, opt);
    best.evals += run.evals;
    const double gain = best.f - run.f;
    if (run.f < best.f) {
      best.x = run.x;
      best.f = run.f;
    }
    best.restarts = r;
    if (!(gain > opt.restart_gain) || best.f == -kInf)
      break;
  }
  return best;
}

} // namespace resilo

#endif // RESILO_NELDER_MEAD_HPP

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
#include "resilo/risk_bound.hpp"

#include "resilo/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace resilo {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void check_args(int k, int M, double beta) {
  if (M < 1 || k < 0 || k > M) {
    std::ostringstream os;
    os << "risk bound needs 0 <= k <= M and M >= 1 (got k=" << k
       << ", M=" << M << ")";
    throw Error(os.str());
  }
  if (!(beta > 0.0 && beta <= 1.0))
    throw Error("confidence parameter beta must lie in (0, 1]");
}

// Residual with the log-binomials of the left sum precomputed.
class RiskPolynomial {
public:
  RiskPolynomial(int k, int M, double beta)
      : k_(k), M_(M), log_scale_(std::log(beta) - std::log(double(M))),
        log_right_coeff_(log_binomial(M, k)) {
    log_coeffs_.reserve(static_cast<std::size_t>(M - k));
    for (int m = k; m < M; ++m)
      log_coeffs_.push_back(log_binomial(m, k));
  }

  double operator()(double t) const {
    const double lt = std::log(t);
    // log-sum-exp over the left terms; the exponent m - k multiplies log t.
    double peak = -kInf;
    for (std::size_t j = 0; j < log_coeffs_.size(); ++j)
      peak = std::max(peak, term(j, lt));
    double acc = 0.0;
    for (std::size_t j = 0; j < log_coeffs_.size(); ++j)
      acc += std::exp(term(j, lt) - peak);
    const double left = log_scale_ + peak + std::log(acc);
    const double right = log_right_coeff_ + (M_ - k_) * lt;
    return left - right;
  }

private:
  double term(std::size_t j, double lt) const {
    return j == 0 ? log_coeffs_[0] : log_coeffs_[j] + static_cast<double>(j) * lt;
  }

  int k_;
  int M_;
  double log_scale_;
  double log_right_coeff_;
  std::vector<double> log_coeffs_;
};

} // namespace

double risk_polynomial_log_residual(int k, int M, double beta, double t) {
  check_args(k, M, beta);
  if (k == M)
    throw Error("risk polynomial is undefined for k = M");
  return RiskPolynomial(k, M, beta)(t);
}

double risk_bound(int k, int M, double beta) {
  check_args(k, M, beta);
  if (k == M)
    return 1.0;
  const RiskPolynomial phi(k, M, beta);
  // phi -> +inf as t -> 0+; at t = 1 it equals log(beta (M-k) / (M (k+1))).
  const double at_one = phi(1.0);
  if (at_one > 1e-12)
    throw NumericalFailure("risk polynomial root is not bracketed in (0, 1)");
  if (at_one >= -1e-12)
    return 0.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 1.0 - 0.5 * (lo + hi);
}

} // namespace resilo

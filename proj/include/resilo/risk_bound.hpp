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
#ifndef RESILO_RISK_BOUND_HPP
#define RESILO_RISK_BOUND_HPP

namespace resilo {

/**
 * Log-space residual of the risk polynomial at t in (0, 1]:
 *
 *   log( beta/M * sum_{m=k}^{M-1} C(m,k) t^(m-k) ) - log( C(M,k) t^(M-k) ).
 *
 * Positive below the root, negative above it.
 */
double risk_polynomial_log_residual(int k, int M, double beta, double t);

/**
 * Upper bound b(k) on the violation probability of a scenario solution with
 * complexity k out of M scenarios, holding with confidence 1 - beta.
 * b(M) = 1; otherwise b(k) = 1 - t(k) with t(k) the root in (0, 1) of the
 * risk polynomial, found by bisection to 1e-10.
 */
double risk_bound(int k, int M, double beta);

} // namespace resilo

#endif // RESILO_RISK_BOUND_HPP

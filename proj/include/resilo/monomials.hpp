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
#ifndef RESILO_MONOMIALS_HPP
#define RESILO_MONOMIALS_HPP

#include "resilo/common.hpp"

#include <cstdint>
#include <vector>

namespace resilo {

/// Exact binomial coefficient C(n, k); zero when k is outside [0, n].
inline std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n)
    return 0;
  if (k > n - k)
    k = n - k;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * (n - k + i) / i;
  return r;
}

/// Number of distinct monomials of total degree exactly `degree` in `n`
/// variables, C(n + degree - 1, n - 1).
inline int monomial_block_size(int n, int degree) {
  return static_cast<int>(binomial(n + degree - 1, n - 1));
}

/// Number of monomials of degree at most `degree`, C(n + degree, n).
inline int monomial_count(int n, int degree) {
  return static_cast<int>(binomial(n + degree, n));
}

using Exponent = std::vector<int>;

/**
 * Exponent vectors of the monomial basis in graded-lexicographic order:
 * blocks by increasing total degree, and inside a block exponent vectors in
 * decreasing lexicographic order. For n = 2, degree 2 this yields
 * 1, x1, x2, x1^2, x1 x2, x2^2.
 */
inline std::vector<Exponent> monomial_exponents(int n, int degree) {
  std::vector<Exponent> out;
  out.reserve(static_cast<std::size_t>(monomial_count(n, degree)));
  Exponent e(static_cast<std::size_t>(n), 0);
  // Recursive fill of the remaining total over positions [pos, n).
  auto fill = [&](auto &&self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      e[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(e);
      return;
    }
    for (int p = remaining; p >= 0; --p) {
      e[static_cast<std::size_t>(pos)] = p;
      self(self, pos + 1, remaining - p);
    }
  };
  for (int d = 0; d <= degree; ++d)
    fill(fill, 0, d);
  return out;
}

/// Evaluates precomputed monomials at x into `out` (resized by the caller).
template <typename DerivedX, typename DerivedOut>
void monomial_basis_into(const Eigen::MatrixBase<DerivedX> &x,
                         const std::vector<Exponent> &exponents,
                         Eigen::MatrixBase<DerivedOut> &out) {
  using Scalar = typename DerivedOut::Scalar;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    Scalar v(1);
    const Exponent &e = exponents[j];
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int p = 0; p < e[i]; ++p)
        v *= x(static_cast<Eigen::Index>(i));
    out(static_cast<Eigen::Index>(j)) = v;
  }
}

/// Monomial feature vector [1, x^[1], ..., x^[degree]] of length
/// C(n + degree, n).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
monomial_basis(const Eigen::MatrixBase<Derived> &x, int degree) {
  const auto exps = monomial_exponents(static_cast<int>(x.size()), degree);
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(
      static_cast<Eigen::Index>(exps.size()));
  monomial_basis_into(x, exps, out);
  return out;
}

/**
 * Matrix T with basis(x - center) == T * basis(x) for every x, obtained by
 * binomial expansion of each shifted monomial. Used to express controllers
 * written in coordinates centred at a reference state in the raw basis.
 */
inline MatrixXd monomial_shift_transform(const VectorXd &center, int degree) {
  const int n = static_cast<int>(center.size());
  const auto exps = monomial_exponents(n, degree);
  const auto D = static_cast<Eigen::Index>(exps.size());
  auto index_of = [&](const Exponent &e) {
    for (std::size_t j = 0; j < exps.size(); ++j)
      if (exps[j] == e)
        return static_cast<Eigen::Index>(j);
    return Eigen::Index{-1};
  };
  MatrixXd T = MatrixXd::Zero(D, D);
  for (Eigen::Index row = 0; row < D; ++row) {
    const Exponent &e = exps[static_cast<std::size_t>(row)];
    // Enumerate sub-exponents k <= e; term prod_i C(e_i,k_i) (-c_i)^(e_i-k_i).
    Exponent k(static_cast<std::size_t>(n), 0);
    auto expand = [&](auto &&self, int pos, double coeff) -> void {
      if (pos == n) {
        T(row, index_of(k)) += coeff;
        return;
      }
      const auto p = static_cast<std::size_t>(pos);
      for (int ki = 0; ki <= e[p]; ++ki) {
        k[p] = ki;
        double c = static_cast<double>(binomial(e[p], ki));
        for (int r = 0; r < e[p] - ki; ++r)
          c *= -center(pos);
        self(self, pos + 1, coeff * c);
      }
    };
    expand(expand, 0, 1.0);
  }
  return T;
}

} // namespace resilo

#endif // RESILO_MONOMIALS_HPP

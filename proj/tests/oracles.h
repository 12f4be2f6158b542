// Copyright 2026 The DMC Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMC_TESTS_ORACLES_H_
#define DMC_TESTS_ORACLES_H_

// Independent reference computations used to freeze expected values. Nothing
// here calls into the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "dmc/matrix.h"

namespace dmc::testing {

using Grid = std::vector<std::vector<double>>;

inline Grid ToGrid(const Dense& a) {
  Grid g(a.rows(), std::vector<double>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) g[i][j] = a(i, j);
  return g;
}

inline Dense FromGrid(const Grid& g) {
  const std::size_t r = g.size(), c = r == 0 ? 0 : g[0].size();
  std::vector<double> v;
  for (const auto& row : g) v.insert(v.end(), row.begin(), row.end());
  return Dense(r, c, std::move(v));
}

inline Dense RandomDense(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                         double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = normal(rng);
  return Dense(rows, cols, std::move(v));
}

// Element-wise triple loop, inner index ascending.
inline Grid TripleLoopProduct(const Grid& a, const Grid& b) {
  const std::size_t m = a.size(), k = b.size(), n = k == 0 ? 0 : b[0].size();
  Grid c(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i][p] * b[p][j];
      c[i][j] = s;
    }
  return c;
}

inline Grid Transposed(const Grid& a) {
  if (a.empty()) return {};
  Grid t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline double ScalarLoopNorm(const Grid& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> GaussSolve(Grid a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Least-squares fit of each column of Z on the columns of U through the
// normal equations, solved per column with Gaussian elimination.
inline Grid LeastSquaresColumns(const Grid& u, const Grid& z) {
  const std::size_t m = u.size(), r = u[0].size(), n = z[0].size();
  Grid normal(r, std::vector<double>(r, 0.0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t p = 0; p < m; ++p) normal[i][j] += u[p][i] * u[p][j];
  Grid out(r, std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> rhs(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t p = 0; p < m; ++p) rhs[i] += u[p][i] * z[p][c];
    const auto x = GaussSolve(normal, rhs);
    for (std::size_t i = 0; i < r; ++i) out[i][c] = x[i];
  }
  return out;
}

// Expected percentile of each item under uniformly random tie-breaking:
// averages 100 * position / n over every ordering of each tie group, by
// enumerating permutations of the tied block.
inline double PermutationAveragedAps(const std::vector<double>& scores,
                                     const std::set<std::size_t>& liked) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double total = 0.0;
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && scores[order[end]] == scores[order[begin]]) ++end;
    std::vector<std::size_t> block(order.begin() + begin, order.begin() + end);
    std::sort(block.begin(), block.end());
    double block_sum = 0.0;
    std::size_t perms = 0;
    do {
      ++perms;
      for (std::size_t k = 0; k < block.size(); ++k)
        if (liked.count(block[k]) != 0)
          block_sum += 100.0 * static_cast<double>(begin + k + 1) / static_cast<double>(n);
    } while (std::next_permutation(block.begin(), block.end()));
    total += block_sum / static_cast<double>(perms);
    begin = end;
  }
  return total / static_cast<double>(liked.size());
}

}  // namespace dmc::testing

#endif  // DMC_TESTS_ORACLES_H_

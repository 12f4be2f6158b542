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

#include "dmc/matrix.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmc/errors.h"

namespace dmc {
namespace {

// Below this many multiply-adds a kernel stays on the calling thread.
constexpr std::size_t kParallelWork = std::size_t{1} << 15;

std::string Shape(const Dense& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void RequireSameShape(const Dense& a, const Dense& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(op) + ": shape mismatch " + Shape(a) +
                      " vs " + Shape(b));
  }
}

}  // namespace

Dense::Dense(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Dense::Dense(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw ConfigError("Dense: expected " + std::to_string(rows * cols) +
                      " values, got " + std::to_string(values_.size()));
  }
  if (!AllFinite()) throw ConfigError("Dense: non-finite value");
}

Dense Dense::Identity(std::size_t n) {
  Dense out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Dense Dense::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ConfigError("Dense::FromRows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Dense(r, c, std::move(values));
}

bool Dense::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

MaskedIndexSet::MaskedIndexSet(std::size_t rows, std::size_t cols,
                               std::vector<Index2> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Index2& e = entries_[k];
    if (e.row >= rows_ || e.col >= cols_) {
      throw ConfigError("MaskedIndexSet: position (" + std::to_string(e.row) +
                        "," + std::to_string(e.col) + ") outside " +
                        std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    if (k > 0 && entries_[k - 1] == e) {
      throw ConfigError("MaskedIndexSet: duplicate position (" +
                        std::to_string(e.row) + "," + std::to_string(e.col) +
                        ")");
    }
  }
}

Dense matmul(const Dense& a, const Dense& b) {
  if (a.cols() != b.rows()) {
    throw ConfigError("matmul: inner dimensions differ, " + Shape(a) + " * " +
                      Shape(b));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Dense c(m, n);
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* pc = c.values().data();
  // c(i, j) accumulates p = 0, 1, ..., k-1 in order for every thread count.
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double* crow = pc + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  return c;
}

Dense matmul_tn(const Dense& a, const Dense& b) {
  if (a.rows() != b.rows()) {
    throw ConfigError("matmul_tn: row counts differ, " + Shape(a) + "^T * " +
                      Shape(b));
  }
  const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
  Dense c(m, n);
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* pc = c.values().data();
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    double* crow = pc + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double api = pa[p * m + i];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
  return c;
}

Dense matmul_nt(const Dense& a, const Dense& b) {
  if (a.cols() != b.cols()) {
    throw ConfigError("matmul_nt: column counts differ, " + Shape(a) + " * " +
                      Shape(b) + "^T");
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Dense c(m, n);
  const double* pa = a.values().data();
  const double* pb = b.values().data();
  double* pc = c.values().data();
#pragma omp parallel for schedule(static) if (m * n * k > kParallelWork)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = pb + j * k;
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += arow[p] * brow[p];
      pc[i * n + j] = sum;
    }
  }
  return c;
}

Dense gram(const Dense& a) {
  const std::size_t k = a.rows(), n = a.cols();
  Dense g(n, n);
  const double* pa = a.values().data();
  double* pg = g.values().data();
#pragma omp parallel for schedule(dynamic) if (n * n * k > kParallelWork)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    for (std::size_t j = static_cast<std::size_t>(i); j < n; ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += pa[p * n + i] * pa[p * n + j];
      pg[i * n + j] = sum;
      pg[j * n + i] = sum;
    }
  }
  return g;
}

Dense transpose(const Dense& a) {
  Dense t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Dense solve_spd(const Dense& s, const Dense& b, double ridge) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw ConfigError("solve_spd: matrix is " + Shape(s));
  if (b.rows() != n) {
    throw ConfigError("solve_spd: right-hand side is " + Shape(b) +
                      " for a " + Shape(s) + " system");
  }
  if (!(ridge >= 0.0)) throw ConfigError("solve_spd: ridge must be >= 0");

  // Lower-triangular Cholesky factor, row-major, upper part unused.
  Dense l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j) + ridge;
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw SingularityError("solve_spd: matrix not positive definite (pivot " +
                             std::to_string(j) + " of " + std::to_string(n) +
                             ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t p = 0; p < j; ++p) v -= l(i, p) * l(j, p);
      l(i, j) = v / ljj;
    }
  }

  Dense x = b;
  const std::size_t m = b.cols();
  // Forward substitution L y = b, then back substitution L^T x = y.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < i; ++p) {
      const double lip = l(i, p);
      for (std::size_t c = 0; c < m; ++c) x(i, c) -= lip * x(p, c);
    }
    const double lii = l(i, i);
    for (std::size_t c = 0; c < m; ++c) x(i, c) /= lii;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t p = ii + 1; p < n; ++p) {
      const double lpi = l(p, ii);
      for (std::size_t c = 0; c < m; ++c) x(ii, c) -= lpi * x(p, c);
    }
    const double lii = l(ii, ii);
    for (std::size_t c = 0; c < m; ++c) x(ii, c) /= lii;
  }
  if (!x.AllFinite()) throw SingularityError("solve_spd: non-finite solution");
  return x;
}

Dense masked_assign(const Dense& m, const MaskedIndexSet& mask,
                    std::span<const double> values) {
  if (mask.rows() != m.rows() || mask.cols() != m.cols()) {
    throw ConfigError("masked_assign: mask grid " + std::to_string(mask.rows()) +
                      "x" + std::to_string(mask.cols()) + " vs matrix " +
                      Shape(m));
  }
  if (values.size() != mask.size()) {
    throw ConfigError("masked_assign: " + std::to_string(values.size()) +
                      " values for " + std::to_string(mask.size()) +
                      " positions");
  }
  Dense out = m;
  const auto entries = mask.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    out(entries[k].row, entries[k].col) = values[k];
  }
  return out;
}

double frob_norm(const Dense& a) {
  // Per-row partial sums, then an ordered sum of the partials: the same
  // answer for every thread count.
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<double> partial(rows, 0.0);
  const double* pa = a.values().data();
#pragma omp parallel for schedule(static) if (a.size() > kParallelWork)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = pa[i * cols + j];
      sum += v * v;
    }
    partial[i] = sum;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return std::sqrt(total);
}

double frob_distance(const Dense& a, const Dense& b) {
  RequireSameShape(a, b, "frob_distance");
  double total = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t k = 0; k < va.size(); ++k) {
    const double d = va[k] - vb[k];
    total += d * d;
  }
  return std::sqrt(total);
}

double trace(const Dense& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

void add_scaled(Dense& y, double alpha, const Dense& x) {
  RequireSameShape(y, x, "add_scaled");
  auto vy = y.values();
  const auto vx = x.values();
  for (std::size_t k = 0; k < vy.size(); ++k) vy[k] += alpha * vx[k];
}

void scale(Dense& y, double alpha) {
  for (double& v : y.values()) v *= alpha;
}

}  // namespace dmc

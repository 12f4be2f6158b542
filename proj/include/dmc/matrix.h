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

#ifndef DMC_MATRIX_H_
#define DMC_MATRIX_H_

// Dense row-major blocks, observed-index masks, and the handful of kernels
// the solvers need. Every reduction accumulates in ascending index order so
// results do not depend on how work is split across threads.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace dmc {

class Dense {
 public:
  Dense() = default;
  // Zero-filled.
  Dense(std::size_t rows, std::size_t cols);
  // Throws ConfigError if values.size() != rows * cols or any value is not
  // finite.
  Dense(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Dense Identity(std::size_t n);
  static Dense FromRows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols_, cols_);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }

  bool AllFinite() const;

  friend bool operator==(const Dense& a, const Dense& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct Index2 {
  std::uint32_t row;
  std::uint32_t col;

  friend auto operator<=>(const Index2&, const Index2&) = default;
};

// Sorted, duplicate-free set of (row, col) positions inside a rows x cols
// grid.
class MaskedIndexSet {
 public:
  MaskedIndexSet() = default;
  // Sorts the entries; throws ConfigError on duplicates or out-of-bounds
  // positions.
  MaskedIndexSet(std::size_t rows, std::size_t cols, std::vector<Index2> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Index2> entries() const { return entries_; }

  friend bool operator==(const MaskedIndexSet&, const MaskedIndexSet&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Index2> entries_;
};

// A * B.
Dense matmul(const Dense& a, const Dense& b);
// A^T * B without forming the transpose.
Dense matmul_tn(const Dense& a, const Dense& b);
// A * B^T without forming the transpose.
Dense matmul_nt(const Dense& a, const Dense& b);
// A^T * A. Each (i, j) pair is accumulated once and mirrored, so the result
// is exactly symmetric.
Dense gram(const Dense& a);
Dense transpose(const Dense& a);

// Solves (S + ridge * I) X = B through a Cholesky factorization. Throws
// SingularityError if the shifted matrix is not numerically positive
// definite.
Dense solve_spd(const Dense& s, const Dense& b, double ridge);

// Copy of M with M(p) replaced by values[k] for the k-th mask position p.
Dense masked_assign(const Dense& m, const MaskedIndexSet& mask,
                    std::span<const double> values);

double frob_norm(const Dense& a);
// ||A - B||_F.
double frob_distance(const Dense& a, const Dense& b);
double trace(const Dense& a);

// y += alpha * x.
void add_scaled(Dense& y, double alpha, const Dense& x);
void scale(Dense& y, double alpha);

}  // namespace dmc

#endif  // DMC_MATRIX_H_

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

#include "dmc/serial.h"

#include <cmath>

#include "dmc/errors.h"

namespace dmc::serial {

Dense matmul(const Dense& a, const Dense& b) {
  if (a.cols() != b.rows()) throw ConfigError("serial::matmul: shape mismatch");
  Dense c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) sum += a(i, p) * b(p, j);
      c(i, j) = sum;
    }
  }
  return c;
}

Dense matmul_tn(const Dense& a, const Dense& b) {
  if (a.rows() != b.rows()) {
    throw ConfigError("serial::matmul_tn: shape mismatch");
  }
  Dense c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) sum += a(p, i) * b(p, j);
      c(i, j) = sum;
    }
  }
  return c;
}

Dense matmul_nt(const Dense& a, const Dense& b) {
  if (a.cols() != b.cols()) {
    throw ConfigError("serial::matmul_nt: shape mismatch");
  }
  Dense c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) sum += a(i, p) * b(j, p);
      c(i, j) = sum;
    }
  }
  return c;
}

Dense gram(const Dense& a) { return serial::matmul_tn(a, a); }

double frob_norm(const Dense& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace dmc::serial

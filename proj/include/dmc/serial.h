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

#ifndef DMC_SERIAL_H_
#define DMC_SERIAL_H_

// Single-threaded reference versions of the OpenMP kernels in matrix.h.
// Kept for tests and benchmarks; the multiplication kernels must agree with
// their parallel counterparts bitwise.

#include "dmc/matrix.h"

namespace dmc::serial {

Dense matmul(const Dense& a, const Dense& b);
Dense matmul_tn(const Dense& a, const Dense& b);
Dense matmul_nt(const Dense& a, const Dense& b);
Dense gram(const Dense& a);
double frob_norm(const Dense& a);

}  // namespace dmc::serial

#endif  // DMC_SERIAL_H_

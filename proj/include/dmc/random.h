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

#ifndef DMC_RANDOM_H_
#define DMC_RANDOM_H_

#include <cstdint>
#include <random>

namespace dmc {

// Named streams derived from one experiment seed, so that e.g. changing the
// number of agents does not perturb the synthetic data.
enum class Stream : std::uint32_t {
  kSyntheticFactors = 1,
  kSyntheticMask = 2,
  kSyntheticNoise = 3,
  kSplit = 4,
  kTopology = 5,
  // Agent i uses kAgentInit + i.
  kAgentInit = 1000,
};

inline std::mt19937_64 MakeRng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

inline std::mt19937_64 MakeRng(std::uint64_t seed, Stream stream,
                               std::uint32_t offset = 0) {
  return MakeRng(seed, static_cast<std::uint32_t>(stream) + offset);
}

}  // namespace dmc

#endif  // DMC_RANDOM_H_

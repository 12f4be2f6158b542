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

#ifndef DMC_TOPOLOGY_H_
#define DMC_TOPOLOGY_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dmc {

// Unordered pair, stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

// Static undirected communication graph over the agents. Connected by
// construction (a single agent with no edges counts as connected).
class Topology {
 public:
  Topology() = default;
  // Normalizes and sorts the edges. Throws ConfigError on self-loops,
  // duplicate edges, out-of-range endpoints or a disconnected graph.
  Topology(std::size_t agents, std::vector<Edge> edges);

  std::size_t agents() const { return neighbors_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  // Ascending.
  std::span<const std::size_t> neighbors(std::size_t agent) const {
    return neighbors_[agent];
  }
  std::size_t degree(std::size_t agent) const { return neighbors_[agent].size(); }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

Topology ring(std::size_t agents);
Topology complete(std::size_t agents);
// Includes each pair independently with probability p, redrawing the whole
// graph until it is connected. Throws GenerationError after 1000 attempts.
Topology erdos_renyi(std::size_t agents, double p, std::uint64_t seed);

// Breadth-first reachability from agent 0.
bool is_connected(std::size_t agents, std::span<const Edge> edges);
bool is_connected(const Topology& topology);

// First line: agent count. Then one "i j" pair per line; '#' comments and
// blank lines are ignored.
Topology parse_topology(std::istream& in, const std::string& source);
Topology load_topology(const std::filesystem::path& path);

}  // namespace dmc

#endif  // DMC_TOPOLOGY_H_

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

#include "dmc/topology.h"

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include "dmc/errors.h"
#include "dmc/random.h"

namespace dmc {

namespace {
constexpr int kMaxConnectAttempts = 1000;
}  // namespace

Topology::Topology(std::size_t agents, std::vector<Edge> edges)
    : edges_(std::move(edges)), neighbors_(agents) {
  for (Edge& e : edges_) {
    if (e.first == e.second) {
      throw ConfigError("topology: self-loop at agent " + std::to_string(e.first));
    }
    if (e.first >= agents || e.second >= agents) {
      throw ConfigError("topology: edge (" + std::to_string(e.first) + "," +
                        std::to_string(e.second) + ") references an agent >= " +
                        std::to_string(agents));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw ConfigError("topology: duplicate edge");
  }
  if (!is_connected(agents, edges_)) {
    throw ConfigError("topology: graph over " + std::to_string(agents) +
                      " agents is not connected");
  }
  for (const auto& [i, j] : edges_) {
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& n : neighbors_) std::sort(n.begin(), n.end());
}

Topology ring(std::size_t agents) {
  std::vector<Edge> edges;
  if (agents == 2) {
    edges.emplace_back(0, 1);
  } else if (agents > 2) {
    for (std::size_t i = 0; i < agents; ++i) edges.emplace_back(i, (i + 1) % agents);
  }
  return Topology(agents, std::move(edges));
}

Topology complete(std::size_t agents) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t j = i + 1; j < agents; ++j) edges.emplace_back(i, j);
  return Topology(agents, std::move(edges));
}

Topology erdos_renyi(std::size_t agents, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("edge probability must be in (0, 1]");
  std::mt19937_64 rng = MakeRng(seed, Stream::kTopology);
  std::bernoulli_distribution coin(p);
  for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < agents; ++i)
      for (std::size_t j = i + 1; j < agents; ++j)
        if (coin(rng)) edges.emplace_back(i, j);
    if (is_connected(agents, edges)) return Topology(agents, std::move(edges));
  }
  throw GenerationError("no connected Erdos-Renyi graph on " +
                        std::to_string(agents) + " agents after " +
                        std::to_string(kMaxConnectAttempts) +
                        " attempts; use a larger edge probability");
}

bool is_connected(std::size_t agents, std::span<const Edge> edges) {
  if (agents <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(agents);
  for (const auto& [i, j] : edges) {
    if (i >= agents || j >= agents) return false;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(agents, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == agents;
}

bool is_connected(const Topology& topology) {
  return is_connected(topology.agents(), topology.edges());
}

Topology parse_topology(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_count = false;
  std::size_t agents = 0;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    if (!have_count) {
      long long count = -1;
      std::string rest;
      if (!(fields >> count) || count < 1 || (fields >> rest)) {
        throw ParseError(source, line_no, "expected a positive agent count");
      }
      agents = static_cast<std::size_t>(count);
      have_count = true;
      continue;
    }
    long long i = -1, j = -1;
    std::string rest;
    if (!(fields >> i >> j) || i < 0 || j < 0 || (fields >> rest)) {
      throw ParseError(source, line_no, "expected an edge 'i j'");
    }
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (!have_count) throw ParseError(source, line_no, "missing agent count");
  return Topology(agents, std::move(edges));
}

Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file " + path.string());
  return parse_topology(in, path.string());
}

}  // namespace dmc

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

#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "dmc/errors.h"

namespace dmc {
namespace {

// Union-find component count, independent of the BFS in is_connected.
std::size_t Components(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (const auto& [a, b] : edges) {
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components;
}

void ExpectWellFormed(const Topology& t) {
  std::size_t degree_sum = 0;
  for (std::size_t i = 0; i < t.agents(); ++i) {
    const auto n = t.neighbors(i);
    degree_sum += n.size();
    EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
    for (std::size_t j : n) {
      EXPECT_NE(i, j);
      const auto back = t.neighbors(j);
      EXPECT_TRUE(std::binary_search(back.begin(), back.end(), i));
    }
  }
  EXPECT_EQ(degree_sum, 2 * t.edges().size());
  if (t.agents() >= 2) {
    EXPECT_TRUE(is_connected(t));
  }
}

TEST(RingTest, Examples) {
  const Topology r4 = ring(4);
  EXPECT_EQ(std::vector<std::size_t>(r4.neighbors(0).begin(), r4.neighbors(0).end()),
            (std::vector<std::size_t>{1, 3}));
  const Topology r2 = ring(2);
  ASSERT_EQ(r2.edges().size(), 1u);
  EXPECT_EQ(r2.edges()[0], Edge(0, 1));
  const Topology r8 = ring(8);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(r8.degree(i), 2u);
  EXPECT_EQ(ring(1).edges().size(), 0u);
  for (std::size_t n = 1; n < 12; ++n) ExpectWellFormed(ring(n));
}

TEST(CompleteTest, Examples) {
  EXPECT_EQ(complete(3).edges().size(), 3u);
  EXPECT_EQ(complete(1).edges().size(), 0u);
  EXPECT_EQ(complete(8).edges().size(), 28u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(complete(8).degree(i), 7u);
  ExpectWellFormed(complete(8));
}

TEST(ErdosRenyiTest, ProbabilityOneIsComplete) {
  EXPECT_EQ(erdos_renyi(8, 1.0, 3), complete(8));
}

TEST(ErdosRenyiTest, DeterministicPerSeed) {
  EXPECT_EQ(erdos_renyi(10, 0.3, 21), erdos_renyi(10, 0.3, 21));
}

TEST(ErdosRenyiTest, ConnectedPerUnionFind) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Topology t = erdos_renyi(8, 0.4, seed);
    EXPECT_EQ(Components(8, t.edges()), 1u);
    ExpectWellFormed(t);
  }
}

TEST(ErdosRenyiTest, GivesUpWithAdvice) {
  try {
    erdos_renyi(40, 1e-6, 1);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("larger edge probability"), std::string::npos);
  }
  EXPECT_THROW(erdos_renyi(5, 0.0, 1), ConfigError);
  EXPECT_THROW(erdos_renyi(5, 1.5, 1), ConfigError);
}

TEST(IsConnectedTest, Examples) {
  EXPECT_TRUE(is_connected(ring(5)));
  const std::vector<Edge> split = {{0, 1}, {2, 3}};
  EXPECT_FALSE(is_connected(4, split));
  EXPECT_TRUE(is_connected(complete(8)));
  EXPECT_TRUE(is_connected(1, {}));
  EXPECT_FALSE(is_connected(2, {}));
}

TEST(TopologyTest, ConstructionValidates) {
  EXPECT_THROW(Topology(3, {{0, 0}, {1, 2}}), ConfigError);
  EXPECT_THROW(Topology(3, {{0, 1}, {1, 0}, {1, 2}}), ConfigError);
  EXPECT_THROW(Topology(3, {{0, 3}}), ConfigError);
  EXPECT_THROW(Topology(4, {{0, 1}, {2, 3}}), ConfigError);
  const Topology t(3, {{2, 1}, {1, 0}});
  EXPECT_EQ(t.edges()[0], Edge(0, 1));
  EXPECT_EQ(t.edges()[1], Edge(1, 2));
}

TEST(TopologyFileTest, ParsesEdgeList) {
  std::istringstream in("# custom\n4\n0 1\n1 2\n\n2 3\n");
  const Topology t = parse_topology(in, "inline");
  EXPECT_EQ(t.agents(), 4u);
  EXPECT_EQ(t.edges().size(), 3u);
  ExpectWellFormed(t);
}

TEST(TopologyFileTest, Errors) {
  std::istringstream bad_count("zero\n");
  EXPECT_THROW(parse_topology(bad_count, "x"), ParseError);
  std::istringstream bad_edge("3\n0 1\n1\n");
  EXPECT_THROW(parse_topology(bad_edge, "x"), ParseError);
  std::istringstream disconnected("3\n0 1\n");
  EXPECT_THROW(parse_topology(disconnected, "x"), ConfigError);
  EXPECT_THROW(load_topology("/nonexistent/topology.txt"), ConfigError);
}

}  // namespace
}  // namespace dmc

// Copyright 2026 The SUGAR Authors.
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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"

using namespace sugar;
using namespace sugar::testing;

namespace {

using BuildStats = Graph::BuildStats;

Graph parse(const std::string& text, BuildStats* stats = nullptr) {
  std::istringstream in(text);
  LoadedGraph lg = read_edge_list(in);
  if (stats) *stats = lg.stats;
  return lg.graph;
}

std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> d;
  for (NodeId u = 0; u < g.num_nodes(); ++u) d.push_back(g.degree(u));
  return d;
}

}  // namespace

TEST(EdgeList, PathGraph) {
  const Graph g = parse("3 2\n0 1\n1 2");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_arcs(), 4u);
  EXPECT_EQ(degrees(g), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(EdgeList, SelfLoopDropped) {
  BuildStats s;
  const Graph g = parse("2 1\n0 0", &s);
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_EQ(s.self_loops_dropped, 1u);
}

TEST(EdgeList, TrianglePendantDegrees) {
  const Graph g = parse("4 4\n0 1\n0 2\n1 2\n0 3");
  EXPECT_EQ(degrees(g), (std::vector<std::size_t>{3, 2, 2, 1}));
}

TEST(EdgeList, DuplicatesCollapse) {
  BuildStats s;
  const Graph g = parse("3 3\n0 1\n1 0\n0 1", &s);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(s.duplicates_dropped, 2u);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("3 2\n0 1\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EdgeList, IdOutOfRange) { EXPECT_THROW(parse("3 1\n0 3\n"), RangeError); }

TEST(EdgeList, TooFewLines) { EXPECT_THROW(parse("3 2\n0 1\n"), ParseError); }

TEST(GraphInvariants, ConstructorRejectsAsymmetry) {
  EXPECT_THROW(Graph(2, {0, 1, 1}, {1}), InvalidArgument);
  EXPECT_THROW(Graph(1, {0, 1}, {0}), InvalidArgument);
  EXPECT_THROW(Graph(2, {0, 1, 2}, {1, 2}), RangeError);
  EXPECT_THROW(Graph(2, {0, 1, 2}, {1, 0}, std::vector<EdgeWeight>{1, 2}), InvalidArgument);
}

TEST(WeightedGraph, PathWeights) {
  const Graph w = build_weighted_graph(path_graph(3));
  EXPECT_EQ(w.edge_weight(0, 1), 1);
  EXPECT_EQ(w.edge_weight(1, 2), 1);
}

TEST(WeightedGraph, TrianglePendantWeights) {
  const Graph w = build_weighted_graph(triangle_pendant());
  EXPECT_EQ(w.edge_weight(0, 1), 1);
  EXPECT_EQ(w.edge_weight(0, 2), 1);
  EXPECT_EQ(w.edge_weight(1, 2), 2);
  EXPECT_EQ(w.edge_weight(0, 3), 2);
  EXPECT_EQ(w.edge_weight(3, 0), 2);
}

TEST(WeightedGraph, Path4Weights) {
  const Graph w = build_weighted_graph(path_graph(4));
  EXPECT_EQ(w.edge_weight(0, 1), 2);
  EXPECT_EQ(w.edge_weight(1, 2), 1);
  EXPECT_EQ(w.edge_weight(2, 3), 2);
}

TEST(WeightedGraph, RegularGraphAllOnes) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < 7; ++i) e.emplace_back(i, (i + 1) % 7);
  const Graph w = build_weighted_graph(Graph::from_edges(7, e));
  for (std::size_t a = 0; a < w.num_arcs(); ++a) EXPECT_EQ(w.arc_weight(a), 1);
}

TEST(WeightedGraph, EdgelessGraphUnchanged) {
  const Graph g = make_graph(3, {});
  const Graph w = build_weighted_graph(g);
  EXPECT_EQ(w, g);
}

TEST(WeightedGraph, MinimumIsOneOnEveryMaxDegreeSumEdge) {
  for (Seed s = 0; s < 30; ++s) {
    const Graph g = random_graph(15, 0.25, s);
    if (g.num_edges() == 0) continue;
    const Graph w = build_weighted_graph(g);
    std::size_t dmax = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
      for (NodeId v : g.neighbors(u)) dmax = std::max(dmax, g.degree(u) + g.degree(v));
    EdgeWeight lo = std::numeric_limits<EdgeWeight>::max();
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
      for (NodeId v : g.neighbors(u)) {
        const EdgeWeight we = *w.edge_weight(u, v);
        lo = std::min(lo, we);
        if (g.degree(u) + g.degree(v) == dmax) { EXPECT_EQ(we, 1); }
        EXPECT_GE(we, 1);
      }
    }
    EXPECT_EQ(lo, 1);
  }
}

TEST(Normalize, IsolatedNode) {
  const auto a = normalize_adjacency(make_graph(1, {}));
  EXPECT_EQ(a.nnz(), 1u);
  EXPECT_DOUBLE_EQ(a.entry(0, 0), 1.0);
}

TEST(Normalize, SingleEdge) {
  const auto a = normalize_adjacency(make_graph(2, {{0, 1}}));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(a.entry(i, j), 0.5);
}

TEST(Normalize, PathEntry) {
  const auto a = normalize_adjacency(path_graph(3));
  EXPECT_NEAR(a.entry(0, 1), 1.0 / std::sqrt(6.0), 1e-15);
  EXPECT_NEAR(a.entry(0, 1), 0.40825, 1e-5);
  EXPECT_EQ(a.entry(0, 2), 0.0);
}

TEST(Normalize, RowIdentitySymmetryAndRange) {
  for (Seed s = 0; s < 20; ++s) {
    const Graph g = random_graph(20, 0.2, s);
    const auto a = normalize_adjacency(g);
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      const double di = static_cast<double>(g.degree(static_cast<NodeId>(i)) + 1);
      double row = 0.0;
      auto cols = a.row_cols(i);
      auto vals = a.row_values(i);
      EXPECT_TRUE(std::is_sorted(cols.begin(), cols.end()));
      for (std::size_t e = 0; e < cols.size(); ++e) {
        const double dj = static_cast<double>(g.degree(cols[e]) + 1);
        row += vals[e] * std::sqrt(dj / di);
        EXPECT_GT(vals[e], 0.0);
        EXPECT_LE(vals[e], 1.0);
        EXPECT_EQ(vals[e], a.entry(cols[e], i));
      }
      EXPECT_NEAR(row, 1.0, 1e-12);
      EXPECT_GT(a.entry(i, i), 0.0);
    }
  }
}

TEST(Induce, TriangleFromPendantGraph) {
  const std::vector<NodeId> nodes{0, 1, 2};
  const auto sub = induce_subgraph(triangle_pendant(), nodes);
  EXPECT_EQ(sub.graph.num_nodes(), 3u);
  EXPECT_EQ(sub.graph.num_edges(), 3u);
}

TEST(Induce, PendantAlone) {
  const std::vector<NodeId> nodes{3};
  const auto sub = induce_subgraph(triangle_pendant(), nodes);
  EXPECT_EQ(sub.graph.num_nodes(), 1u);
  EXPECT_EQ(sub.graph.num_edges(), 0u);
  EXPECT_EQ(sub.local_to_global, std::vector<NodeId>{3});
}

TEST(Induce, PathEndpoints) {
  const std::vector<NodeId> nodes{2, 0};
  const auto sub = induce_subgraph(path_graph(3), nodes);
  EXPECT_EQ(sub.graph.num_nodes(), 2u);
  EXPECT_EQ(sub.graph.num_edges(), 0u);
  EXPECT_EQ(sub.local_of(2), NodeId{1});
  EXPECT_FALSE(sub.local_of(1).has_value());
}

TEST(Induce, EmptySetRejected) {
  EXPECT_THROW(induce_subgraph(path_graph(3), std::vector<NodeId>{}), InvalidArgument);
}

TEST(Induce, PreservesWeights) {
  const Graph w = build_weighted_graph(triangle_pendant());
  const std::vector<NodeId> nodes{0, 3};
  const auto sub = induce_subgraph(w, nodes);
  EXPECT_EQ(sub.graph.edge_weight(0, 1), 2);
}

TEST(Induce, ReassemblyReproducesIntraPartitionEdges) {
  for (Seed s = 0; s < 10; ++s) {
    const Graph g = random_graph(25, 0.2, s);
    Rng rng(s);
    std::vector<DeviceId> a(g.num_nodes());
    for (auto& d : a) d = static_cast<DeviceId>(rng.below(3));
    a[0] = 0, a[1] = 1, a[2] = 2;
    const Partition p = Partition::from_assignment(3, a);
    std::set<std::pair<NodeId, NodeId>> rebuilt;
    for (DeviceId d = 0; d < 3; ++d) {
      const auto sub = induce_subgraph(g, p.nodes_of(d));
      for (NodeId u = 0; u < sub.graph.num_nodes(); ++u)
        for (NodeId v : sub.graph.neighbors(u)) rebuilt.emplace(sub.local_to_global[u], sub.local_to_global[v]);
    }
    std::set<std::pair<NodeId, NodeId>> expected;
    for (NodeId u = 0; u < g.num_nodes(); ++u)
      for (NodeId v : g.neighbors(u))
        if (a[u] == a[v]) expected.emplace(u, v);
    EXPECT_EQ(rebuilt, expected);
  }
}

TEST(BlockError, AlignedWithComponentsIsZero) {
  const Graph g = make_graph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  const std::vector<DeviceId> a{0, 0, 0, 1, 1, 1};
  EXPECT_EQ(block_diagonal_error(g, Partition::from_assignment(2, a)), 0.0);
}

TEST(BlockError, SingleDeviceIsZero) {
  const Graph g = random_graph(12, 0.3, 4);
  EXPECT_EQ(block_diagonal_error(g, Partition::from_assignment(1, std::vector<DeviceId>(12, 0))), 0.0);
}

TEST(BlockError, PathCutEntry) {
  const std::vector<DeviceId> a{0, 0, 1};
  const double eps = block_diagonal_error(path_graph(3), Partition::from_assignment(2, a));
  EXPECT_NEAR(eps, 1.0 / std::sqrt(6.0), 1e-15);
}

TEST(BlockError, GeneratorAveragesRuns) {
  // Alternating between cutting (1,2) and not: the averaged entry is half.
  const Graph g = path_graph(3);
  int calls = 0;
  auto gen = [&](Seed) {
    const std::vector<DeviceId> cut{0, 0, 1}, whole{0, 0, 0};
    return calls++ % 2 ? Partition::from_assignment(1, whole) : Partition::from_assignment(2, cut);
  };
  EXPECT_NEAR(block_diagonal_error(g, gen, 2, 0), 0.5 / std::sqrt(6.0), 1e-15);
}

TEST(BlockError, MonotoneInCutSet) {
  // Every pair of 2-partitions of a small graph whose cut sets are nested.
  const Graph g = random_graph(8, 0.4, 11);
  std::vector<std::pair<std::set<std::pair<NodeId, NodeId>>, double>> all;
  for (unsigned mask = 0; mask < 256; ++mask) {
    std::vector<DeviceId> a(8);
    for (int i = 0; i < 8; ++i) a[i] = (mask >> i) & 1u;
    std::set<std::pair<NodeId, NodeId>> cut;
    for (NodeId u = 0; u < 8; ++u)
      for (NodeId v : g.neighbors(u))
        if (u < v && a[u] != a[v]) cut.emplace(u, v);
    const std::size_t k = mask == 0 || mask == 255 ? 1 : 2;
    if (k == 1) std::fill(a.begin(), a.end(), 0);
    all.emplace_back(cut, block_diagonal_error(g, Partition::from_assignment(k, a)));
  }
  for (const auto& [s1, e1] : all) {
    for (const auto& [s2, e2] : all) {
      if (std::includes(s2.begin(), s2.end(), s1.begin(), s1.end())) { EXPECT_LE(e1, e2); }
    }
  }
}

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

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/graph.hpp"
#include "sugar/partition.hpp"
#include "sugar/rng.hpp"

namespace sugar {

// Keeps the entries of `adj` whose endpoints share a device and drops the
// rest. This is the block-diagonal matrix of the normalized adjacency, not
// a re-normalization of each block.
inline NormalizedAdjacency restrict_to_blocks(const NormalizedAdjacency& adj, const Partition& p) {
  if (p.num_nodes() != adj.num_nodes()) throw InvalidArgument("partition size differs from matrix size");
  std::vector<std::size_t> offsets(adj.num_nodes() + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> vals;
  cols.reserve(adj.nnz());
  vals.reserve(adj.nnz());
  for (std::size_t i = 0; i < adj.num_nodes(); ++i) {
    auto c = adj.row_cols(i);
    auto v = adj.row_values(i);
    for (std::size_t e = 0; e < c.size(); ++e) {
      if (c[e] == i || p.shares_device(static_cast<NodeId>(i), c[e])) {
        cols.push_back(c[e]);
        vals.push_back(v[e]);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return NormalizedAdjacency(adj.num_nodes(), std::move(offsets), std::move(cols), std::move(vals));
}

// Elementwise mean of the block restrictions of `adj` over several disjoint
// partitions. Keeps the sparsity pattern of `adj`.
inline NormalizedAdjacency average_block_restriction(const NormalizedAdjacency& adj,
                                                     const std::vector<Partition>& parts) {
  if (parts.empty()) throw InvalidArgument("need at least one partition");
  std::vector<std::size_t> same(adj.nnz(), 0);
  for (const auto& p : parts) {
    if (p.num_nodes() != adj.num_nodes()) throw InvalidArgument("partition size differs from matrix size");
    if (!p.is_disjoint()) throw InvalidArgument("the estimator uses disjoint partitions only");
    for (std::size_t i = 0; i < adj.num_nodes(); ++i) {
      const DeviceId di = p.device_of(static_cast<NodeId>(i));
      auto c = adj.row_cols(i);
      for (std::size_t e = 0; e < c.size(); ++e) {
        if (p.device_of(c[e]) == di) ++same[adj.row_offsets()[i] + e];
      }
    }
  }
  std::vector<double> vals = adj.values();
  const double m = static_cast<double>(parts.size());
  for (std::size_t e = 0; e < vals.size(); ++e) vals[e] *= static_cast<double>(same[e]) / m;
  return NormalizedAdjacency(adj.num_nodes(), adj.row_offsets(), adj.col_indices(), std::move(vals));
}

// max_{i,j} |approx_ij - exact_ij| where approx has a subset of exact's pattern.
inline double entrywise_error(const NormalizedAdjacency& exact, const NormalizedAdjacency& approx) {
  if (exact.num_nodes() != approx.num_nodes()) throw InvalidArgument("matrix sizes differ");
  double eps = 0.0;
  for (std::size_t i = 0; i < exact.num_nodes(); ++i) {
    auto c = exact.row_cols(i);
    auto v = exact.row_values(i);
    for (std::size_t e = 0; e < c.size(); ++e) {
      eps = std::max(eps, std::abs(v[e] - approx.entry(i, c[e])));
    }
  }
  return eps;
}

template <typename F>
concept PartitionGenerator = requires(F f, Seed s) {
  { f(s) } -> std::convertible_to<Partition>;
};

// Error of the M-run averaged block-diagonal approximation of the normalized
// adjacency. Run m draws its partition from generator(derive_seed(seed, m)).
template <PartitionGenerator Gen>
double block_diagonal_error(const Graph& g, Gen&& generator, std::size_t m_runs, Seed seed) {
  if (m_runs < 1) throw InvalidArgument("m_runs must be >= 1");
  const NormalizedAdjacency exact = normalize_adjacency(g);
  std::vector<Partition> parts;
  parts.reserve(m_runs);
  for (std::size_t m = 0; m < m_runs; ++m) parts.push_back(generator(derive_seed(seed, m)));
  return entrywise_error(exact, average_block_restriction(exact, parts));
}

// Single fixed partition (m_runs = 1).
inline double block_diagonal_error(const Graph& g, const Partition& p) {
  const NormalizedAdjacency exact = normalize_adjacency(g);
  return entrywise_error(exact, average_block_restriction(exact, {p}));
}

}  // namespace sugar

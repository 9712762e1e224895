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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/graph.hpp"
#include "sugar/io.hpp"
#include "sugar/matrix.hpp"
#include "sugar/rng.hpp"

namespace sugar {

struct SbmSpec {
  std::size_t blocks = 2;
  std::size_t nodes_per_block = 100;
  double p_in = 0.1;
  double p_out = 0.01;
  std::size_t feat_dim = 8;
  double noise = 1.0;
  Seed seed = 0;
};

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  LabelVector labels;
  std::vector<Split> masks;
};

namespace detail {

// Calls emit(t) for each index t in [0, count) independently with
// probability p, using geometric gaps so the cost is O(expected hits).
template <typename Emit>
void bernoulli_indices(std::uint64_t count, double p, Rng& rng, Emit&& emit) {
  if (p <= 0.0 || count == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < count; ++t) emit(t);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t t = 0;
  for (;;) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    const double gap = std::floor(std::log(u) / log_q);
    if (gap >= static_cast<double>(count - t)) return;
    t += static_cast<std::uint64_t>(gap);
    emit(t);
    if (++t >= count) return;
  }
}

// Inverse of the row-major strict upper triangle index for an n x n matrix.
inline std::pair<std::uint64_t, std::uint64_t> triangle_pair(std::uint64_t t, std::uint64_t n) {
  // Row i starts at i*n - i*(i+1)/2.
  auto start = [n](std::uint64_t i) { return i * n - i * (i + 1) / 2; };
  const double nd = static_cast<double>(n);
  auto i = static_cast<std::uint64_t>(
      std::floor(((2.0 * nd - 1.0) - std::sqrt((2.0 * nd - 1.0) * (2.0 * nd - 1.0) - 8.0 * static_cast<double>(t))) /
                 2.0));
  while (i > 0 && start(i) > t) --i;
  while (start(i + 1) <= t) ++i;
  const std::uint64_t j = t - start(i) + i + 1;
  return {i, j};
}

}  // namespace detail

// Stochastic block model: block id is the class label, features are
// onehot(block) (block mod feat_dim when feat_dim < blocks) plus N(0, noise^2)
// noise, and nodes are split 60/20/20 into train/val/test at random.
inline Dataset generate_sbm(const SbmSpec& s) {
  if (s.blocks < 1 || s.nodes_per_block < 1) throw InvalidArgument("SBM needs >= 1 block of >= 1 node");
  if (s.feat_dim < 1) throw InvalidArgument("feature dimension must be >= 1");
  if (s.p_in < 0 || s.p_in > 1 || s.p_out < 0 || s.p_out > 1) throw InvalidArgument("probabilities must be in [0,1]");
  const std::size_t n = s.blocks * s.nodes_per_block;
  Rng rng(derive_seed(s.seed, 1));

  std::vector<std::pair<NodeId, NodeId>> edges;
  const std::uint64_t nb = s.nodes_per_block;
  for (std::size_t a = 0; a < s.blocks; ++a) {
    const auto base_a = static_cast<NodeId>(a * nb);
    detail::bernoulli_indices(nb * (nb - 1) / 2, s.p_in, rng, [&](std::uint64_t t) {
      auto [i, j] = detail::triangle_pair(t, nb);
      edges.emplace_back(base_a + static_cast<NodeId>(i), base_a + static_cast<NodeId>(j));
    });
    for (std::size_t b = a + 1; b < s.blocks; ++b) {
      const auto base_b = static_cast<NodeId>(b * nb);
      detail::bernoulli_indices(nb * nb, s.p_out, rng, [&](std::uint64_t t) {
        edges.emplace_back(base_a + static_cast<NodeId>(t / nb), base_b + static_cast<NodeId>(t % nb));
      });
    }
  }

  Dataset d;
  d.graph = Graph::from_edges(n, edges);
  d.labels.num_classes = static_cast<int>(s.blocks);
  d.labels.labels.resize(n);
  d.features = FeatureMatrix(n, s.feat_dim);
  Rng feat_rng(derive_seed(s.seed, 2));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t block = i / nb;
    d.labels.labels[i] = static_cast<int>(block);
    for (std::size_t f = 0; f < s.feat_dim; ++f) {
      d.features(i, f) = (f == block % s.feat_dim ? 1.0 : 0.0) + s.noise * feat_rng.normal();
    }
  }

  Rng split_rng(derive_seed(s.seed, 3));
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[split_rng.below(i)]);
  d.masks.assign(n, Split::kTrain);
  const std::size_t n_train = (n * 6) / 10, n_val = (n * 2) / 10;
  for (std::size_t r = 0; r < n; ++r) {
    d.masks[perm[r]] = r < n_train ? Split::kTrain : (r < n_train + n_val ? Split::kVal : Split::kTest);
  }
  return d;
}

// Erdos-Renyi core of `core_nodes` nodes with the given mean degree, plus
// `pendants` degree-1 nodes each attached to a uniformly chosen core node.
inline Graph generate_pendant_graph(std::size_t core_nodes, double core_avg_degree, std::size_t pendants, Seed seed) {
  if (core_nodes < 2) throw InvalidArgument("core needs at least two nodes");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  const double p = core_avg_degree / static_cast<double>(core_nodes - 1);
  const std::uint64_t cn = core_nodes;
  detail::bernoulli_indices(cn * (cn - 1) / 2, p, rng, [&](std::uint64_t t) {
    auto [i, j] = detail::triangle_pair(t, cn);
    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  });
  for (std::size_t q = 0; q < pendants; ++q) {
    edges.emplace_back(static_cast<NodeId>(core_nodes + q), static_cast<NodeId>(rng.below(core_nodes)));
  }
  return Graph::from_edges(core_nodes + pendants, edges);
}

}  // namespace sugar

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

// Small graphs and independent oracles shared by the unit and acceptance
// tests: brute-force partition enumeration and central finite differences.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include "sugar.hpp"

namespace sugar::testing {

inline Graph make_graph(std::size_t n, std::initializer_list<std::pair<NodeId, NodeId>> edges) {
  std::vector<std::pair<NodeId, NodeId>> e(edges);
  return Graph::from_edges(n, e);
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

// Triangle {0,1,2} with pendant 3 attached to 0.
inline Graph triangle_pendant() { return make_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}}); }

inline Graph random_graph(std::size_t n, double p, Seed seed) {
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) e.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, e);
}

inline Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.values()) v = scale * rng.uniform(-1.0, 1.0);
  return m;
}

inline LabelVector random_labels(std::size_t n, int classes, Rng& rng) {
  LabelVector y;
  y.num_classes = classes;
  for (std::size_t i = 0; i < n; ++i) y.labels.push_back(static_cast<int>(rng.below(classes)));
  return y;
}

// Dense-matrix weighted cut straight from the edge list.
inline EdgeWeight brute_weighted_cut(const Graph& g, const std::vector<DeviceId>& a) {
  EdgeWeight cut = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v && a[u] != a[v]) cut += g.edge_weight(u, v).value_or(1);
    }
  }
  return cut;
}

// Minimum weighted cut over all 2-partitions with both sides non-empty and
// at most `max_size` nodes.
inline EdgeWeight brute_force_bisection(const Graph& g, std::size_t max_size) {
  const std::size_t n = g.num_nodes();
  EdgeWeight best = std::numeric_limits<EdgeWeight>::max();
  std::vector<DeviceId> a(n);
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) ones += (a[i] = (mask >> i) & 1u);
    if (ones > max_size || n - ones > max_size) continue;
    best = std::min(best, brute_weighted_cut(g, a));
  }
  return best;
}

inline double loss_of(const NormalizedAdjacency& adj, const FeatureMatrix& x, const LabelVector& y,
                      const std::vector<double>& w, const GcnModel& m) {
  return loss(forward(adj, x, m).logits(), y, w);
}

// Central differences of loss(forward(.)) in every weight entry.
inline GradientSet finite_difference_gradient(const NormalizedAdjacency& adj, const FeatureMatrix& x,
                                              const LabelVector& y, const std::vector<double>& w, GcnModel m,
                                              double h = 1e-5) {
  GradientSet g;
  for (std::size_t l = 0; l < m.weights.size(); ++l) {
    Matrix d(m.weights[l].rows(), m.weights[l].cols());
    for (std::size_t e = 0; e < d.size(); ++e) {
      double& p = m.weights[l].values()[e];
      const double orig = p;
      p = orig + h;
      const double up = loss_of(adj, x, y, w, m);
      p = orig - h;
      const double down = loss_of(adj, x, y, w, m);
      p = orig;
      d.values()[e] = (up - down) / (2.0 * h);
    }
    g.grads.push_back(std::move(d));
  }
  return g;
}

// max over entries of |a - b| / max(|a|, |b|), entries where both are below
// `floor` in magnitude compared absolutely against `floor`.
inline double max_relative_error(const GradientSet& a, const GradientSet& b, double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.grads.size(); ++l) {
    auto av = a.grads[l].values();
    auto bv = b.grads[l].values();
    for (std::size_t e = 0; e < av.size(); ++e) {
      const double scale = std::max({std::abs(av[e]), std::abs(bv[e]), floor});
      worst = std::max(worst, std::abs(av[e] - bv[e]) / scale);
    }
  }
  return worst;
}

// Smallest |Z| over hidden pre-activations; finite differences straddle the
// ReLU kink when this is below the step.
inline double min_hidden_preactivation(const ForwardTrace& t) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < t.pre.size(); ++l) {
    for (double v : t.pre[l].values()) m = std::min(m, std::abs(v));
  }
  return m;
}

}  // namespace sugar::testing

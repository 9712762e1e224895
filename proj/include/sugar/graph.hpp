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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/matrix.hpp"

namespace sugar {

using NodeId = std::uint32_t;
using EdgeWeight = std::int64_t;

// Undirected simple graph in CSR form. Every edge {u, v} is stored as the two
// arcs u->v and v->u; neighbor lists are sorted ascending. Optional integer
// weights are aligned with the column array.
class Graph {
 public:
  Graph() = default;

  // Takes ownership of raw CSR arrays and validates every structural invariant.
  Graph(std::size_t num_nodes, std::vector<std::size_t> row_offsets, std::vector<NodeId> col_indices,
        std::optional<std::vector<EdgeWeight>> edge_weights = std::nullopt)
      : num_nodes_(num_nodes),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        edge_weights_(std::move(edge_weights)) {
    validate();
  }

  struct BuildStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
  };

  // Builds from an undirected edge list. Self-loops are dropped and
  // duplicates (in either orientation) collapse to one edge.
  static Graph from_edges(std::size_t num_nodes, std::span<const std::pair<NodeId, NodeId>> edges,
                          BuildStats* stats = nullptr) {
    BuildStats local;
    std::vector<std::pair<NodeId, NodeId>> arcs;
    arcs.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u >= num_nodes || v >= num_nodes) {
        throw RangeError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                         ") references a node >= " + std::to_string(num_nodes));
      }
      if (u == v) {
        ++local.self_loops_dropped;
        continue;
      }
      arcs.emplace_back(u, v);
      arcs.emplace_back(v, u);
    }
    std::sort(arcs.begin(), arcs.end());
    const std::size_t before = arcs.size();
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    local.duplicates_dropped = (before - arcs.size()) / 2;

    std::vector<std::size_t> offsets(num_nodes + 1, 0);
    std::vector<NodeId> cols;
    cols.reserve(arcs.size());
    for (auto [u, v] : arcs) {
      ++offsets[u + 1];
      cols.push_back(v);
    }
    for (std::size_t i = 0; i < num_nodes; ++i) offsets[i + 1] += offsets[i];
    if (stats) *stats = local;
    return Graph(num_nodes, std::move(offsets), std::move(cols));
  }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_arcs() const noexcept { return col_indices_.size(); }
  std::size_t num_edges() const noexcept { return col_indices_.size() / 2; }
  bool has_weights() const noexcept { return edge_weights_.has_value(); }

  std::size_t degree(NodeId u) const { return row_offsets_[u + 1] - row_offsets_[u]; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {col_indices_.data() + row_offsets_[u], degree(u)};
  }

  // Arcs of u occupy [arc_begin(u), arc_begin(u) + degree(u)).
  std::size_t arc_begin(NodeId u) const { return row_offsets_[u]; }

  // Weight of the arc at a CSR position; 1 when the graph is unweighted.
  EdgeWeight arc_weight(std::size_t arc) const {
    return edge_weights_ ? (*edge_weights_)[arc] : EdgeWeight{1};
  }

  // Weight of arc (u, v), or nullopt if the edge is absent.
  std::optional<EdgeWeight> edge_weight(NodeId u, NodeId v) const {
    auto nbrs = neighbors(u);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
    if (it == nbrs.end() || *it != v) return std::nullopt;
    if (!edge_weights_) return EdgeWeight{1};
    return (*edge_weights_)[row_offsets_[u] + static_cast<std::size_t>(it - nbrs.begin())];
  }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<NodeId>& col_indices() const noexcept { return col_indices_; }
  const std::optional<std::vector<EdgeWeight>>& edge_weights() const noexcept { return edge_weights_; }

  Graph with_weights(std::vector<EdgeWeight> w) const {
    return Graph(num_nodes_, row_offsets_, col_indices_, std::move(w));
  }
  Graph without_weights() const { return Graph(num_nodes_, row_offsets_, col_indices_); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.row_offsets_ == b.row_offsets_ &&
           a.col_indices_ == b.col_indices_ && a.edge_weights_ == b.edge_weights_;
  }

 private:
  void validate() const {
    if (row_offsets_.size() != num_nodes_ + 1 || row_offsets_.front() != 0 ||
        row_offsets_.back() != col_indices_.size()) {
      throw InvalidArgument("CSR row offsets do not match node/arc counts");
    }
    if (edge_weights_ && edge_weights_->size() != col_indices_.size()) {
      throw InvalidArgument("edge weight array length differs from arc count");
    }
    for (std::size_t u = 0; u < num_nodes_; ++u) {
      if (row_offsets_[u] > row_offsets_[u + 1]) throw InvalidArgument("CSR row offsets decrease");
      for (std::size_t e = row_offsets_[u]; e < row_offsets_[u + 1]; ++e) {
        const NodeId v = col_indices_[e];
        if (v >= num_nodes_) throw RangeError("column index out of range");
        if (v == u) throw InvalidArgument("self-loop stored in graph");
        if (e > row_offsets_[u] && col_indices_[e - 1] >= v) {
          throw InvalidArgument("neighbor list not strictly ascending");
        }
        if (edge_weights_ && (*edge_weights_)[e] < 0) throw InvalidArgument("negative edge weight");
      }
    }
    for (std::size_t u = 0; u < num_nodes_; ++u) {
      for (std::size_t e = row_offsets_[u]; e < row_offsets_[u + 1]; ++e) {
        const NodeId v = col_indices_[e];
        auto back = edge_weight(v, static_cast<NodeId>(u));
        if (!back) throw InvalidArgument("graph is not symmetric");
        if (edge_weights_ && *back != (*edge_weights_)[e]) {
          throw InvalidArgument("asymmetric edge weights");
        }
      }
    }
  }

  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::optional<std::vector<EdgeWeight>> edge_weights_;
};

// Class id per node.
struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }

  void validate() const {
    if (num_classes < 1) throw InvalidArgument("label vector needs at least one class");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= num_classes) {
        throw RangeError("label " + std::to_string(labels[i]) + " of node " + std::to_string(i) +
                         " outside [0, " + std::to_string(num_classes) + ")");
      }
    }
  }
};

// D^-1/2 (A + I) D^-1/2 in CSR form, diagonal included, columns ascending.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;
  NormalizedAdjacency(std::size_t n, std::vector<std::size_t> row_offsets, std::vector<NodeId> cols,
                      std::vector<double> values)
      : n_(n), row_offsets_(std::move(row_offsets)), cols_(std::move(cols)), values_(std::move(values)) {}

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const NodeId> row_cols(std::size_t i) const {
    return {cols_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<double> row_values(std::size_t i) {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  double entry(std::size_t i, std::size_t j) const {
    auto c = row_cols(i);
    auto it = std::lower_bound(c.begin(), c.end(), static_cast<NodeId>(j));
    if (it == c.end() || *it != j) return 0.0;
    return values_[row_offsets_[i] + static_cast<std::size_t>(it - c.begin())];
  }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<NodeId>& col_indices() const noexcept { return cols_; }
  const std::vector<double>& values() const noexcept { return values_; }

  // Y = this * X (sparse times dense, CSR order).
  Matrix multiply(const Matrix& x) const {
    if (x.rows() != n_) throw InvalidArgument("adjacency/feature row count mismatch");
    Matrix y(n_, x.cols());
    for (std::size_t i = 0; i < n_; ++i) {
      auto out = y.row(i);
      for (std::size_t e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) {
        const double a = values_[e];
        auto xrow = x.row(cols_[e]);
        for (std::size_t f = 0; f < out.size(); ++f) out[f] += a * xrow[f];
      }
    }
    return y;
  }

  Matrix to_dense() const {
    Matrix d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) d(i, cols_[e]) = values_[e];
    }
    return d;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<double> values_;
};

// Degree-based edge weights: w(u,v) = d_max + 1 - deg(u) - deg(v), with
// d_max the largest deg(u) + deg(v) over all edges. Edges touching low-degree
// nodes get the largest weights. A graph without edges is returned as is.
inline Graph build_weighted_graph(const Graph& g) {
  if (g.num_edges() == 0) return g.without_weights();
  std::size_t d_max = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) d_max = std::max(d_max, g.degree(u) + g.degree(v));
  }
  std::vector<EdgeWeight> w;
  w.reserve(g.num_arcs());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      w.push_back(static_cast<EdgeWeight>(d_max + 1) - static_cast<EdgeWeight>(g.degree(u)) -
                  static_cast<EdgeWeight>(g.degree(v)));
    }
  }
  return g.with_weights(std::move(w));
}

// Symmetric GCN normalization of A + I. Edge weights are ignored.
inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));

  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<NodeId> cols;
  std::vector<double> vals;
  cols.reserve(g.num_arcs() + n);
  vals.reserve(g.num_arcs() + n);
  for (NodeId i = 0; i < n; ++i) {
    bool diag_done = false;
    for (NodeId j : g.neighbors(i)) {
      if (!diag_done && j > i) {
        cols.push_back(i);
        vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
        diag_done = true;
      }
      cols.push_back(j);
      vals.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!diag_done) {
      cols.push_back(i);
      vals.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    offsets[i + 1] = cols.size();
  }
  return NormalizedAdjacency(n, std::move(offsets), std::move(cols), std::move(vals));
}

// Subgraph on a node subset with its local<->global id mapping. Local ids
// follow ascending global id.
struct InducedSubgraph {
  Graph graph;
  std::vector<NodeId> local_to_global;

  std::optional<NodeId> local_of(NodeId global) const {
    auto it = std::lower_bound(local_to_global.begin(), local_to_global.end(), global);
    if (it == local_to_global.end() || *it != global) return std::nullopt;
    return static_cast<NodeId>(it - local_to_global.begin());
  }
};

inline InducedSubgraph induce_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw InvalidArgument("cannot induce a subgraph on an empty node set");
  std::vector<NodeId> keep(nodes.begin(), nodes.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.back() >= g.num_nodes()) throw RangeError("subgraph node id out of range");

  constexpr NodeId kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> to_local(g.num_nodes(), kAbsent);
  for (std::size_t i = 0; i < keep.size(); ++i) to_local[keep[i]] = static_cast<NodeId>(i);

  std::vector<std::size_t> offsets(keep.size() + 1, 0);
  std::vector<NodeId> cols;
  std::vector<EdgeWeight> w;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    auto nbrs = g.neighbors(keep[i]);
    const std::size_t base = g.arc_begin(keep[i]);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      const NodeId l = to_local[nbrs[e]];
      if (l == kAbsent) continue;
      cols.push_back(l);
      if (g.has_weights()) w.push_back(g.arc_weight(base + e));
    }
    offsets[i + 1] = cols.size();
  }
  std::optional<std::vector<EdgeWeight>> weights;
  if (g.has_weights()) weights = std::move(w);
  return {Graph(keep.size(), std::move(offsets), std::move(cols), std::move(weights)), std::move(keep)};
}

}  // namespace sugar

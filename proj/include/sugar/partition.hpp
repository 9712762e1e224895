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
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/graph.hpp"

namespace sugar {

using DeviceId = std::uint32_t;

// Assignment of nodes to devices. A node may live on several devices after
// subgraph expansion; `devices_of(i)` is the set P_i, `nodes_of(k)` is V_k.
// Both views are kept sorted and consistent.
class Partition {
 public:
  Partition() = default;

  // Disjoint partition from a per-node device id.
  static Partition from_assignment(std::size_t k, std::span<const DeviceId> assignment) {
    Partition p;
    p.k_ = k;
    p.membership_.resize(assignment.size());
    p.node_sets_.resize(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] >= k) throw RangeError("device id " + std::to_string(assignment[i]) + " >= k");
      p.membership_[i] = {assignment[i]};
      p.node_sets_[assignment[i]].push_back(static_cast<NodeId>(i));
    }
    return p;
  }

  // General (possibly overlapping) partition from per-node device lists.
  static Partition from_membership(std::size_t k, std::vector<std::vector<DeviceId>> membership) {
    Partition p;
    p.k_ = k;
    p.node_sets_.resize(k);
    for (std::size_t i = 0; i < membership.size(); ++i) {
      auto& m = membership[i];
      if (m.empty()) throw InvalidArgument("node " + std::to_string(i) + " is assigned to no device");
      std::sort(m.begin(), m.end());
      m.erase(std::unique(m.begin(), m.end()), m.end());
      for (DeviceId d : m) {
        if (d >= k) throw RangeError("device id " + std::to_string(d) + " >= k");
        p.node_sets_[d].push_back(static_cast<NodeId>(i));
      }
    }
    p.membership_ = std::move(membership);
    return p;
  }

  std::size_t k() const noexcept { return k_; }
  std::size_t num_nodes() const noexcept { return membership_.size(); }

  std::span<const DeviceId> devices_of(NodeId i) const { return membership_[i]; }
  std::span<const NodeId> nodes_of(DeviceId d) const { return node_sets_[d]; }
  std::size_t multiplicity(NodeId i) const { return membership_[i].size(); }

  bool is_disjoint() const {
    return std::ranges::all_of(membership_, [](const auto& m) { return m.size() == 1; });
  }

  // Owning device of a node in a disjoint partition.
  DeviceId device_of(NodeId i) const {
    if (membership_[i].size() != 1) throw InvalidArgument("node has multiple owners");
    return membership_[i].front();
  }

  bool shares_device(NodeId i, NodeId j) const {
    const auto& a = membership_[i];
    const auto& b = membership_[j];
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
      if (a[x] == b[y]) return true;
      a[x] < b[y] ? ++x : ++y;
    }
    return false;
  }

  // Adds node i to device d; no-op if already present.
  void add(NodeId i, DeviceId d) {
    if (d >= k_) throw RangeError("device id out of range");
    auto& m = membership_[i];
    auto it = std::lower_bound(m.begin(), m.end(), d);
    if (it != m.end() && *it == d) return;
    m.insert(it, d);
    auto& s = node_sets_[d];
    s.insert(std::lower_bound(s.begin(), s.end(), i), i);
  }

  // Checks cover of [0, num_nodes) and mutual consistency of both views.
  void validate(std::size_t num_nodes) const {
    if (membership_.size() != num_nodes) throw InvalidArgument("partition size differs from graph size");
    std::size_t total = 0;
    for (std::size_t i = 0; i < num_nodes; ++i) {
      if (membership_[i].empty()) throw InvalidArgument("node " + std::to_string(i) + " not covered");
      total += membership_[i].size();
    }
    std::size_t listed = 0;
    for (std::size_t d = 0; d < k_; ++d) {
      for (NodeId i : node_sets_[d]) {
        if (i >= num_nodes || !std::ranges::binary_search(membership_[i], static_cast<DeviceId>(d))) {
          throw InvalidArgument("partition views are inconsistent");
        }
      }
      listed += node_sets_[d].size();
    }
    if (listed != total) throw InvalidArgument("partition views are inconsistent");
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::vector<DeviceId>> membership_;
  std::vector<std::vector<NodeId>> node_sets_;
};

// Per-device byte limits.
struct MemoryBudget {
  std::vector<std::size_t> limits;
  std::size_t bytes_per_real = 8;
  std::size_t bytes_per_index = 8;

  // A single limit applies to every device.
  std::size_t limit(DeviceId d) const {
    if (limits.empty()) throw InvalidArgument("memory budget has no limits");
    return limits.size() == 1 ? limits.front() : limits.at(d);
  }

  void validate(std::size_t k) const {
    if (limits.empty()) throw InvalidArgument("memory budget has no limits");
    if (limits.size() != 1 && limits.size() != k) {
      throw InvalidArgument("expected 1 or " + std::to_string(k) + " budget values");
    }
    for (auto l : limits) {
      if (l == 0) throw InvalidArgument("memory budget limits must be positive");
    }
  }
};

// Layer widths [F_0, ..., F_L] of the model that will be trained.
struct CostModel {
  std::vector<std::size_t> layer_dims;

  std::size_t num_layers() const noexcept { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }

  void validate() const {
    if (layer_dims.size() < 2) throw InvalidArgument("cost model needs at least two layer widths");
    for (auto d : layer_dims) {
      if (d == 0) throw InvalidArgument("layer widths must be >= 1");
    }
  }
};

// Static training-memory model H(SG): per layer the N*F_{l+1} activation and
// F_l*F_{l+1} weight terms, plus the normalized adjacency (row offsets and
// column indices as indices, values as reals; self-loops included).
inline std::size_t memory_estimate(std::size_t num_nodes, std::size_t num_arcs, const CostModel& cost,
                                   const MemoryBudget& budget) {
  std::size_t reals = 0;
  for (std::size_t l = 0; l + 1 < cost.layer_dims.size(); ++l) {
    reals += num_nodes * cost.layer_dims[l + 1] + cost.layer_dims[l] * cost.layer_dims[l + 1];
  }
  const std::size_t nnz = num_arcs + num_nodes;
  return reals * budget.bytes_per_real + (num_nodes + 1 + nnz) * budget.bytes_per_index +
         nnz * budget.bytes_per_real;
}

inline std::size_t memory_estimate(const Graph& sub, const CostModel& cost, const MemoryBudget& budget) {
  return memory_estimate(sub.num_nodes(), sub.num_arcs(), cost, budget);
}

struct CutMetrics {
  std::size_t edge_cut = 0;
  EdgeWeight weighted_cut = 0;
  double balance = 0.0;
};

inline CutMetrics cut_metrics(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) throw InvalidArgument("partition size differs from graph size");
  if (!p.is_disjoint()) throw InvalidArgument("cut metrics require a disjoint partition");
  CutMetrics m;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto nbrs = g.neighbors(u);
    const std::size_t base = g.arc_begin(u);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      if (nbrs[e] > u && p.device_of(u) != p.device_of(nbrs[e])) {
        ++m.edge_cut;
        m.weighted_cut += g.arc_weight(base + e);
      }
    }
  }
  std::size_t largest = 0;
  for (DeviceId d = 0; d < p.k(); ++d) largest = std::max(largest, p.nodes_of(d).size());
  m.balance = g.num_nodes() ? static_cast<double>(largest) * static_cast<double>(p.k()) /
                                  static_cast<double>(g.num_nodes())
                            : 0.0;
  return m;
}

// Budget-driven one-hop expansion of one device. When the device's current
// subgraph fits strictly under its budget, the outside neighbors of V_k are
// added in ascending global id until the next addition would exceed the
// budget. Only the one-hop frontier of the original V_k is considered.
inline Partition expand_subgraph(const Graph& g, const Partition& partition, DeviceId device,
                                 const CostModel& cost, const MemoryBudget& budget) {
  if (device >= partition.k()) throw RangeError("device id out of range");
  if (partition.num_nodes() != g.num_nodes()) throw InvalidArgument("partition does not cover graph");
  const std::size_t limit = budget.limit(device);

  std::vector<char> in_set(g.num_nodes(), 0);
  auto members = partition.nodes_of(device);
  for (NodeId i : members) in_set[i] = 1;

  std::size_t arcs = 0;
  std::vector<NodeId> frontier;
  for (NodeId u : members) {
    for (NodeId v : g.neighbors(u)) {
      if (in_set[v]) {
        ++arcs;
      } else {
        frontier.push_back(v);
      }
    }
  }
  std::size_t nodes = members.size();
  if (memory_estimate(nodes, arcs, cost, budget) >= limit) return partition;

  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

  Partition out = partition;
  for (NodeId v : frontier) {
    std::size_t added_arcs = 0;
    for (NodeId w : g.neighbors(v)) added_arcs += in_set[w] ? 2 : 0;
    if (memory_estimate(nodes + 1, arcs + added_arcs, cost, budget) > limit) break;
    in_set[v] = 1;
    ++nodes;
    arcs += added_arcs;
    out.add(v, device);
  }
  return out;
}

// Expands every device independently against the same base partition.
inline Partition expand_all(const Graph& g, const Partition& partition, const CostModel& cost,
                            const MemoryBudget& budget) {
  Partition out = partition;
  for (DeviceId d = 0; d < partition.k(); ++d) {
    Partition one = expand_subgraph(g, partition, d, cost, budget);
    for (NodeId v : one.nodes_of(d)) out.add(v, d);
  }
  return out;
}

}  // namespace sugar

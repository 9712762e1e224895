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

// Multilevel k-way edge-cut partitioning: heavy-edge-matching coarsening,
// greedy graph growing on the coarsest graph, and greedy boundary refinement
// with balance repair during uncoarsening. Balance is on node counts.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/graph.hpp"
#include "sugar/partition.hpp"
#include "sugar/rng.hpp"

namespace sugar {

struct PartitionOptions {
  double balance_tol = 0.05;
  Seed seed = 0;
  // Independent greedy-growing attempts on the coarsest graph; best cut wins.
  int initial_trials = 8;
};

// Largest node count any part may hold: ceil((1 + tol) * N / k).
inline std::size_t max_part_size(std::size_t num_nodes, std::size_t k, double balance_tol) {
  const double bound = (1.0 + balance_tol) * static_cast<double>(num_nodes) / static_cast<double>(k);
  auto m = static_cast<std::size_t>(std::ceil(bound - 1e-9));
  const std::size_t even = (num_nodes + k - 1) / k;
  return std::max(m, even);
}

namespace detail {

constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

struct WorkGraph {
  std::size_t n = 0;
  std::vector<std::size_t> xadj{0};
  std::vector<NodeId> adj;
  std::vector<EdgeWeight> adjw;
  std::vector<EdgeWeight> vwgt;

  static WorkGraph from(const Graph& g) {
    WorkGraph w;
    w.n = g.num_nodes();
    w.xadj = g.row_offsets();
    w.adj = g.col_indices();
    w.adjw.resize(g.num_arcs());
    for (std::size_t e = 0; e < g.num_arcs(); ++e) w.adjw[e] = g.arc_weight(e);
    w.vwgt.assign(w.n, 1);
    return w;
  }
};

struct Level {
  WorkGraph graph;
  std::vector<NodeId> cmap;  // fine node -> coarse node
};

inline std::vector<NodeId> random_permutation(std::size_t n, Rng& rng) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

// One round of heavy-edge matching and contraction.
inline Level coarsen_once(const WorkGraph& g, Rng& rng, EdgeWeight max_vwgt) {
  std::vector<NodeId> match(g.n, kNone);
  for (NodeId u : random_permutation(g.n, rng)) {
    if (match[u] != kNone) continue;
    NodeId best = kNone;
    EdgeWeight best_w = -1;
    for (std::size_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const NodeId v = g.adj[e];
      if (match[v] != kNone || g.vwgt[u] + g.vwgt[v] > max_vwgt) continue;
      if (g.adjw[e] > best_w || (g.adjw[e] == best_w && v < best)) {
        best = v;
        best_w = g.adjw[e];
      }
    }
    if (best == kNone) {
      match[u] = u;
    } else {
      match[u] = best;
      match[best] = u;
    }
  }

  Level lvl;
  lvl.cmap.assign(g.n, kNone);
  NodeId nc = 0;
  for (NodeId u = 0; u < g.n; ++u) {
    if (lvl.cmap[u] != kNone) continue;
    lvl.cmap[u] = nc;
    lvl.cmap[match[u]] = nc;
    ++nc;
  }

  WorkGraph& c = lvl.graph;
  c.n = nc;
  c.vwgt.assign(nc, 0);
  c.xadj.assign(nc + 1, 0);
  std::vector<std::size_t> slot(nc, std::numeric_limits<std::size_t>::max());
  std::vector<std::pair<NodeId, EdgeWeight>> row;
  NodeId next = 0;
  for (NodeId u = 0; u < g.n; ++u) {
    if (lvl.cmap[u] != next) continue;  // first member of each coarse node, in id order
    const NodeId cu = next++;
    row.clear();
    const NodeId members[2] = {u, match[u]};
    const int count = match[u] == u ? 1 : 2;
    for (int m = 0; m < count; ++m) {
      const NodeId x = members[m];
      c.vwgt[cu] += g.vwgt[x];
      for (std::size_t e = g.xadj[x]; e < g.xadj[x + 1]; ++e) {
        const NodeId cv = lvl.cmap[g.adj[e]];
        if (cv == cu) continue;
        if (slot[cv] == std::numeric_limits<std::size_t>::max()) {
          slot[cv] = row.size();
          row.emplace_back(cv, g.adjw[e]);
        } else {
          row[slot[cv]].second += g.adjw[e];
        }
      }
    }
    std::sort(row.begin(), row.end());
    for (auto [cv, w] : row) {
      slot[cv] = std::numeric_limits<std::size_t>::max();
      c.adj.push_back(cv);
      c.adjw.push_back(w);
    }
    c.xadj[cu + 1] = c.adj.size();
  }
  return lvl;
}

// Per-part bookkeeping shared by the growing, balancing and refinement steps.
struct PartState {
  std::vector<DeviceId> part;
  std::vector<EdgeWeight> weight;  // summed node weight per part
  std::vector<std::size_t> count;  // node count per part

  PartState(const WorkGraph& g, std::size_t k, std::vector<DeviceId> assignment)
      : part(std::move(assignment)), weight(k, 0), count(k, 0) {
    for (NodeId u = 0; u < g.n; ++u) {
      weight[part[u]] += g.vwgt[u];
      ++count[part[u]];
    }
  }

  void move(const WorkGraph& g, NodeId u, DeviceId to) {
    weight[part[u]] -= g.vwgt[u];
    --count[part[u]];
    weight[to] += g.vwgt[u];
    ++count[to];
    part[u] = to;
  }
};

inline EdgeWeight weighted_cut(const WorkGraph& g, const std::vector<DeviceId>& part) {
  EdgeWeight cut = 0;
  for (NodeId u = 0; u < g.n; ++u) {
    for (std::size_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      if (g.adj[e] > u && part[u] != part[g.adj[e]]) cut += g.adjw[e];
    }
  }
  return cut;
}

// Connectivity of u to every part it touches, reusing a dense scratch array.
class Connectivity {
 public:
  explicit Connectivity(std::size_t k) : conn_(k, 0) {}

  void compute(const WorkGraph& g, const std::vector<DeviceId>& part, NodeId u) {
    for (DeviceId p : touched_) conn_[p] = 0;
    touched_.clear();
    for (std::size_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const DeviceId p = part[g.adj[e]];
      if (conn_[p] == 0) touched_.push_back(p);
      conn_[p] += g.adjw[e];
    }
  }

  EdgeWeight to(DeviceId p) const { return conn_[p]; }
  bool is_boundary(DeviceId own) const {
    return std::ranges::any_of(touched_, [own](DeviceId p) { return p != own; });
  }

 private:
  std::vector<EdgeWeight> conn_;
  std::vector<DeviceId> touched_;
};

// Greedy graph growing: k random seeds, then the lightest part repeatedly
// absorbs its most strongly connected unassigned neighbor.
inline std::vector<DeviceId> grow_partition(const WorkGraph& g, std::size_t k, Rng& rng) {
  constexpr DeviceId kUnassigned = std::numeric_limits<DeviceId>::max();
  std::vector<DeviceId> part(g.n, kUnassigned);
  std::vector<EdgeWeight> pw(k, 0);
  // Frontier of each part ordered by (-connectivity, node id).
  std::vector<std::set<std::pair<EdgeWeight, NodeId>>> frontier(k);
  std::vector<std::unordered_map<NodeId, EdgeWeight>> conn(k);

  const std::vector<NodeId> order = random_permutation(g.n, rng);
  std::size_t order_pos = 0;
  std::size_t assigned = 0;

  auto assign = [&](NodeId u, DeviceId p) {
    part[u] = p;
    pw[p] += g.vwgt[u];
    ++assigned;
    for (DeviceId q = 0; q < k; ++q) {
      auto it = conn[q].find(u);
      if (it != conn[q].end()) {
        frontier[q].erase({-it->second, u});
        conn[q].erase(it);
      }
    }
    for (std::size_t e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const NodeId v = g.adj[e];
      if (part[v] != kUnassigned) continue;
      EdgeWeight& c = conn[p][v];
      if (c != 0) frontier[p].erase({-c, v});
      c += g.adjw[e];
      frontier[p].insert({-c, v});
    }
  };

  for (DeviceId p = 0; p < k; ++p) {
    while (part[order[order_pos]] != kUnassigned) ++order_pos;
    assign(order[order_pos], p);
  }
  while (assigned < g.n) {
    DeviceId p = 0;
    for (DeviceId q = 1; q < k; ++q) {
      if (pw[q] < pw[p]) p = q;
    }
    if (!frontier[p].empty()) {
      assign(frontier[p].begin()->second, p);
    } else {
      while (part[order[order_pos]] != kUnassigned) ++order_pos;
      assign(order[order_pos], p);
    }
  }
  return part;
}

// Moves nodes out of overweight parts, choosing the best-gain move each time.
// Returns false if some part is still above the limit (heavy coarse nodes).
inline bool rebalance(const WorkGraph& g, PartState& s, EdgeWeight max_w) {
  const std::size_t k = s.weight.size();
  Connectivity conn(k);
  for (;;) {
    DeviceId over = 0;
    for (DeviceId p = 1; p < k; ++p) {
      if (s.weight[p] > s.weight[over]) over = p;
    }
    if (s.weight[over] <= max_w) return true;
    if (s.count[over] <= 1) return false;

    NodeId best_u = kNone;
    DeviceId best_q = 0;
    EdgeWeight best_gain = std::numeric_limits<EdgeWeight>::min();
    for (NodeId u = 0; u < g.n; ++u) {
      if (s.part[u] != over) continue;
      conn.compute(g, s.part, u);
      for (DeviceId q = 0; q < k; ++q) {
        if (q == over || s.weight[q] + g.vwgt[u] > max_w) continue;
        const EdgeWeight gain = conn.to(q) - conn.to(over);
        if (gain > best_gain) {
          best_gain = gain;
          best_u = u;
          best_q = q;
        }
      }
    }
    if (best_u == kNone) return false;
    s.move(g, best_u, best_q);
  }
}

// Best partner v in part `to` for swapping with u (currently in `from`), or
// kNone if no swap fits the size limit and strictly reduces the cut. gain_u is
// the cut reduction of moving u alone.
inline NodeId best_swap_partner(const WorkGraph& g, const PartState& s, NodeId u, DeviceId from, DeviceId to,
                                EdgeWeight gain_u, EdgeWeight max_w, Connectivity& conn) {
  NodeId best_v = kNone;
  EdgeWeight best_gain = 0;
  for (NodeId v = 0; v < g.n; ++v) {
    if (s.part[v] != to) continue;
    if (s.weight[from] - g.vwgt[u] + g.vwgt[v] > max_w || s.weight[to] - g.vwgt[v] + g.vwgt[u] > max_w) continue;
    conn.compute(g, s.part, v);
    EdgeWeight w_uv = 0;
    for (std::size_t e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      if (g.adj[e] == u) w_uv = g.adjw[e];
    }
    const EdgeWeight gain = gain_u + conn.to(from) - conn.to(to) - 2 * w_uv;
    if (gain > best_gain) {
      best_gain = gain;
      best_v = v;
    }
  }
  return best_v;
}

// Greedy boundary refinement. A node moves to the part of highest
// connectivity that has room when that strictly reduces the weighted cut, or
// keeps it equal while strictly improving balance. When the only improving
// target is full, the node is swapped with the best partner from it.
// Parts never become empty. Runs until a pass makes no move (or max_passes
// is reached).
inline void refine(const WorkGraph& g, PartState& s, EdgeWeight max_w, Rng& rng, int max_passes) {
  const std::size_t k = s.weight.size();
  if (k < 2) return;
  Connectivity conn(k);
  for (int pass = 0; max_passes < 0 || pass < max_passes; ++pass) {
    bool moved = false;
    for (NodeId u : random_permutation(g.n, rng)) {
      const DeviceId own = s.part[u];
      if (s.count[own] <= 1) continue;
      conn.compute(g, s.part, u);
      if (!conn.is_boundary(own)) continue;
      DeviceId best = own;
      EdgeWeight best_conn = std::numeric_limits<EdgeWeight>::min();
      for (DeviceId q = 0; q < k; ++q) {
        if (q == own || s.weight[q] + g.vwgt[u] > max_w) continue;
        const EdgeWeight c = conn.to(q);
        if (c > best_conn || (c == best_conn && s.weight[q] < s.weight[best])) {
          best = q;
          best_conn = c;
        }
      }
      DeviceId full = own;
      EdgeWeight full_conn = conn.to(own);
      for (DeviceId q = 0; q < k; ++q) {
        if (q != own && s.weight[q] + g.vwgt[u] > max_w && conn.to(q) > full_conn) {
          full = q;
          full_conn = conn.to(q);
        }
      }
      const EdgeWeight gain = best == own ? 0 : best_conn - conn.to(own);
      const bool balances = best != own && s.weight[best] + g.vwgt[u] < s.weight[own];
      if (gain > 0 || (gain == 0 && balances)) {
        s.move(g, u, best);
        moved = true;
      } else if (full != own) {
        const NodeId v = best_swap_partner(g, s, u, own, full, full_conn - conn.to(own), max_w, conn);
        if (v != kNone) {
          s.move(g, u, full);
          s.move(g, v, own);
          moved = true;
        }
      }
    }
    if (!moved) break;
  }
}

}  // namespace detail

// Partitions a (weighted) graph into k disjoint, non-empty parts of at most
// max_part_size(N, k, tol) nodes each, minimizing the weighted edge cut.
// Deterministic for a given seed.
inline Partition partition_kway(const Graph& gw, std::size_t k, const PartitionOptions& opts = {}) {
  using namespace detail;
  const std::size_t n = gw.num_nodes();
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (k > n) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds node count " + std::to_string(n));
  }
  if (!(opts.balance_tol >= 0.0)) throw InvalidArgument("balance tolerance must be >= 0");
  if (k == 1) return Partition::from_assignment(1, std::vector<DeviceId>(n, 0));

  Rng rng(opts.seed);
  const auto max_w = static_cast<EdgeWeight>(max_part_size(n, k, opts.balance_tol));
  const std::size_t coarsen_to = std::max<std::size_t>(30 * k, 200);
  const auto max_vwgt = std::max<EdgeWeight>(
      1, std::min<EdgeWeight>(max_w, static_cast<EdgeWeight>(1.5 * static_cast<double>(n) /
                                                              static_cast<double>(coarsen_to))));

  std::vector<Level> levels;
  WorkGraph finest = WorkGraph::from(gw);
  const WorkGraph* cur = &finest;
  while (cur->n > coarsen_to) {
    Level lvl = coarsen_once(*cur, rng, max_vwgt);
    // Stop once matching no longer shrinks the graph.
    if (lvl.graph.n >= cur->n || static_cast<double>(lvl.graph.n) > 0.95 * static_cast<double>(cur->n)) {
      break;
    }
    levels.push_back(std::move(lvl));
    cur = &levels.back().graph;
  }

  std::vector<DeviceId> best;
  EdgeWeight best_cut = std::numeric_limits<EdgeWeight>::max();
  bool best_feasible = false;
  for (int t = 0; t < std::max(1, opts.initial_trials); ++t) {
    PartState s(*cur, k, grow_partition(*cur, k, rng));
    const bool feasible = rebalance(*cur, s, max_w);
    refine(*cur, s, max_w, rng, 16);
    const EdgeWeight cut = weighted_cut(*cur, s.part);
    if ((feasible && !best_feasible) || (feasible == best_feasible && cut < best_cut)) {
      best = std::move(s.part);
      best_cut = cut;
      best_feasible = feasible;
    }
  }

  for (std::size_t li = levels.size(); li-- > 0;) {
    const WorkGraph& fine = li == 0 ? finest : levels[li - 1].graph;
    std::vector<DeviceId> projected(fine.n);
    for (NodeId u = 0; u < fine.n; ++u) projected[u] = best[levels[li].cmap[u]];
    PartState s(fine, k, std::move(projected));
    rebalance(fine, s, max_w);
    refine(fine, s, max_w, rng, li == 0 ? -1 : 8);
    best = std::move(s.part);
  }
  if (levels.empty()) {
    PartState s(finest, k, std::move(best));
    rebalance(finest, s, max_w);
    refine(finest, s, max_w, rng, -1);
    best = std::move(s.part);
  }
  return Partition::from_assignment(k, best);
}

}  // namespace sugar

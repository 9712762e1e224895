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

// Numerical probes of the block-diagonal approximation error theory. All
// probes compare the GCN on the normalized adjacency A with the GCN on its
// block restriction A_SG (entries across devices zeroed, no re-normalization)
// and use the entrywise max norm throughout.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sugar/block_error.hpp"
#include "sugar/error.hpp"
#include "sugar/gcn.hpp"
#include "sugar/graph.hpp"
#include "sugar/multilevel.hpp"
#include "sugar/partition.hpp"
#include "sugar/rng.hpp"

namespace sugar {

inline constexpr double kActivationExactTol = 1e-12;
inline constexpr double kGradientExactTol = 1e-10;

// Relative slack when comparing a measured value with C * eps.
inline constexpr double kBoundSlack = 1e-9;

struct ActivationProbe {
  std::vector<double> epsilon;                     // per family member
  std::vector<std::vector<double>> z_error;        // [member][layer] ||Z_SG - Z||
  std::vector<std::vector<double>> h_error;        // [member][hidden layer] ||H_SG - H||
  std::size_t fit_member = 0;                      // member used to fit C
  std::vector<double> fitted_c;                    // per layer, from the max-epsilon members
  std::vector<double> max_ratio;                   // per layer, max over members
  std::vector<std::vector<bool>> within_bound;     // [member][layer]
  std::vector<double> closed_form_bound;           // eta^2 beta^2 eps per member
  bool closed_form_ok = true;
  bool exact_at_zero = true;
  bool pass = true;
};

struct GradientProbe {
  std::vector<double> epsilon;
  std::vector<double> grad_error;  // ||grad L_SG - grad L||
  std::size_t fit_member = 0;
  double fitted_c = 0;
  double max_ratio = 0;
  std::vector<bool> within_bound;
  bool exact_at_zero = true;
  bool pass = true;
};

struct HoeffdingPoint {
  std::size_t m = 0;
  double delta = 0;
  double empirical = 0;  // fraction of trials with eps_M >= delta
  double std_error = 0;
  double bound = 0;      // 2 exp(-2 M delta^2)
  double mean_epsilon = 0;
  bool pass = true;
};

struct HoeffdingProbe {
  std::size_t trials = 0;
  std::vector<HoeffdingPoint> points;
  bool pass = true;
};

struct ConvergencePoint {
  std::size_t epochs = 0;
  double lr = 0;
  double min_grad_norm_sq = 0;  // min_t ||grad L(W_t)||_F^2
  double final_loss = 0;
  bool diverged = false;
};

struct ConvergenceProbe {
  std::vector<ConvergencePoint> points;
  bool pass = true;
};

namespace detail {

// Index of the largest-epsilon member (the last one on ties). Constants are
// fitted on every member tied at that epsilon, so the result does not depend
// on family order.
inline std::size_t max_epsilon_member(const std::vector<double>& eps) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < eps.size(); ++m) {
    if (eps[m] >= eps[best]) best = m;
  }
  return best;
}

inline double max_abs(const NormalizedAdjacency& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

inline bool within(double value, double c, double eps) { return value <= c * eps * (1.0 + kBoundSlack) + 1e-300; }

}  // namespace detail

// Nested family of increasing cut: member 0 is the single-device partition,
// member j splits every part of member j-1 in two with the partitioner
// (parts of one node are kept). Cut sets, and hence epsilon, are nested.
inline std::vector<Partition> bisection_family(const Graph& g, std::size_t members, Seed seed,
                                               double balance_tol = 0.05) {
  if (members == 0) throw InvalidArgument("family needs at least one member");
  const Graph gw = build_weighted_graph(g);
  std::vector<Partition> family;
  std::vector<DeviceId> assign(g.num_nodes(), 0);
  std::size_t k = 1;
  family.push_back(Partition::from_assignment(1, assign));
  for (std::size_t level = 1; level < members; ++level) {
    const Partition& prev = family.back();
    std::vector<DeviceId> next(g.num_nodes());
    std::size_t next_k = 0;
    for (DeviceId d = 0; d < k; ++d) {
      auto nodes = prev.nodes_of(d);
      if (nodes.empty()) continue;
      if (nodes.size() < 2) {
        for (NodeId v : nodes) next[v] = static_cast<DeviceId>(next_k);
        ++next_k;
        continue;
      }
      InducedSubgraph sub = induce_subgraph(gw, nodes);
      Partition halves = partition_kway(sub.graph, 2, {balance_tol, derive_seed(seed, level * 1000003 + d), 8});
      for (std::size_t j = 0; j < sub.local_to_global.size(); ++j) {
        next[sub.local_to_global[j]] = static_cast<DeviceId>(next_k + halves.device_of(static_cast<NodeId>(j)));
      }
      next_k += 2;
    }
    k = next_k;
    family.push_back(Partition::from_assignment(k, next));
  }
  return family;
}

// Activation error of the block-restricted GCN against the exact one for a
// family of partitions, with C fitted on the largest-epsilon member and the
// first-layer closed-form bound eta^2 beta^2 eps checked literally.
inline ActivationProbe probe_activation_bound(const Graph& g, const FeatureMatrix& x, const GcnModel& model,
                                              const std::vector<Partition>& family) {
  if (family.empty()) throw InvalidArgument("partition family is empty");
  const NormalizedAdjacency exact = normalize_adjacency(g);
  const ForwardTrace ref = forward(exact, x, model);
  const std::size_t layers = model.num_layers();
  const auto dims = model.dims();
  const double eta = static_cast<double>(std::max({g.num_nodes(), dims[0], dims[1]}));

  ActivationProbe p;
  for (const auto& part : family) {
    const NormalizedAdjacency approx = restrict_to_blocks(exact, part);
    const double eps = entrywise_error(exact, approx);
    const ForwardTrace sg = forward(approx, x, model);
    std::vector<double> ze, he;
    for (std::size_t l = 0; l < layers; ++l) ze.push_back(max_abs_diff(sg.pre[l], ref.pre[l]));
    for (std::size_t l = 1; l < layers; ++l) he.push_back(max_abs_diff(sg.inputs[l], ref.inputs[l]));
    p.epsilon.push_back(eps);
    p.z_error.push_back(std::move(ze));
    p.h_error.push_back(std::move(he));

    const double beta = std::max({detail::max_abs(exact), detail::max_abs(approx), max_abs(x),
                                  max_abs(model.weights[0])});
    p.closed_form_bound.push_back(eta * eta * beta * beta * eps);
  }

  p.fit_member = detail::max_epsilon_member(p.epsilon);
  const double fit_eps = p.epsilon[p.fit_member];
  p.fitted_c.assign(layers, 0.0);
  p.max_ratio.assign(layers, 0.0);
  for (std::size_t m = 0; m < family.size(); ++m) {
    if (fit_eps == 0 || p.epsilon[m] != fit_eps) continue;
    for (std::size_t l = 0; l < layers; ++l) p.fitted_c[l] = std::max(p.fitted_c[l], p.z_error[m][l] / fit_eps);
  }
  for (std::size_t m = 0; m < family.size(); ++m) {
    std::vector<bool> ok(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      const double e = p.z_error[m][l];
      if (p.epsilon[m] == 0.0) {
        ok[l] = e <= kActivationExactTol;
        p.exact_at_zero = p.exact_at_zero && ok[l];
      } else {
        ok[l] = detail::within(e, p.fitted_c[l], p.epsilon[m]);
        p.max_ratio[l] = std::max(p.max_ratio[l], e / p.epsilon[m]);
      }
      p.pass = p.pass && ok[l];
    }
    if (p.epsilon[m] == 0.0) {
      for (double e : p.h_error[m]) p.exact_at_zero = p.exact_at_zero && e <= kActivationExactTol;
    }
    if (p.z_error[m][0] > p.closed_form_bound[m] * (1.0 + kBoundSlack)) p.closed_form_ok = false;
    p.within_bound.push_back(std::move(ok));
  }
  p.pass = p.pass && p.exact_at_zero && p.closed_form_ok;
  return p;
}

// Gradients of (1/N) sum_i w_i f(y_i, z_i) with the exact and the
// block-restricted adjacency.
inline GradientSet full_gradient(const NormalizedAdjacency& adj, const FeatureMatrix& x, const LabelVector& y,
                                 const GcnModel& model, std::span<const double> node_weights) {
  const ForwardTrace t = forward(adj, x, model);
  return backward(adj, t, y, node_weights, model);
}

inline std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

// `corrupt` adds a constant to the SG gradient; used as a negative control.
inline GradientProbe probe_gradient_bound(const Graph& g, const FeatureMatrix& x, const LabelVector& y,
                                          const GcnModel& model, const std::vector<Partition>& family,
                                          std::span<const double> node_weights = {}, double corrupt = 0.0) {
  if (family.empty()) throw InvalidArgument("partition family is empty");
  const std::vector<double> uniform = uniform_weights(g.num_nodes());
  if (node_weights.empty()) node_weights = uniform;
  const NormalizedAdjacency exact = normalize_adjacency(g);
  const GradientSet ref = full_gradient(exact, x, y, model, node_weights);

  GradientProbe p;
  for (const auto& part : family) {
    const NormalizedAdjacency approx = restrict_to_blocks(exact, part);
    GradientSet sg = full_gradient(approx, x, y, model, node_weights);
    if (corrupt != 0.0) sg.grads.front()(0, 0) += corrupt;
    p.epsilon.push_back(entrywise_error(exact, approx));
    p.grad_error.push_back(max_abs_diff(sg, ref));
  }
  p.fit_member = detail::max_epsilon_member(p.epsilon);
  for (std::size_t m = 0; m < family.size(); ++m) {
    if (p.epsilon[m] > 0 && p.epsilon[m] == p.epsilon[p.fit_member]) {
      p.fitted_c = std::max(p.fitted_c, p.grad_error[m] / p.epsilon[m]);
    }
  }
  for (std::size_t m = 0; m < family.size(); ++m) {
    bool ok;
    if (p.epsilon[m] == 0.0) {
      ok = p.grad_error[m] <= kGradientExactTol;
      p.exact_at_zero = p.exact_at_zero && ok;
    } else {
      ok = detail::within(p.grad_error[m], p.fitted_c, p.epsilon[m]);
      p.max_ratio = std::max(p.max_ratio, p.grad_error[m] / p.epsilon[m]);
    }
    p.within_bound.push_back(ok);
    p.pass = p.pass && ok;
  }
  return p;
}

// Tail check from precomputed samples: eps_samples[j][t] is eps_M for
// m_values[j] in trial t.
inline HoeffdingProbe hoeffding_from_samples(std::span<const std::size_t> m_values,
                                             const std::vector<std::vector<double>>& eps_samples,
                                             std::span<const double> delta_grid) {
  HoeffdingProbe p;
  p.trials = eps_samples.empty() ? 0 : eps_samples.front().size();
  for (std::size_t j = 0; j < m_values.size(); ++j) {
    const auto& s = eps_samples[j];
    double mean = 0;
    for (double e : s) mean += e;
    mean /= static_cast<double>(s.size());
    for (double delta : delta_grid) {
      HoeffdingPoint pt;
      pt.m = m_values[j];
      pt.delta = delta;
      const auto hits = std::ranges::count_if(s, [delta](double e) { return e >= delta; });
      pt.empirical = static_cast<double>(hits) / static_cast<double>(s.size());
      pt.std_error = std::sqrt(pt.empirical * (1.0 - pt.empirical) / static_cast<double>(s.size()));
      pt.bound = 2.0 * std::exp(-2.0 * static_cast<double>(pt.m) * delta * delta);
      pt.mean_epsilon = mean;
      pt.pass = pt.empirical <= pt.bound + 3.0 * pt.std_error;
      p.pass = p.pass && pt.pass;
      p.points.push_back(pt);
    }
  }
  return p;
}

// Empirical P(eps_M >= delta) against 2 exp(-2 M delta^2). Each trial draws
// max(M) partitions from `generator` with fresh seeds and eps_M uses the
// first M of them.
template <PartitionGenerator Gen>
HoeffdingProbe probe_hoeffding(const Graph& g, Gen&& generator, std::span<const std::size_t> m_values,
                               std::span<const double> delta_grid, std::size_t trials, Seed seed) {
  if (trials < 1 || m_values.empty()) throw InvalidArgument("need >= 1 trial and >= 1 value of M");
  const NormalizedAdjacency exact = normalize_adjacency(g);
  const std::size_t pool = *std::max_element(m_values.begin(), m_values.end());
  std::vector<std::vector<double>> samples(m_values.size(), std::vector<double>(trials));
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<Partition> parts;
    for (std::size_t m = 0; m < pool; ++m) parts.push_back(generator(derive_seed(derive_seed(seed, t), m)));
    for (std::size_t j = 0; j < m_values.size(); ++j) {
      std::vector<Partition> first(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(m_values[j]));
      samples[j][t] = entrywise_error(exact, average_block_restriction(exact, first));
    }
  }
  return hoeffding_from_samples(m_values, samples, delta_grid);
}

// Default generator: the partitioner on the degree-weighted graph with the
// seed varying greedy-growing starts and matching order.
inline HoeffdingProbe probe_hoeffding(const Graph& g, std::size_t k, std::span<const std::size_t> m_values,
                                      std::span<const double> delta_grid, std::size_t trials, Seed seed,
                                      double balance_tol = 0.05) {
  const Graph gw = build_weighted_graph(g);
  return probe_hoeffding(
      g, [&](Seed s) { return partition_kway(gw, k, {balance_tol, s, 8}); }, m_values, delta_grid, trials, seed);
}

// Gradient descent driven by the block-restricted gradient, W <- W - lr_T *
// grad L_SG, with lr_T = base_lr / sqrt(T), for every T in the grid. Records
// min over epochs of the exact ||grad L(W_t)||_F^2; that statistic must not
// increase along the grid. Divergence is reported, not thrown.
inline ConvergenceProbe probe_convergence(const Graph& g, const FeatureMatrix& x, const LabelVector& y,
                                          const Partition& partition, std::span<const std::size_t> dims,
                                          std::span<const std::size_t> t_grid, double base_lr, Seed seed,
                                          std::span<const double> node_weights = {}) {
  const std::vector<double> uniform = uniform_weights(g.num_nodes());
  if (node_weights.empty()) node_weights = uniform;
  const NormalizedAdjacency exact = normalize_adjacency(g);
  const NormalizedAdjacency approx = restrict_to_blocks(exact, partition);

  ConvergenceProbe p;
  for (std::size_t idx = 0; idx < t_grid.size(); ++idx) {
    const std::size_t epochs = t_grid[idx];
    if (idx > 0 && epochs < t_grid[idx - 1]) throw InvalidArgument("t_grid must be ascending");
    ConvergencePoint pt;
    pt.epochs = epochs;
    pt.lr = base_lr / std::sqrt(static_cast<double>(std::max<std::size_t>(epochs, 1)));
    GcnModel model = GcnModel::glorot(dims, seed);
    pt.min_grad_norm_sq = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < epochs; ++t) {
      const ForwardTrace tr = forward(exact, x, model);
      pt.final_loss = loss(tr.logits(), y, node_weights);
      if (!std::isfinite(pt.final_loss)) {
        pt.diverged = true;
        break;
      }
      pt.min_grad_norm_sq = std::min(pt.min_grad_norm_sq, frobenius_sq(backward(exact, tr, y, node_weights, model)));
      apply_sgd(model, full_gradient(approx, x, y, model, node_weights), pt.lr);
    }
    p.pass = p.pass && !pt.diverged;
    if (idx > 0 && pt.min_grad_norm_sq > p.points.back().min_grad_norm_sq) p.pass = false;
    p.points.push_back(pt);
  }
  return p;
}

}  // namespace sugar

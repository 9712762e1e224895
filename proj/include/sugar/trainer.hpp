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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/gcn.hpp"
#include "sugar/graph.hpp"
#include "sugar/io.hpp"
#include "sugar/multilevel.hpp"
#include "sugar/partition.hpp"
#include "sugar/rng.hpp"

namespace sugar {

struct TrainConfig {
  std::size_t epochs = 200;
  double lr = 0.1;
  std::size_t k = 1;
  double balance_tol = 0.05;
  bool weighted = true;  // partition the degree-weighted graph
  bool expand = false;
  Seed seed = 0;
  MemoryBudget budgets;
  CostModel layer_dims;
  // Whether nodes added by expansion enter the local objective.
  bool halo_in_loss = true;
  // Divide each local objective by its number of contributing nodes. This
  // scales the gradient only; the minimizer is unchanged.
  bool mean_loss = true;
  // 0: SUGAR_THREADS, else hardware concurrency.
  std::size_t threads = 0;
  int initial_trials = 8;

  void validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("learning rate must be finite and >= 0");
    if (k < 1) throw InvalidArgument("k must be >= 1");
    layer_dims.validate();
    if (expand) budgets.validate(k);
  }
};

// State of one device: its local subgraph, per-node loss weights and model.
struct TrainRun {
  DeviceId device = 0;
  NormalizedAdjacency adj;
  FeatureMatrix features;
  LabelVector labels;
  std::vector<NodeId> local_to_global;
  std::vector<char> is_halo;             // added by expansion
  std::vector<double> node_weights;      // 1 / |P_i|
  std::vector<double> objective_weights; // weights actually fed to the loss
  GcnModel model;
  std::size_t memory_bytes = 0;
  std::vector<double> epoch_losses;
  std::vector<double> epoch_grad_norms;  // ||grad L_k||_F at each epoch
  std::vector<double> epoch_ms;
};

struct Deployment {
  Graph weighted;
  Partition base;       // disjoint partitioner output
  Partition partition;  // after optional expansion
  CutMetrics cut;
  std::vector<TrainRun> runs;
};

inline Seed model_seed(Seed seed, DeviceId device) { return derive_seed(seed, 1000 + device); }

// Weighted graph, partition, optional expansion, and one TrainRun per device
// with its own re-normalized local adjacency. When `masks` is given only
// training nodes enter the objective.
inline Deployment prepare_runs(const Graph& g, const FeatureMatrix& x, const LabelVector& y,
                               const TrainConfig& cfg, std::span<const Split> masks = {}) {
  cfg.validate();
  if (x.rows() != g.num_nodes() || y.size() != g.num_nodes()) {
    throw InvalidArgument("graph, features and labels disagree on node count");
  }
  if (!masks.empty() && masks.size() != g.num_nodes()) throw InvalidArgument("mask length differs from node count");
  if (cfg.layer_dims.layer_dims.front() != x.cols()) throw InvalidArgument("first layer width != feature width");
  if (cfg.layer_dims.layer_dims.back() != static_cast<std::size_t>(y.num_classes)) {
    throw InvalidArgument("last layer width != class count");
  }
  y.validate();

  Deployment d;
  d.weighted = cfg.weighted ? build_weighted_graph(g) : g.without_weights();
  PartitionOptions opts{cfg.balance_tol, derive_seed(cfg.seed, 7), cfg.initial_trials};
  d.base = partition_kway(d.weighted, cfg.k, opts);
  d.cut = cut_metrics(d.weighted, d.base);
  d.partition = cfg.expand ? expand_all(g, d.base, cfg.layer_dims, cfg.budgets) : d.base;

  MemoryBudget bytes = cfg.budgets;
  if (bytes.limits.empty()) bytes.limits = {1};
  for (DeviceId dev = 0; dev < cfg.k; ++dev) {
    try {
      auto nodes = d.partition.nodes_of(dev);
      InducedSubgraph sub = induce_subgraph(g, nodes);
      TrainRun r;
      r.device = dev;
      r.adj = normalize_adjacency(sub.graph);
      r.memory_bytes = memory_estimate(sub.graph, cfg.layer_dims, bytes);
      r.local_to_global = std::move(sub.local_to_global);
      const std::size_t n = r.local_to_global.size();
      r.features = FeatureMatrix(n, x.cols());
      r.labels.num_classes = y.num_classes;
      r.labels.labels.resize(n);
      r.is_halo.resize(n);
      r.node_weights.resize(n);
      r.objective_weights.resize(n);
      std::size_t contributing = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const NodeId i = r.local_to_global[j];
        std::ranges::copy(x.row(i), r.features.row(j).begin());
        r.labels.labels[j] = y.labels[i];
        r.is_halo[j] = d.base.device_of(i) != dev;
        r.node_weights[j] = 1.0 / static_cast<double>(d.partition.multiplicity(i));
        const bool labeled = masks.empty() || masks[i] == Split::kTrain;
        const bool counted = labeled && (cfg.halo_in_loss || !r.is_halo[j]);
        r.objective_weights[j] = counted ? r.node_weights[j] : 0.0;
        contributing += counted;
      }
      if (cfg.mean_loss && contributing > 0) {
        for (double& w : r.objective_weights) w /= static_cast<double>(contributing);
      }
      r.model = GcnModel::glorot(cfg.layer_dims.layer_dims, model_seed(cfg.seed, dev));
      d.runs.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error("device " + std::to_string(dev) + ": " + e.what());
    }
  }
  return d;
}

// Full-batch gradient descent on the local objective for cfg.epochs epochs,
// continuing from the run's current model. Reads and writes only `run`.
inline void train_local(TrainRun& run, const TrainConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  for (std::size_t t = 0; t < cfg.epochs; ++t) {
    const auto start = Clock::now();
    ForwardTrace trace = forward(run.adj, run.features, run.model);
    const double value = loss(trace.logits(), run.labels, run.objective_weights);
    if (!std::isfinite(value)) throw NonFiniteLoss(run.device, run.epoch_losses.size());
    GradientSet grads = backward(run.adj, trace, run.labels, run.objective_weights, run.model);
    apply_sgd(run.model, grads, cfg.lr);
    run.epoch_losses.push_back(value);
    run.epoch_grad_norms.push_back(std::sqrt(frobenius_sq(grads)));
    run.epoch_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  }
}

inline std::size_t worker_count(const TrainConfig& cfg, std::size_t jobs) {
  std::size_t t = cfg.threads;
  if (t == 0) {
    if (const char* env = std::getenv("SUGAR_THREADS")) {
      try {
        t = static_cast<std::size_t>(std::stoul(env));
      } catch (...) {
        t = 0;
      }
    }
  }
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, jobs));
}

struct DeviceError {
  DeviceId device;
  std::string message;
  bool non_finite = false;
};

// Trains every run on a pool of worker threads. Runs share nothing mutable,
// so the result is identical to training them one after another. A failing
// run is reported and the others still complete.
template <typename Worker>
std::vector<DeviceError> train_all(std::vector<TrainRun>& runs, const TrainConfig& cfg, Worker&& worker) {
  std::vector<std::exception_ptr> failures(runs.size());
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) {
      try {
        worker(runs[i], cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = worker_count(cfg, runs.size());
  if (n_workers == 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(loop);
  }
  std::vector<DeviceError> errors;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!failures[i]) continue;
    DeviceError e{runs[i].device, "unknown error"};
    try {
      std::rethrow_exception(failures[i]);
    } catch (const NonFiniteLoss& ex) {
      e.message = ex.what();
      e.non_finite = true;
    } catch (const std::exception& ex) {
      e.message = ex.what();
    }
    errors.push_back(std::move(e));
  }
  return errors;
}

inline std::vector<DeviceError> train_all(std::vector<TrainRun>& runs, const TrainConfig& cfg) {
  return train_all(runs, cfg, [](TrainRun& r, const TrainConfig& c) { train_local(r, c); });
}

struct SplitAccuracy {
  double train = 0, val = 0, test = 0, all = 0;
};

struct EnsembleResult {
  Matrix logits;  // averaged over the devices holding each node
  std::vector<std::size_t> multiplicity;
  SplitAccuracy accuracy;
};

inline std::size_t argmax_row(std::span<const double> r) {
  return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

// Logits of every device for its own local nodes.
inline std::vector<Matrix> device_logits(const std::vector<TrainRun>& runs) {
  std::vector<Matrix> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(forward(r.adj, r.features, r.model).logits());
  return out;
}

// Averages each node's logits over the devices holding it; each device sees
// only its local receptive field.
inline EnsembleResult predict_ensemble(std::size_t num_nodes, const LabelVector& y, const std::vector<TrainRun>& runs,
                                       std::span<const Split> masks = {}) {
  if (runs.empty()) throw InvalidArgument("no runs to ensemble");
  const std::size_t classes = runs.front().model.weights.back().cols();
  EnsembleResult res;
  res.logits = Matrix(num_nodes, classes);
  res.multiplicity.assign(num_nodes, 0);
  const auto logits = device_logits(runs);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (std::size_t j = 0; j < runs[k].local_to_global.size(); ++j) {
      const NodeId i = runs[k].local_to_global[j];
      if (i >= num_nodes) throw RangeError("run references node outside the graph");
      auto dst = res.logits.row(i);
      auto src = logits[k].row(j);
      for (std::size_t c = 0; c < classes; ++c) dst[c] += src[c];
      ++res.multiplicity[i];
    }
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (res.multiplicity[i] == 0) throw InvalidArgument("node " + std::to_string(i) + " is not covered by any device");
    for (double& v : res.logits.row(i)) v /= static_cast<double>(res.multiplicity[i]);
  }

  std::size_t hits[4] = {0, 0, 0, 0}, totals[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const bool hit = static_cast<int>(argmax_row(res.logits.row(i))) == y.labels.at(i);
    const int split = masks.empty() ? 0 : static_cast<int>(masks[i]);
    hits[split] += hit;
    ++totals[split];
    hits[3] += hit;
    ++totals[3];
  }
  auto frac = [&](int s) { return totals[s] ? static_cast<double>(hits[s]) / static_cast<double>(totals[s]) : 0.0; };
  res.accuracy = {frac(0), frac(1), frac(2), frac(3)};
  return res;
}

struct JensenGap {
  // (1/N) sum_i f(y_i, mean_{k in P_i} z_i^k)
  double lhs = 0;
  // (1/K) sum_k sum_{i in V_k} f(y_i, z_i^k) / |P_i|, exactly as the bound is written
  double rhs = 0;
  // (1/N) sum_i (1/|P_i|) sum_{k in P_i} f(y_i, z_i^k)
  double rhs_per_node = 0;
  // max_i [ f(y_i, mean z) - mean f(y_i, z) ]; <= 0 when Jensen holds
  double max_node_violation = 0;
};

inline JensenGap jensen_gap(std::size_t num_nodes, const LabelVector& y, const std::vector<TrainRun>& runs) {
  const EnsembleResult ens = predict_ensemble(num_nodes, y, runs);
  const auto logits = device_logits(runs);
  std::vector<double> mean_f(num_nodes, 0.0);
  JensenGap j;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    for (std::size_t a = 0; a < runs[k].local_to_global.size(); ++a) {
      const NodeId i = runs[k].local_to_global[a];
      const double f = cross_entropy(logits[k].row(a), y.labels[i]);
      const double share = f / static_cast<double>(ens.multiplicity[i]);
      j.rhs += share;
      mean_f[i] += share;
    }
  }
  j.rhs /= static_cast<double>(runs.size());
  j.max_node_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < num_nodes; ++i) {
    const double f_mean = cross_entropy(ens.logits.row(i), y.labels[i]);
    j.lhs += f_mean;
    j.rhs_per_node += mean_f[i];
    j.max_node_violation = std::max(j.max_node_violation, f_mean - mean_f[i]);
  }
  j.lhs /= static_cast<double>(num_nodes);
  j.rhs_per_node /= static_cast<double>(num_nodes);
  return j;
}

}  // namespace sugar

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

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>

#include "fixtures.hpp"

using namespace sugar;
using namespace sugar::testing;

namespace {

Dataset small_sbm(Seed seed = 1) { return generate_sbm({2, 40, 0.2, 0.02, 4, 0.5, seed}); }

TrainConfig config(std::size_t k, const Dataset& d, std::vector<std::size_t> hidden = {8}) {
  TrainConfig cfg;
  cfg.k = k;
  cfg.epochs = 20;
  cfg.lr = 0.5;
  cfg.seed = 3;
  cfg.threads = 1;
  cfg.layer_dims.layer_dims = {d.features.cols()};
  for (auto h : hidden) cfg.layer_dims.layer_dims.push_back(h);
  cfg.layer_dims.layer_dims.push_back(static_cast<std::size_t>(d.labels.num_classes));
  return cfg;
}

void expect_same_runs(const std::vector<TrainRun>& a, const std::vector<TrainRun>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].model, b[i].model);
    EXPECT_EQ(a[i].epoch_losses, b[i].epoch_losses);
    EXPECT_EQ(a[i].epoch_grad_norms, b[i].epoch_grad_norms);
  }
}

}  // namespace

TEST(Prepare, SingleDeviceIsCentralized) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  cfg.mean_loss = false;
  const Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  ASSERT_EQ(dep.runs.size(), 1u);
  const TrainRun& r = dep.runs[0];
  EXPECT_EQ(r.local_to_global.size(), d.graph.num_nodes());
  for (double w : r.node_weights) EXPECT_EQ(w, 1.0);
  const auto full = normalize_adjacency(d.graph);
  EXPECT_EQ(r.adj.values(), full.values());
  EXPECT_EQ(r.features, d.features);
  EXPECT_EQ(r.model, GcnModel::glorot(cfg.layer_dims.layer_dims, model_seed(cfg.seed, 0)));
}

TEST(Prepare, DisjointSplitHasUnitWeights) {
  const Dataset d = small_sbm();
  const Deployment dep = prepare_runs(d.graph, d.features, d.labels, config(2, d));
  ASSERT_EQ(dep.runs.size(), 2u);
  for (const auto& r : dep.runs) {
    for (double w : r.node_weights) EXPECT_EQ(w, 1.0);
    for (char h : r.is_halo) EXPECT_FALSE(h);
  }
}

TEST(Prepare, ExpandedNodesShareWeight) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  cfg.expand = true;
  cfg.budgets.limits = {std::numeric_limits<std::size_t>::max() / 4};
  const Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  std::size_t shared = 0;
  for (const auto& r : dep.runs) {
    for (std::size_t j = 0; j < r.local_to_global.size(); ++j) {
      const auto m = dep.partition.multiplicity(r.local_to_global[j]);
      EXPECT_DOUBLE_EQ(r.node_weights[j], 1.0 / static_cast<double>(m));
      if (m == 2) {
        EXPECT_EQ(r.node_weights[j], 0.5);
        ++shared;
      }
    }
  }
  EXPECT_GT(shared, 0u);
}

TEST(Prepare, LocalAdjacencyUsesSubgraphDegrees) {
  const Dataset d = small_sbm();
  const Deployment dep = prepare_runs(d.graph, d.features, d.labels, config(2, d));
  for (const auto& r : dep.runs) {
    const auto sub = induce_subgraph(d.graph, r.local_to_global);
    EXPECT_EQ(r.adj.values(), normalize_adjacency(sub.graph).values());
  }
}

TEST(Prepare, MasksAndHaloToggleSelectObjective) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  cfg.expand = true;
  cfg.budgets.limits = {std::numeric_limits<std::size_t>::max() / 4};
  cfg.halo_in_loss = false;
  cfg.mean_loss = false;
  const Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg, d.masks);
  for (const auto& r : dep.runs) {
    for (std::size_t j = 0; j < r.local_to_global.size(); ++j) {
      const bool train = d.masks[r.local_to_global[j]] == Split::kTrain;
      EXPECT_EQ(r.objective_weights[j], train && !r.is_halo[j] ? r.node_weights[j] : 0.0);
    }
  }
}

TEST(Prepare, ErrorsCarryContext) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  cfg.layer_dims.layer_dims.front() += 1;
  EXPECT_THROW(prepare_runs(d.graph, d.features, d.labels, cfg), InvalidArgument);
  cfg = config(200, d);
  EXPECT_THROW(prepare_runs(d.graph, d.features, d.labels, cfg), InvalidArgument);
  cfg = config(2, d);
  cfg.expand = true;
  EXPECT_THROW(prepare_runs(d.graph, d.features, d.labels, cfg), InvalidArgument);
}

TEST(TrainLocal, ZeroLearningRateKeepsModel) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  cfg.lr = 0.0;
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  const GcnModel before = dep.runs[0].model;
  train_local(dep.runs[0], cfg);
  EXPECT_EQ(dep.runs[0].model, before);
  for (double l : dep.runs[0].epoch_losses) EXPECT_EQ(l, dep.runs[0].epoch_losses.front());
}

TEST(TrainLocal, ResumingEqualsLongerRun) {
  const Dataset d = small_sbm();
  TrainConfig one = config(2, d);
  one.epochs = 1;
  TrainConfig two = one;
  two.epochs = 2;
  Deployment a = prepare_runs(d.graph, d.features, d.labels, one);
  Deployment b = prepare_runs(d.graph, d.features, d.labels, two);
  train_local(a.runs[1], one);
  train_local(a.runs[1], one);
  train_local(b.runs[1], two);
  EXPECT_EQ(a.runs[1].model, b.runs[1].model);
  EXPECT_EQ(a.runs[1].epoch_losses, b.runs[1].epoch_losses);
}

TEST(TrainLocal, LossDecreasesOnSbmSubgraph) {
  const Dataset d = generate_sbm({2, 100, 0.1, 0.01, 8, 1.0, 4});
  TrainConfig cfg = config(2, d, {16});
  cfg.epochs = 100;
  cfg.lr = 0.05;
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg, d.masks);
  for (auto& r : dep.runs) {
    train_local(r, cfg);
    EXPECT_LT(r.epoch_losses.back(), r.epoch_losses.front());
  }
}

TEST(TrainLocal, NonFiniteLossAborts) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  dep.runs[0].model.weights[0](0, 0) = std::numeric_limits<double>::infinity();
  try {
    train_local(dep.runs[0], cfg);
    FAIL() << "expected NonFiniteLoss";
  } catch (const NonFiniteLoss& e) {
    EXPECT_EQ(e.epoch(), 0u);
    EXPECT_EQ(e.device(), 0u);
  }
}

TEST(TrainAll, ParallelEqualsSequentialBitwise) {
  const Dataset d = generate_sbm({4, 60, 0.1, 0.01, 4, 1.0, 2});
  TrainConfig seq = config(4, d);
  TrainConfig par = seq;
  par.threads = 4;
  Deployment a = prepare_runs(d.graph, d.features, d.labels, seq);
  Deployment b = prepare_runs(d.graph, d.features, d.labels, par);
  EXPECT_TRUE(train_all(a.runs, seq).empty());
  EXPECT_TRUE(train_all(b.runs, par).empty());
  expect_same_runs(a.runs, b.runs);
}

TEST(TrainAll, SingleRunEqualsTrainLocal) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  cfg.threads = 8;
  Deployment a = prepare_runs(d.graph, d.features, d.labels, cfg);
  Deployment b = prepare_runs(d.graph, d.features, d.labels, cfg);
  train_all(a.runs, cfg);
  train_local(b.runs[0], cfg);
  expect_same_runs(a.runs, b.runs);
}

TEST(TrainAll, FailingRunDoesNotStopOthers) {
  const Dataset d = generate_sbm({3, 30, 0.2, 0.02, 3, 0.5, 6});
  TrainConfig cfg = config(3, d);
  cfg.threads = 3;
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  dep.runs[1].model.weights[0](0, 0) = std::numeric_limits<double>::quiet_NaN();
  const auto errors = train_all(dep.runs, cfg);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].device, 1u);
  EXPECT_TRUE(errors[0].non_finite);
  EXPECT_EQ(dep.runs[0].epoch_losses.size(), cfg.epochs);
  EXPECT_EQ(dep.runs[2].epoch_losses.size(), cfg.epochs);
}

// Every buffer a run owns, as address ranges.
std::vector<std::pair<const void*, const void*>> owned_ranges(const TrainRun& r) {
  std::vector<std::pair<const void*, const void*>> out;
  auto add = [&](auto span) {
    if (!span.empty()) out.emplace_back(span.data(), span.data() + span.size());
  };
  add(std::span(r.adj.values()));
  add(std::span(r.adj.col_indices()));
  add(r.features.values());
  add(std::span(r.labels.labels));
  add(std::span(r.objective_weights));
  for (const auto& w : r.model.weights) add(w.values());
  return out;
}

TEST(TrainAll, ZeroCommunication) {
  // The worker records which run each thread touches and checks that no run
  // shares storage with another; a worker may only see its own run.
  const Dataset d = generate_sbm({4, 50, 0.1, 0.01, 4, 1.0, 8});
  TrainConfig cfg = config(4, d);
  cfg.expand = true;
  cfg.budgets.limits = {std::numeric_limits<std::size_t>::max() / 4};
  cfg.threads = 4;
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);

  std::vector<std::vector<std::pair<const void*, const void*>>> ranges;
  for (const auto& r : dep.runs) ranges.push_back(owned_ranges(r));
  std::size_t overlaps = 0;
  for (std::size_t a = 0; a < ranges.size(); ++a)
    for (std::size_t b = a + 1; b < ranges.size(); ++b)
      for (auto [lo1, hi1] : ranges[a])
        for (auto [lo2, hi2] : ranges[b])
          if (std::less<>{}(lo1, hi2) && std::less<>{}(lo2, hi1)) ++overlaps;
  EXPECT_EQ(overlaps, 0u);

  std::atomic<int> cross_run_access{0};
  std::mutex mu;
  std::set<DeviceId> seen;
  TrainRun* base = dep.runs.data();
  const std::size_t count = dep.runs.size();
  train_all(dep.runs, cfg, [&](TrainRun& r, const TrainConfig& c) {
    const std::ptrdiff_t idx = &r - base;
    if (idx < 0 || static_cast<std::size_t>(idx) >= count || r.device != static_cast<DeviceId>(idx)) ++cross_run_access;
    {
      std::lock_guard lock(mu);
      if (!seen.insert(r.device).second) ++cross_run_access;
    }
    const auto before = owned_ranges(r);
    train_local(r, c);
    if (owned_ranges(r) != before) ++cross_run_access;
  });
  EXPECT_EQ(cross_run_access.load(), 0);
  EXPECT_EQ(seen.size(), count);

  // Perturbing one device's inputs leaves every other device's result intact.
  Deployment again = prepare_runs(d.graph, d.features, d.labels, cfg);
  for (double& v : again.runs[0].features.values()) v += 1.0;
  train_all(again.runs, cfg);
  EXPECT_NE(again.runs[0].model, dep.runs[0].model);
  for (std::size_t k = 1; k < count; ++k) EXPECT_EQ(again.runs[k].model, dep.runs[k].model);
}

TEST(Ensemble, DisjointEqualsOwnerLogits) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  train_all(dep.runs, cfg);
  const auto ens = predict_ensemble(d.graph.num_nodes(), d.labels, dep.runs);
  const auto logits = device_logits(dep.runs);
  for (const auto& run : dep.runs) {
    for (std::size_t j = 0; j < run.local_to_global.size(); ++j) {
      for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(ens.logits(run.local_to_global[j], c), logits[run.device](j, c));
    }
  }
}

TEST(Ensemble, IdenticalViewsAverageToEither) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  std::vector<TrainRun> twins{dep.runs[0], dep.runs[0]};
  twins[1].device = 1;
  const auto a = predict_ensemble(d.graph.num_nodes(), d.labels, twins);
  const auto b = predict_ensemble(d.graph.num_nodes(), d.labels, dep.runs);
  for (auto m : a.multiplicity) EXPECT_EQ(m, 2u);
  EXPECT_LE(max_abs_diff(a.logits, b.logits), 1e-15);
}

TEST(Ensemble, SingleDeviceMatchesCentralizedGcn) {
  const Dataset d = generate_sbm({2, 60, 0.15, 0.01, 4, 0.8, 3});
  TrainConfig cfg = config(1, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg, d.masks);
  train_all(dep.runs, cfg);
  // Hand-rolled centralized loop on the full graph.
  const auto adj = normalize_adjacency(d.graph);
  GcnModel m = GcnModel::glorot(cfg.layer_dims.layer_dims, model_seed(cfg.seed, 0));
  std::vector<double> w(d.graph.num_nodes(), 0.0);
  std::size_t n_train = 0;
  for (auto s : d.masks) n_train += s == Split::kTrain;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = d.masks[i] == Split::kTrain ? 1.0 / n_train : 0.0;
  for (std::size_t t = 0; t < cfg.epochs; ++t) apply_sgd(m, full_gradient(adj, d.features, d.labels, m, w), cfg.lr);
  EXPECT_EQ(dep.runs[0].model, m);
  const auto ens = predict_ensemble(d.graph.num_nodes(), d.labels, dep.runs, d.masks);
  const Matrix z = forward(adj, d.features, m).logits();
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (d.masks[i] != Split::kTest) continue;
    hits += static_cast<int>(argmax_row(z.row(i))) == d.labels.labels[i];
    ++total;
  }
  EXPECT_EQ(ens.accuracy.test, static_cast<double>(hits) / static_cast<double>(total));
}

TEST(Ensemble, UncoveredNodeRejected) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  dep.runs.pop_back();
  EXPECT_THROW(predict_ensemble(d.graph.num_nodes(), d.labels, dep.runs), InvalidArgument);
}

TEST(Jensen, SingleDeviceScalingIdentity) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(1, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  const auto j = jensen_gap(d.graph.num_nodes(), d.labels, dep.runs);
  EXPECT_NEAR(j.lhs * static_cast<double>(d.graph.num_nodes()), j.rhs * 1.0, 1e-9);
  EXPECT_NEAR(j.max_node_violation, 0.0, 1e-12);
}

TEST(Jensen, DisjointIdenticalModelsGiveEquality) {
  const Dataset d = small_sbm();
  TrainConfig cfg = config(2, d);
  Deployment dep = prepare_runs(d.graph, d.features, d.labels, cfg);
  dep.runs[1].model = dep.runs[0].model;
  const auto j = jensen_gap(d.graph.num_nodes(), d.labels, dep.runs);
  EXPECT_NEAR(j.lhs, j.rhs_per_node, 1e-12);
  EXPECT_NEAR(j.rhs * 2.0, j.lhs * static_cast<double>(d.graph.num_nodes()), 1e-9);
  EXPECT_LE(j.max_node_violation, 1e-12);
}

TEST(Jensen, PerNodeInequalityOnEnumeratedOverlaps) {
  // All ways of giving each of 6 nodes a non-empty subset of 2 devices,
  // with random models per device.
  const Graph g = random_graph(6, 0.5, 2);
  Rng rng(3);
  const auto x = random_matrix(6, 3, rng);
  const auto y = random_labels(6, 3, rng);
  std::size_t instances = 0;
  for (unsigned code = 0; code < 729; ++code) {
    std::vector<std::vector<DeviceId>> mem(6);
    unsigned c = code;
    for (auto& m : mem) {
      const unsigned v = c % 3;
      c /= 3;
      if (v != 1) m.push_back(0);
      if (v != 0) m.push_back(1);
    }
    const Partition p = Partition::from_membership(2, mem);
    if (p.nodes_of(0).empty() || p.nodes_of(1).empty()) continue;
    std::vector<TrainRun> runs;
    for (DeviceId k = 0; k < 2; ++k) {
      const auto sub = induce_subgraph(g, p.nodes_of(k));
      TrainRun r;
      r.device = k;
      r.adj = normalize_adjacency(sub.graph);
      r.local_to_global = sub.local_to_global;
      r.features = Matrix(sub.local_to_global.size(), 3);
      for (std::size_t j = 0; j < sub.local_to_global.size(); ++j)
        std::ranges::copy(x.row(sub.local_to_global[j]), r.features.row(j).begin());
      r.model = GcnModel::glorot(std::vector<std::size_t>{3, 4, 3}, rng.next_u64());
      for (auto& w : r.model.weights)
        for (double& v : w.values()) v *= 3.0;
      runs.push_back(std::move(r));
    }
    const auto j = jensen_gap(6, y, runs);
    EXPECT_LE(j.max_node_violation, 1e-12);
    EXPECT_LE(j.lhs, j.rhs_per_node + 1e-12);
    ++instances;
  }
  EXPECT_GT(instances, 600u);
}

TEST(Workers, ThreadCountSources) {
  TrainConfig cfg;
  cfg.threads = 3;
  EXPECT_EQ(worker_count(cfg, 10), 3u);
  EXPECT_EQ(worker_count(cfg, 2), 2u);
  cfg.threads = 0;
  setenv("SUGAR_THREADS", "2", 1);
  EXPECT_EQ(worker_count(cfg, 10), 2u);
  unsetenv("SUGAR_THREADS");
  EXPECT_GE(worker_count(cfg, 10), 1u);
}

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

// Command-line front end. Every subcommand prints one JSON document on
// stdout; diagnostics go to stderr.
//
// Exit codes: 0 ok, 2 I/O or malformed input file, 3 infeasible arguments,
// 4 non-finite training loss, 5 verification probe failed.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <ctime>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sugar/bench.hpp"
#include "sugar/block_error.hpp"
#include "sugar/error.hpp"
#include "sugar/gcn.hpp"
#include "sugar/graph.hpp"
#include "sugar/io.hpp"
#include "sugar/multilevel.hpp"
#include "sugar/partition.hpp"
#include "sugar/report.hpp"
#include "sugar/synth.hpp"
#include "sugar/trainer.hpp"
#include "sugar/verifier.hpp"

namespace sugar::cli {

enum ExitCode : int { kOk = 0, kIoFailure = 2, kInfeasible = 3, kNonFinite = 4, kProbeFailed = 5 };

inline std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Inputs, echoed configuration and version for one invocation.
struct RunManifest {
  std::string command;
  Json inputs = Json::object();
  Json config = Json::object();
  Seed seed = 0;
  std::string started = iso_now();

  Json to_json() const {
    return Json{{"tool", "sugar"},
                {"version", kToolVersion},
                {"command", command},
                {"inputs", inputs},
                {"config", config},
                {"seed", seed},
                {"timestamps", Json{{"started", started}, {"finished", iso_now()}}}};
  }
};

inline Json envelope(const RunManifest& m) {
  return Json{{"schema", kSchemaVersion}, {"command", m.command}, {"manifest", m.to_json()}};
}

namespace detail {

inline sugar::Dataset load_dataset(const std::string& graph, const std::string& features, const std::string& labels,
                            const std::string& masks) {
  sugar::Dataset d;
  d.graph = load_graph(graph).graph;
  d.features = load_features(features);
  d.labels = load_labels(labels);
  if (!masks.empty()) d.masks = load_masks(masks);
  if (d.features.rows() != d.graph.num_nodes() || d.labels.size() != d.graph.num_nodes()) {
    throw InvalidArgument("graph, features and labels disagree on node count");
  }
  if (!d.masks.empty() && d.masks.size() != d.graph.num_nodes()) {
    throw InvalidArgument("mask file length differs from node count");
  }
  return d;
}

inline std::vector<std::size_t> model_dims(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

// Partition whose parts are unions of connected components (so epsilon = 0),
// spreading components round robin over up to k devices.
inline Partition component_partition(const Graph& g, std::size_t k) {
  std::vector<DeviceId> comp(g.num_nodes(), static_cast<DeviceId>(-1));
  DeviceId next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] != static_cast<DeviceId>(-1)) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (comp[v] == static_cast<DeviceId>(-1)) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(k, next));
  for (auto& c : comp) c = static_cast<DeviceId>(c % parts);
  return Partition::from_assignment(parts, comp);
}

}  // namespace detail

// --- partition --------------------------------------------------------------

struct PartitionArgs {
  std::string graph, out;
  std::size_t k = 1;
  double balance_tol = 0.05;
  bool unweighted = false;
  bool expand = false;
  std::vector<std::size_t> budget_bytes;
  std::vector<std::size_t> dims;
  Seed seed = 0;
};

inline int cmd_partition(const PartitionArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest m{"partition"};
  m.inputs = Json{{"graph", a.graph}};
  m.config = Json{{"k", a.k},       {"balance_tol", a.balance_tol}, {"weighted", !a.unweighted},
                  {"expand", a.expand}, {"budget_bytes", a.budget_bytes}, {"dims", a.dims}};
  m.seed = a.seed;

  LoadedGraph lg = load_graph(a.graph);
  if (lg.stats.self_loops_dropped) err << "warning: dropped " << lg.stats.self_loops_dropped << " self-loop(s)\n";
  const Graph& g = lg.graph;
  const Graph gw = a.unweighted ? g.without_weights() : build_weighted_graph(g);
  Partition p = partition_kway(gw, a.k, {a.balance_tol, a.seed, 8});
  const CutMetrics cut = cut_metrics(gw, p);
  const CutMetrics plain = cut_metrics(g, p);

  Json devices = Json::array();
  if (a.expand) {
    CostModel cost{a.dims};
    MemoryBudget budget{a.budget_bytes};
    cost.validate();
    budget.validate(a.k);
    p = expand_all(g, p, cost, budget);
    for (DeviceId d = 0; d < p.k(); ++d) {
      const auto sub = induce_subgraph(g, p.nodes_of(d));
      devices.push_back(Json{{"device", d},
                             {"num_nodes", sub.graph.num_nodes()},
                             {"memory_bytes", memory_estimate(sub.graph, cost, budget)},
                             {"budget_bytes", budget.limit(d)}});
    }
  } else {
    for (DeviceId d = 0; d < p.k(); ++d) devices.push_back(Json{{"device", d}, {"num_nodes", p.nodes_of(d).size()}});
  }
  save_partition(a.out, p);

  Json j = envelope(m);
  j["cut"] = to_json(cut);
  j["unweighted_edge_cut"] = plain.edge_cut;
  j["devices"] = devices;
  j["manifest"] = m.to_json();
  out << j.dump(2) << '\n';
  return kOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string graph, features, labels, masks, metrics_out, model_out;
  std::size_t k = 1, epochs = 200, threads = 0;
  double lr = 0.5, balance_tol = 0.05;
  std::vector<std::size_t> hidden{16};
  bool unweighted = false, expand = false, exclude_halo_loss = false;
  std::vector<std::size_t> budget_bytes;
  Seed seed = 0;
};

inline int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest m{"train"};
  m.inputs = Json{{"graph", a.graph}, {"features", a.features}, {"labels", a.labels}, {"masks", a.masks}};
  m.seed = a.seed;
  const auto data = detail::load_dataset(a.graph, a.features, a.labels, a.masks);

  TrainConfig cfg;
  cfg.k = a.k;
  cfg.epochs = a.epochs;
  cfg.lr = a.lr;
  cfg.balance_tol = a.balance_tol;
  cfg.weighted = !a.unweighted;
  cfg.expand = a.expand;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.halo_in_loss = !a.exclude_halo_loss;
  cfg.layer_dims.layer_dims =
      detail::model_dims(data.features.cols(), a.hidden, static_cast<std::size_t>(data.labels.num_classes));
  cfg.budgets.limits = a.budget_bytes;
  m.config = Json{{"k", cfg.k},
                  {"epochs", cfg.epochs},
                  {"lr", cfg.lr},
                  {"balance_tol", cfg.balance_tol},
                  {"weighted", cfg.weighted},
                  {"expand", cfg.expand},
                  {"budget_bytes", cfg.budgets.limits},
                  {"dims", cfg.layer_dims.layer_dims},
                  {"halo_in_loss", cfg.halo_in_loss},
                  {"mean_loss", cfg.mean_loss}};

  Deployment d = prepare_runs(data.graph, data.features, data.labels, cfg, data.masks);
  const auto errors = train_all(d.runs, cfg);

  Json j = envelope(m);
  Json devices = Json::array();
  for (const auto& r : d.runs) devices.push_back(to_json(r));
  j["devices"] = devices;

  int code = kOk;
  if (!errors.empty()) {
    Json errs = Json::array();
    for (const auto& e : errors) {
      err << "error: " << e.message << '\n';
      errs.push_back(Json{{"device", e.device}, {"message", e.message}});
      code = e.non_finite ? kNonFinite : (code == kOk ? kInfeasible : code);
    }
    j["errors"] = errs;
  } else {
    const EnsembleResult ens = predict_ensemble(data.graph.num_nodes(), data.labels, d.runs, data.masks);
    std::size_t max_mult = 0;
    for (auto c : ens.multiplicity) max_mult = std::max(max_mult, c);
    j["global"] = Json{{"accuracy", to_json(ens.accuracy)},
                       {"jensen", to_json(jensen_gap(data.graph.num_nodes(), data.labels, d.runs))},
                       {"cut", to_json(d.cut)},
                       {"epsilon", block_diagonal_error(data.graph, d.base)},
                       {"max_multiplicity", max_mult}};
    if (!a.model_out.empty()) {
      for (const auto& r : d.runs) save_checkpoint(a.model_out + ".device" + std::to_string(r.device) + ".bin", r.model);
    }
  }
  j["manifest"] = m.to_json();
  detail::write_json_file(a.metrics_out, j);
  out << j.dump(2) << '\n';
  return code;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string graph, features, labels, out;
  std::vector<std::string> probes{"exactness", "activation", "gradient", "jensen", "hoeffding", "convergence"};
  std::vector<std::size_t> hidden{16};
  std::size_t family_size = 6, k = 2, trials = 200, jensen_instances = 100;
  std::vector<std::size_t> m_values{1, 4, 16};
  std::vector<double> deltas{0.05, 0.1, 0.2};
  std::vector<std::size_t> t_grid{50, 100, 200};
  double base_lr = 1.0;
  double corrupt_gradient = 0.0;
  Seed seed = 0;
};

// The default fixture when no dataset is given: a 200-node, 2-block SBM.
inline SbmSpec verify_fixture(Seed seed) { return SbmSpec{2, 100, 0.1, 0.01, 8, 1.0, seed}; }

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  RunManifest m{"verify"};
  m.seed = a.seed;
  sugar::Dataset data;
  if (!a.graph.empty()) {
    data = detail::load_dataset(a.graph, a.features, a.labels, "");
    m.inputs = Json{{"graph", a.graph}, {"features", a.features}, {"labels", a.labels}};
  } else {
    const SbmSpec s = verify_fixture(a.seed);
    data = generate_sbm(s);
    m.inputs = Json{{"synthetic", Json{{"model", "sbm"}, {"blocks", s.blocks}, {"nodes_per_block", s.nodes_per_block},
                                       {"p_in", s.p_in}, {"p_out", s.p_out}, {"feat_dim", s.feat_dim},
                                       {"noise", s.noise}}}};
  }
  const Graph& g = data.graph;
  const auto dims =
      detail::model_dims(data.features.cols(), a.hidden, static_cast<std::size_t>(data.labels.num_classes));
  const GcnModel model = GcnModel::glorot(dims, derive_seed(a.seed, 11));
  m.config = Json{{"probes", a.probes}, {"dims", dims}, {"family_size", a.family_size}, {"k", a.k},
                  {"trials", a.trials}, {"m_values", a.m_values}, {"deltas", a.deltas}, {"t_grid", a.t_grid},
                  {"base_lr", a.base_lr}, {"jensen_instances", a.jensen_instances},
                  {"corrupt_gradient", a.corrupt_gradient}};

  Json probes = Json::object();
  std::vector<std::string> failed;
  auto record = [&](const std::string& name, Json j, bool pass) {
    j["pass"] = pass;
    probes[name] = std::move(j);
    if (!pass) failed.push_back(name);
  };

  std::vector<Partition> family;
  auto need_family = [&]() -> const std::vector<Partition>& {
    if (family.empty()) family = bisection_family(g, a.family_size, derive_seed(a.seed, 12));
    return family;
  };

  for (const auto& name : a.probes) {
    if (name == "exactness") {
      const std::vector<Partition> aligned{Partition::from_assignment(1, std::vector<DeviceId>(g.num_nodes(), 0)),
                                           detail::component_partition(g, std::max<std::size_t>(a.k, 2))};
      const auto act = probe_activation_bound(g, data.features, model, aligned);
      const auto grad = probe_gradient_bound(g, data.features, data.labels, model, aligned, {}, a.corrupt_gradient);
      record(name, Json{{"activation", to_json(act)}, {"gradient", to_json(grad)}},
             act.exact_at_zero && grad.exact_at_zero);
    } else if (name == "activation") {
      const auto p = probe_activation_bound(g, data.features, model, need_family());
      record(name, to_json(p), p.pass);
    } else if (name == "gradient") {
      const auto p = probe_gradient_bound(g, data.features, data.labels, model, need_family(), {}, a.corrupt_gradient);
      record(name, to_json(p), p.pass);
    } else if (name == "jensen") {
      const Graph gw = build_weighted_graph(g);
      double worst = -std::numeric_limits<double>::infinity();
      Rng rng(derive_seed(a.seed, 13));
      for (std::size_t t = 0; t < a.jensen_instances; ++t) {
        const std::size_t k = 2 + rng.below(3);
        const Partition base = partition_kway(gw, k, {0.05, rng.next_u64(), 2});
        const Partition over =
            expand_all(g, base, CostModel{dims}, MemoryBudget{{std::numeric_limits<std::size_t>::max() / 4}});
        std::vector<TrainRun> runs;
        for (DeviceId dv = 0; dv < k; ++dv) {
          const auto sub = induce_subgraph(g, over.nodes_of(dv));
          TrainRun r;
          r.device = dv;
          r.adj = normalize_adjacency(sub.graph);
          r.local_to_global = sub.local_to_global;
          r.features = FeatureMatrix(sub.local_to_global.size(), data.features.cols());
          for (std::size_t j = 0; j < sub.local_to_global.size(); ++j) {
            std::ranges::copy(data.features.row(sub.local_to_global[j]), r.features.row(j).begin());
          }
          r.model = GcnModel::glorot(dims, rng.next_u64());
          runs.push_back(std::move(r));
        }
        worst = std::max(worst, jensen_gap(g.num_nodes(), data.labels, runs).max_node_violation);
      }
      record(name, Json{{"instances", a.jensen_instances}, {"max_node_violation", worst}}, worst <= 1e-12);
    } else if (name == "hoeffding") {
      const auto p = probe_hoeffding(g, a.k, a.m_values, a.deltas, a.trials, derive_seed(a.seed, 14));
      record(name, to_json(p), p.pass);
    } else if (name == "convergence") {
      const Partition part = partition_kway(build_weighted_graph(g), a.k, {0.05, derive_seed(a.seed, 15), 8});
      const auto p = probe_convergence(g, data.features, data.labels, part, dims, a.t_grid, a.base_lr,
                                       derive_seed(a.seed, 16));
      record(name, to_json(p), p.pass);
    } else {
      throw InvalidArgument("unknown probe '" + name + "'");
    }
  }

  Json j = envelope(m);
  j["probes"] = probes;
  j["failed"] = failed;
  j["pass"] = failed.empty();
  j["manifest"] = m.to_json();
  if (!a.out.empty()) detail::write_json_file(a.out, j);
  out << j.dump(2) << '\n';
  for (const auto& f : failed) err << "probe failed: " << f << '\n';
  return failed.empty() ? kOk : kProbeFailed;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string graph, features, labels;
  std::size_t nodes = 50000, classes = 8, feat_dim = 32, epochs = 5;
  double avg_degree = 10.0;
  std::vector<std::size_t> dims;  // full widths; default [F, 64, C]
  std::vector<std::size_t> k_list{1, 2, 4, 8};
  Seed seed = 0;
};

// Synthetic benchmark graph: an SBM with `classes` equal blocks and 80% of
// the expected degree inside the block.
inline SbmSpec bench_fixture(std::size_t nodes, std::size_t classes, std::size_t feat_dim, double avg_degree,
                             Seed seed) {
  const std::size_t per_block = std::max<std::size_t>(1, nodes / classes);
  const double inside = static_cast<double>(per_block - 1);
  const double outside = static_cast<double>(per_block * (classes - 1));
  SbmSpec s{classes, per_block, 0.8 * avg_degree / std::max(1.0, inside),
            outside > 0 ? 0.2 * avg_degree / outside : 0.0, feat_dim, 1.0, seed};
  return s;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream&) {
  RunManifest m{"bench"};
  m.seed = a.seed;
  sugar::Dataset data;
  if (!a.graph.empty()) {
    data = detail::load_dataset(a.graph, a.features, a.labels, "");
    m.inputs = Json{{"graph", a.graph}, {"features", a.features}, {"labels", a.labels}};
  } else {
    const SbmSpec s = bench_fixture(a.nodes, a.classes, a.feat_dim, a.avg_degree, a.seed);
    data = generate_sbm(s);
    m.inputs = Json{{"synthetic", Json{{"model", "sbm"}, {"blocks", s.blocks}, {"nodes_per_block", s.nodes_per_block},
                                       {"p_in", s.p_in}, {"p_out", s.p_out}, {"feat_dim", s.feat_dim}}}};
  }
  std::vector<std::size_t> dims = a.dims;
  const auto f = data.features.cols();
  const auto c = static_cast<std::size_t>(data.labels.num_classes);
  if (dims.empty()) dims = {f, 64, c};
  if (dims.size() < 2 || dims.front() != f || dims.back() != c) {
    throw InvalidArgument("--dims must start with the feature width and end with the class count");
  }
  m.config = Json{{"dims", dims}, {"k_list", a.k_list}, {"epochs", a.epochs}};

  MemoryBudget bytes{{1}};
  const std::size_t full = memory_estimate(data.graph, CostModel{dims}, bytes);
  const auto rows = bench_scaling(data.graph, data.features, data.labels, dims, a.k_list, a.epochs, a.seed);
  Json j = envelope(m);
  j["num_nodes"] = data.graph.num_nodes();
  j["num_edges"] = data.graph.num_edges();
  j["full_memory_bytes"] = full;
  Json table = Json::array();
  for (const auto& r : rows) table.push_back(to_json(r));
  j["rows"] = table;
  j["manifest"] = m.to_json();
  out << j.dump(2) << '\n';
  return kOk;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string model = "sbm", out_prefix;
  SbmSpec spec;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  if (a.model != "sbm") throw InvalidArgument("only --model sbm is supported");
  if (a.spec.p_in <= a.spec.p_out) err << "warning: p-in <= p-out, communities are not assortative\n";
  RunManifest m{"synth"};
  m.seed = a.spec.seed;
  m.config = Json{{"model", a.model},   {"blocks", a.spec.blocks}, {"nodes_per_block", a.spec.nodes_per_block},
                  {"p_in", a.spec.p_in}, {"p_out", a.spec.p_out},  {"feat_dim", a.spec.feat_dim},
                  {"noise", a.spec.noise}};
  const sugar::Dataset d = generate_sbm(a.spec);
  const std::string files[4] = {a.out_prefix + ".edges", a.out_prefix + ".features.csv",
                                a.out_prefix + ".labels.csv", a.out_prefix + ".masks.csv"};
  {
    auto f = sugar::detail::open_out(files[0]);
    write_edge_list(f, d.graph);
  }
  {
    auto f = sugar::detail::open_out(files[1]);
    write_features(f, d.features);
  }
  {
    auto f = sugar::detail::open_out(files[2]);
    write_labels(f, d.labels);
  }
  {
    auto f = sugar::detail::open_out(files[3]);
    write_masks(f, d.masks);
  }
  Json j = envelope(m);
  j["files"] = Json{{"graph", files[0]}, {"features", files[1]}, {"labels", files[2]}, {"masks", files[3]}};
  j["num_nodes"] = d.graph.num_nodes();
  j["num_edges"] = d.graph.num_edges();
  j["manifest"] = m.to_json();
  out << j.dump(2) << '\n';
  return kOk;
}

// --- dispatch ---------------------------------------------------------------

template <typename Fn>
int guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const NonFiniteLoss& e) {
    err << "error: " << e.what() << '\n';
    return kNonFinite;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  }
}

// Parses `args` (without the program name) and runs the selected command.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SUGAR: partitioned, communication-free GCN training", "sugar"};
  app.require_subcommand(1);

  PartitionArgs pa;
  auto* part = app.add_subcommand("partition", "partition a graph into k device subgraphs");
  part->add_option("--graph", pa.graph, "edge-list file")->required();
  part->add_option("--k", pa.k, "number of devices")->required();
  part->add_option("--balance-tol", pa.balance_tol, "node-count imbalance tolerance");
  part->add_flag("--unweighted,!--weighted", pa.unweighted, "partition the unweighted graph");
  part->add_flag("--expand", pa.expand, "expand subgraphs within the memory budget");
  part->add_option("--budget-bytes", pa.budget_bytes, "per-device budget (one value or k values)")->delimiter(',');
  part->add_option("--dims", pa.dims, "model layer widths F0,...,FL for the memory model")->delimiter(',');
  part->add_option("--seed", pa.seed);
  part->add_option("--out", pa.out, "partition output file")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "train one local GCN per device and evaluate the ensemble");
  train->add_option("--graph", ta.graph)->required();
  train->add_option("--features", ta.features)->required();
  train->add_option("--labels", ta.labels)->required();
  train->add_option("--masks", ta.masks, "0/1/2 train/val/test split per node");
  train->add_option("--k", ta.k);
  train->add_option("--epochs", ta.epochs);
  train->add_option("--lr", ta.lr);
  train->add_option("--hidden", ta.hidden, "hidden layer widths")->delimiter(',');
  train->add_option("--balance-tol", ta.balance_tol);
  train->add_flag("--unweighted,!--weighted", ta.unweighted);
  train->add_flag("--expand", ta.expand);
  train->add_option("--budget-bytes", ta.budget_bytes)->delimiter(',');
  train->add_flag("--exclude-halo-loss", ta.exclude_halo_loss, "leave expansion-added nodes out of the loss");
  train->add_option("--threads", ta.threads, "worker threads (default SUGAR_THREADS or all cores)");
  train->add_option("--seed", ta.seed);
  train->add_option("--metrics-out", ta.metrics_out)->required();
  train->add_option("--model-out", ta.model_out, "checkpoint prefix; writes PREFIX.deviceK.bin");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run numerical probes of the approximation theory");
  verify->add_option("--graph", va.graph);
  verify->add_option("--features", va.features);
  verify->add_option("--labels", va.labels);
  verify->add_option("--probes", va.probes, "exactness,activation,gradient,jensen,hoeffding,convergence")
      ->delimiter(',');
  verify->add_option("--hidden", va.hidden)->delimiter(',');
  verify->add_option("--family-size", va.family_size);
  verify->add_option("--k", va.k);
  verify->add_option("--trials", va.trials);
  verify->add_option("--m-values", va.m_values)->delimiter(',');
  verify->add_option("--deltas", va.deltas)->delimiter(',');
  verify->add_option("--t-grid", va.t_grid)->delimiter(',');
  verify->add_option("--base-lr", va.base_lr);
  verify->add_option("--jensen-instances", va.jensen_instances);
  verify->add_option("--corrupt-gradient", va.corrupt_gradient, "test hook: perturb the SG gradient");
  verify->add_option("--seed", va.seed);
  verify->add_option("--out", va.out);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "per-K timing and memory table");
  bench->add_option("--graph", ba.graph);
  bench->add_option("--features", ba.features);
  bench->add_option("--labels", ba.labels);
  bench->add_option("--nodes", ba.nodes);
  bench->add_option("--avg-degree", ba.avg_degree);
  bench->add_option("--classes", ba.classes);
  bench->add_option("--feat-dim", ba.feat_dim);
  bench->add_option("--dims", ba.dims)->delimiter(',');
  bench->add_option("--k-list", ba.k_list)->delimiter(',');
  bench->add_option("--epochs", ba.epochs);
  bench->add_option("--seed", ba.seed);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--model", sa.model);
  synth->add_option("--blocks", sa.spec.blocks);
  synth->add_option("--nodes-per-block", sa.spec.nodes_per_block);
  synth->add_option("--p-in", sa.spec.p_in);
  synth->add_option("--p-out", sa.spec.p_out);
  synth->add_option("--feat-dim", sa.spec.feat_dim);
  synth->add_option("--noise", sa.spec.noise);
  synth->add_option("--seed", sa.spec.seed);
  synth->add_option("--out-prefix", sa.out_prefix)->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInfeasible;
  }

  if (*part) return guarded([&] { return cmd_partition(pa, out, err); }, err);
  if (*train) return guarded([&] { return cmd_train(ta, out, err); }, err);
  if (*verify) return guarded([&] { return cmd_verify(va, out, err); }, err);
  if (*bench) return guarded([&] { return cmd_bench(ba, out, err); }, err);
  if (*synth) return guarded([&] { return cmd_synth(sa, out, err); }, err);
  return kInfeasible;
}

}  // namespace sugar::cli

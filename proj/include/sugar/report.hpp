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

// JSON views of results. Keys ending in "_ms" and the "timestamps" object
// carry wall-clock data; strip_timing() removes them so that reports of
// identical runs compare byte for byte.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sugar/bench.hpp"
#include "sugar/partition.hpp"
#include "sugar/trainer.hpp"
#include "sugar/verifier.hpp"

namespace sugar {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

inline Json to_json(const CutMetrics& m) {
  return Json{{"edge_cut", m.edge_cut}, {"weighted_cut", m.weighted_cut}, {"balance", m.balance}};
}

inline Json to_json(const SplitAccuracy& a) {
  return Json{{"train", a.train}, {"val", a.val}, {"test", a.test}, {"all", a.all}};
}

inline Json to_json(const JensenGap& j) {
  return Json{{"lhs", j.lhs},
              {"rhs", j.rhs},
              {"rhs_per_node", j.rhs_per_node},
              {"max_node_violation", j.max_node_violation}};
}

inline Json to_json(const TrainRun& r) {
  std::size_t halo = 0;
  for (char h : r.is_halo) halo += h;
  return Json{{"device", r.device},
              {"num_nodes", r.local_to_global.size()},
              {"halo_nodes", halo},
              {"memory_bytes", r.memory_bytes},
              {"epoch_losses", r.epoch_losses},
              {"epoch_grad_norms", r.epoch_grad_norms},
              {"epoch_ms", r.epoch_ms}};
}

inline Json to_json(const ActivationProbe& p) {
  return Json{{"epsilon", p.epsilon},
              {"z_error", p.z_error},
              {"h_error", p.h_error},
              {"fit_member", p.fit_member},
              {"fitted_c", p.fitted_c},
              {"max_ratio", p.max_ratio},
              {"within_bound", p.within_bound},
              {"closed_form_bound", p.closed_form_bound},
              {"closed_form_ok", p.closed_form_ok},
              {"exact_at_zero", p.exact_at_zero},
              {"pass", p.pass}};
}

inline Json to_json(const GradientProbe& p) {
  return Json{{"epsilon", p.epsilon},
              {"grad_error", p.grad_error},
              {"fit_member", p.fit_member},
              {"fitted_c", p.fitted_c},
              {"max_ratio", p.max_ratio},
              {"within_bound", p.within_bound},
              {"exact_at_zero", p.exact_at_zero},
              {"pass", p.pass}};
}

inline Json to_json(const HoeffdingProbe& p) {
  Json pts = Json::array();
  for (const auto& x : p.points) {
    pts.push_back(Json{{"m", x.m},
                       {"delta", x.delta},
                       {"empirical", x.empirical},
                       {"std_error", x.std_error},
                       {"bound", x.bound},
                       {"mean_epsilon", x.mean_epsilon},
                       {"pass", x.pass}});
  }
  return Json{{"trials", p.trials}, {"points", pts}, {"pass", p.pass}};
}

inline Json to_json(const ConvergenceProbe& p) {
  Json pts = Json::array();
  for (const auto& x : p.points) {
    pts.push_back(Json{{"epochs", x.epochs},
                       {"lr", x.lr},
                       {"min_grad_norm_sq", x.min_grad_norm_sq},
                       {"final_loss", x.final_loss},
                       {"diverged", x.diverged}});
  }
  return Json{{"points", pts}, {"pass", p.pass}};
}

inline Json to_json(const ScalingRow& r) {
  return Json{{"k", r.k},
              {"max_epoch_ms", r.max_epoch_ms},
              {"device_epoch_ms", r.device_epoch_ms},
              {"max_memory_bytes", r.max_memory_bytes},
              {"device_memory_bytes", r.device_memory_bytes},
              {"cut", to_json(r.cut)},
              {"partition_ms", r.partition_ms}};
}

inline bool is_timing_key(const std::string& key) {
  return key == "timestamps" || (key.size() >= 3 && key.compare(key.size() - 3, 3, "_ms") == 0);
}

inline Json strip_timing(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!is_timing_key(it.key())) out[it.key()] = strip_timing(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

}  // namespace sugar

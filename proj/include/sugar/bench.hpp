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
#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "sugar/partition.hpp"
#include "sugar/trainer.hpp"

namespace sugar {

struct ScalingRow {
  std::size_t k = 0;
  std::vector<double> device_epoch_ms;  // median epoch time per device
  double max_epoch_ms = 0;
  std::vector<std::size_t> device_memory_bytes;
  std::size_t max_memory_bytes = 0;
  CutMetrics cut;
  double partition_ms = 0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Per-K cost of local training. Devices are timed one after another on the
// calling thread so that they do not compete for cores.
inline std::vector<ScalingRow> bench_scaling(const Graph& g, const FeatureMatrix& x, const LabelVector& y,
                                             std::span<const std::size_t> dims, std::span<const std::size_t> k_list,
                                             std::size_t epochs, Seed seed, double lr = 0.05) {
  std::vector<ScalingRow> rows;
  for (std::size_t k : k_list) {
    TrainConfig cfg;
    cfg.k = k;
    cfg.epochs = epochs;
    cfg.lr = lr;
    cfg.seed = seed;
    cfg.layer_dims.layer_dims.assign(dims.begin(), dims.end());
    ScalingRow row;
    row.k = k;
    const auto t0 = std::chrono::steady_clock::now();
    Deployment d = prepare_runs(g, x, y, cfg);
    row.partition_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    row.cut = d.cut;
    for (auto& run : d.runs) {
      train_local(run, cfg);
      row.device_epoch_ms.push_back(median(run.epoch_ms));
      row.device_memory_bytes.push_back(run.memory_bytes);
    }
    row.max_epoch_ms = *std::max_element(row.device_epoch_ms.begin(), row.device_epoch_ms.end());
    row.max_memory_bytes = *std::max_element(row.device_memory_bytes.begin(), row.device_memory_bytes.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sugar

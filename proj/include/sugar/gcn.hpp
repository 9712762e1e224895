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
#include <span>
#include <string>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/graph.hpp"
#include "sugar/matrix.hpp"
#include "sugar/rng.hpp"

namespace sugar {

enum class Activation { kRelu };

// L-layer GCN. weights[l] has shape F_l x F_{l+1}. ReLU between layers, no
// activation after the last one: its output feeds softmax cross-entropy.
struct GcnModel {
  std::vector<Matrix> weights;
  Activation activation = Activation::kRelu;

  std::size_t num_layers() const noexcept { return weights.size(); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    if (weights.empty()) return d;
    d.push_back(weights.front().rows());
    for (const auto& w : weights) d.push_back(w.cols());
    return d;
  }

  void validate() const {
    if (weights.empty()) throw InvalidArgument("model has no layers");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows() == 0 || weights[l].cols() == 0) throw InvalidArgument("empty weight matrix");
      if (l > 0 && weights[l].rows() != weights[l - 1].cols()) {
        throw InvalidArgument("layer " + std::to_string(l) + " input width does not chain");
      }
      if (!all_finite(weights[l])) throw InvalidArgument("non-finite model weight");
    }
  }

  // Glorot-uniform initialization, U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  static GcnModel glorot(std::span<const std::size_t> dims, Seed seed) {
    if (dims.size() < 2) throw InvalidArgument("model needs at least two layer widths");
    Rng rng(seed);
    GcnModel m;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      if (dims[l] == 0 || dims[l + 1] == 0) throw InvalidArgument("layer widths must be >= 1");
      const double a = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
      Matrix w(dims[l], dims[l + 1]);
      for (double& v : w.values()) v = rng.uniform(-a, a);
      m.weights.push_back(std::move(w));
    }
    return m;
  }

  friend bool operator==(const GcnModel&, const GcnModel&) = default;
};

// Everything backward() needs from a forward pass.
struct ForwardTrace {
  std::vector<Matrix> inputs;      // H^(0) = X, ..., H^(L-1)
  std::vector<Matrix> aggregated;  // A H^(l) for each layer
  std::vector<Matrix> pre;         // Z^(1), ..., Z^(L)

  const Matrix& logits() const { return pre.back(); }
};

struct GradientSet {
  std::vector<Matrix> grads;  // dL/dW^(l), shaped like the weights
};

inline Matrix relu(const Matrix& z) {
  Matrix h = z;
  for (double& v : h.values()) v = v < 0.0 ? 0.0 : v;  // NaN passes through
  return h;
}

inline ForwardTrace forward(const NormalizedAdjacency& adj, const FeatureMatrix& x, const GcnModel& model) {
  if (model.weights.empty()) throw InvalidArgument("model has no layers");
  if (x.cols() != model.weights.front().rows()) {
    throw InvalidArgument("feature width " + std::to_string(x.cols()) + " != model input width " +
                          std::to_string(model.weights.front().rows()));
  }
  if (adj.num_nodes() != x.rows()) throw InvalidArgument("adjacency size differs from feature rows");

  ForwardTrace t;
  const std::size_t layers = model.num_layers();
  t.inputs.reserve(layers);
  t.aggregated.reserve(layers);
  t.pre.reserve(layers);
  t.inputs.push_back(x);
  for (std::size_t l = 0; l < layers; ++l) {
    t.aggregated.push_back(adj.multiply(t.inputs.back()));
    t.pre.push_back(matmul(t.aggregated.back(), model.weights[l]));
    if (l + 1 < layers) t.inputs.push_back(relu(t.pre.back()));
  }
  return t;
}

// Row-wise softmax with max subtraction.
inline Matrix softmax_rows(const Matrix& z) {
  Matrix s(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto in = z.row(i);
    auto out = s.row(i);
    const double m = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) sum += (out[c] = std::exp(in[c] - m));
    for (double& v : out) v /= sum;
  }
  return s;
}

// -log softmax(z)_y via log-sum-exp.
inline double cross_entropy(std::span<const double> logits, int label) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - m);
  return m + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

namespace detail {

inline void check_loss_inputs(const Matrix& z, const LabelVector& labels, std::span<const double> w) {
  if (labels.size() != z.rows() || w.size() != z.rows()) {
    throw InvalidArgument("loss: logits, labels and node weights must have equal length");
  }
  if (static_cast<std::size_t>(labels.num_classes) != z.cols()) {
    throw InvalidArgument("loss: class count differs from logit width");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] < 0 || labels.labels[i] >= labels.num_classes) {
      throw RangeError("label of node " + std::to_string(i) + " out of range");
    }
  }
}

}  // namespace detail

// sum_i w_i * CE(softmax(z_i), y_i)
inline double loss(const Matrix& z, const LabelVector& labels, std::span<const double> node_weights) {
  detail::check_loss_inputs(z, labels, node_weights);
  double total = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (node_weights[i] == 0.0) continue;
    total += node_weights[i] * cross_entropy(z.row(i), labels.labels[i]);
  }
  return total;
}

// dL/dZ^(L) = w_i * (softmax(z_i) - onehot(y_i))
inline Matrix loss_gradient(const Matrix& z, const LabelVector& labels, std::span<const double> node_weights) {
  detail::check_loss_inputs(z, labels, node_weights);
  Matrix g = softmax_rows(z);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    g(i, static_cast<std::size_t>(labels.labels[i])) -= 1.0;
    for (double& v : g.row(i)) v *= node_weights[i];
  }
  return g;
}

// Chain rule through the trace: dW^(l) = (A H^(l))^T dZ^(l+1) and
// dZ^(l) = relu'(Z^(l)) o (A dZ^(l+1) W^(l)^T), using A^T = A.
inline GradientSet backward(const NormalizedAdjacency& adj, const ForwardTrace& trace, const LabelVector& labels,
                            std::span<const double> node_weights, const GcnModel& model) {
  const std::size_t layers = model.num_layers();
  if (trace.pre.size() != layers || trace.aggregated.size() != layers || trace.inputs.size() != layers) {
    throw InvalidArgument("trace does not match model depth");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (trace.aggregated[l].cols() != model.weights[l].rows() || trace.pre[l].cols() != model.weights[l].cols() ||
        trace.pre[l].rows() != adj.num_nodes()) {
      throw InvalidArgument("stale trace: shapes differ from model/adjacency");
    }
  }

  GradientSet out;
  out.grads.resize(layers);
  Matrix dz = loss_gradient(trace.logits(), labels, node_weights);
  for (std::size_t l = layers; l-- > 0;) {
    out.grads[l] = matmul_tn(trace.aggregated[l], dz);
    if (l == 0) break;
    Matrix dh = adj.multiply(matmul_nt(dz, model.weights[l]));
    const Matrix& z_prev = trace.pre[l - 1];
    auto dv = dh.values();
    auto zv = z_prev.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
      if (zv[i] <= 0.0) dv[i] = 0.0;  // relu'(0) = 0
    }
    dz = std::move(dh);
  }
  return out;
}

inline void apply_sgd(GcnModel& model, const GradientSet& grads, double lr) {
  if (grads.grads.size() != model.weights.size()) throw InvalidArgument("gradient/model depth mismatch");
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (!grads.grads[l].same_shape(model.weights[l])) throw InvalidArgument("gradient/model shape mismatch");
    auto w = model.weights[l].values();
    auto g = grads.grads[l].values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
  }
}

// W^(l) <- W^(l) - lr * dL/dW^(l)
inline GcnModel sgd_step(GcnModel model, const GradientSet& grads, double lr) {
  apply_sgd(model, grads, lr);
  return model;
}

inline double max_abs(const GradientSet& g) {
  double m = 0.0;
  for (const auto& x : g.grads) m = std::max(m, max_abs(x));
  return m;
}

inline double max_abs_diff(const GradientSet& a, const GradientSet& b) {
  if (a.grads.size() != b.grads.size()) throw InvalidArgument("gradient sets differ in depth");
  double m = 0.0;
  for (std::size_t l = 0; l < a.grads.size(); ++l) m = std::max(m, max_abs_diff(a.grads[l], b.grads[l]));
  return m;
}

inline double frobenius_sq(const GradientSet& g) {
  double s = 0.0;
  for (const auto& x : g.grads) s += frobenius_sq(x);
  return s;
}

}  // namespace sugar

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

// Text and binary file formats.
//
//   edge list   first line "N M", then M lines "u v" (0-based ids)
//   features    CSV, one row of F reals per node, no header
//   labels      one integer class id per line
//   masks       one split id per line: 0 train, 1 val, 2 test
//   partition   one line per node: "node_id device_id[,device_id...]"
//   checkpoint  u64 L, u64 dims[L+1], then each W^(l) row-major as f64
//               (host byte order)

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sugar/error.hpp"
#include "sugar/gcn.hpp"
#include "sugar/graph.hpp"
#include "sugar/matrix.hpp"
#include "sugar/partition.hpp"

namespace sugar {

enum class GraphFormat { kEdgeList };

enum class Split : int { kTrain = 0, kVal = 1, kTest = 2 };

struct LoadedGraph {
  Graph graph;
  Graph::BuildStats stats;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits on spaces/tabs, dropping empty tokens.
inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  tok = trim(tok);
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("invalid " + std::string(what) + " '" + std::string(tok) + "'", line);
  }
  return value;
}

inline std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline LoadedGraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_content_line()) throw ParseError("missing header line \"N M\"", 1);
  auto header = detail::split_ws(line);
  if (header.size() != 2) throw ParseError("header must be \"N M\"", lineno);
  const auto n = detail::parse_number<std::uint64_t>(header[0], lineno, "node count");
  const auto m = detail::parse_number<std::uint64_t>(header[1], lineno, "edge count");

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(m);
  for (std::uint64_t e = 0; e < m; ++e) {
    if (!next_content_line()) {
      throw ParseError("expected " + std::to_string(m) + " edges, found " + std::to_string(e), lineno + 1);
    }
    auto tok = detail::split_ws(line);
    if (tok.size() != 2) throw ParseError("edge line must be \"u v\"", lineno);
    const auto u = detail::parse_number<std::uint64_t>(tok[0], lineno, "node id");
    const auto v = detail::parse_number<std::uint64_t>(tok[1], lineno, "node id");
    if (u >= n || v >= n) {
      throw RangeError("node id " + std::to_string(std::max(u, v)) + " >= N = " + std::to_string(n) +
                       " (line " + std::to_string(lineno) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  if (next_content_line()) throw ParseError("trailing content after the declared edges", lineno);
  LoadedGraph out;
  out.graph = Graph::from_edges(n, edges, &out.stats);
  return out;
}

inline LoadedGraph load_graph(const std::string& path, GraphFormat format = GraphFormat::kEdgeList) {
  (void)format;
  auto in = detail::open_in(path);
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (v > u) out << u << ' ' << v << '\n';
    }
  }
}

inline FeatureMatrix read_features(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      const auto tok = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      const double v = detail::parse_number<double>(tok, lineno, "feature value");
      if (!std::isfinite(v)) throw ParseError("non-finite feature value", lineno);
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw ParseError("row has " + std::to_string(count) + " values, expected " +
                                            std::to_string(cols), lineno);
    ++rows;
  }
  return FeatureMatrix(rows, cols, std::move(values));
}

inline FeatureMatrix load_features(const std::string& path) {
  auto in = detail::open_in(path);
  return read_features(in);
}

namespace detail {

inline std::vector<int> read_int_lines(std::istream& in, const char* what) {
  std::vector<int> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    out.push_back(parse_number<int>(line, lineno, what));
  }
  return out;
}

}  // namespace detail

// num_classes is 1 + the largest label seen unless given explicitly.
inline LabelVector read_labels(std::istream& in, int num_classes = 0) {
  LabelVector y;
  y.labels = detail::read_int_lines(in, "label");
  int max_label = -1;
  for (int l : y.labels) {
    if (l < 0) throw RangeError("negative label");
    max_label = std::max(max_label, l);
  }
  y.num_classes = num_classes > 0 ? num_classes : max_label + 1;
  y.validate();
  return y;
}

inline LabelVector load_labels(const std::string& path, int num_classes = 0) {
  auto in = detail::open_in(path);
  return read_labels(in, num_classes);
}

inline std::vector<Split> read_masks(std::istream& in) {
  std::vector<Split> out;
  for (int v : detail::read_int_lines(in, "mask")) {
    if (v < 0 || v > 2) throw RangeError("mask value must be 0, 1 or 2");
    out.push_back(static_cast<Split>(v));
  }
  return out;
}

inline std::vector<Split> load_masks(const std::string& path) {
  auto in = detail::open_in(path);
  return read_masks(in);
}

inline void write_features(std::ostream& out, const FeatureMatrix& x) {
  std::ostringstream buf;
  buf.precision(17);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) buf << (c ? "," : "") << r[c];
    buf << '\n';
  }
  out << buf.str();
}

inline void write_labels(std::ostream& out, const LabelVector& y) {
  for (int l : y.labels) out << l << '\n';
}

inline void write_masks(std::ostream& out, const std::vector<Split>& masks) {
  for (Split s : masks) out << static_cast<int>(s) << '\n';
}

inline void write_partition(std::ostream& out, const Partition& p) {
  for (NodeId i = 0; i < p.num_nodes(); ++i) {
    out << i << ' ';
    auto devs = p.devices_of(i);
    for (std::size_t d = 0; d < devs.size(); ++d) out << (d ? "," : "") << devs[d];
    out << '\n';
  }
}

// k defaults to 1 + the largest device id seen.
inline Partition read_partition(std::istream& in, std::size_t k = 0) {
  std::vector<std::vector<DeviceId>> membership;
  std::string line;
  std::size_t lineno = 0;
  DeviceId max_dev = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError("partition line must be \"node devices\"", lineno);
    const auto node = detail::parse_number<std::uint64_t>(tok[0], lineno, "node id");
    if (node != membership.size()) throw ParseError("node ids must be listed in order", lineno);
    std::vector<DeviceId> devs;
    std::string_view list = tok[1];
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = list.find(',', start);
      const auto d = detail::parse_number<DeviceId>(
          list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start), lineno,
          "device id");
      max_dev = std::max(max_dev, d);
      devs.push_back(d);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    membership.push_back(std::move(devs));
  }
  const std::size_t parts = k ? k : (membership.empty() ? 0 : std::size_t{max_dev} + 1);
  return Partition::from_membership(parts, std::move(membership));
}

inline void save_partition(const std::string& path, const Partition& p) {
  auto out = detail::open_out(path);
  write_partition(out, p);
}

inline Partition load_partition(const std::string& path, std::size_t k = 0) {
  auto in = detail::open_in(path);
  return read_partition(in, k);
}

inline void write_checkpoint(std::ostream& out, const GcnModel& model) {
  auto put = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  put(model.num_layers());
  for (auto d : model.dims()) put(d);
  for (const auto& w : model.weights) {
    out.write(reinterpret_cast<const char*>(w.values().data()),
              static_cast<std::streamsize>(w.size() * sizeof(double)));
  }
  if (!out) throw IoError("failed writing checkpoint");
}

inline GcnModel read_checkpoint(std::istream& in) {
  auto get = [&]() {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated checkpoint header", 0);
    return v;
  };
  const std::uint64_t layers = get();
  if (layers == 0 || layers > 1024) throw ParseError("implausible layer count in checkpoint", 0);
  std::vector<std::uint64_t> dims(layers + 1);
  for (auto& d : dims) d = get();
  GcnModel m;
  for (std::uint64_t l = 0; l < layers; ++l) {
    Matrix w(dims[l], dims[l + 1]);
    if (!in.read(reinterpret_cast<char*>(w.values().data()), static_cast<std::streamsize>(w.size() * sizeof(double)))) {
      throw ParseError("truncated checkpoint weights", 0);
    }
    m.weights.push_back(std::move(w));
  }
  m.validate();
  return m;
}

inline void save_checkpoint(const std::string& path, const GcnModel& m) {
  auto out = detail::open_out(path, std::ios::binary);
  write_checkpoint(out, m);
}

inline GcnModel load_checkpoint(const std::string& path) {
  auto in = detail::open_in(path, std::ios::binary);
  return read_checkpoint(in);
}

}  // namespace sugar

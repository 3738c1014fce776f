// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "contentlink/common.hpp"

namespace contentlink {

enum class GraphKind { content, social };

inline std::string_view to_string(GraphKind k) { return k == GraphKind::content ? "content" : "social"; }

struct Edge {
  std::string u;  // u < v
  std::string v;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected, loop-free graph over user ids with strictly positive weights.
/// Edges are stored once under their (min, max) endpoint pair, so iteration
/// order is lexicographic and independent of insertion order.
class WeightedGraph {
 public:
  using EdgeKey = std::pair<std::string, std::string>;

  WeightedGraph() = default;
  explicit WeightedGraph(GraphKind kind, std::string label = {}) : kind_(kind), label_(std::move(label)) {}

  GraphKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  void add_node(const std::string& id) { nodes_.insert(id); }

  /// Inserts or overwrites the edge {u, v}. Endpoints are added as nodes.
  void set_edge(const std::string& u, const std::string& v, double weight) {
    if (u == v) throw Error("self-loop: " + u);
    if (!(weight > 0.0)) throw Error("non-positive edge weight: " + u + " " + v);
    nodes_.insert(u);
    nodes_.insert(v);
    edges_[key(u, v)] = weight;
  }

  bool has_node(const std::string& id) const { return nodes_.contains(id); }
  bool has_edge(const std::string& u, const std::string& v) const { return edges_.contains(key(u, v)); }

  /// 0 when the edge is absent.
  double weight(const std::string& u, const std::string& v) const {
    auto it = edges_.find(key(u, v));
    return it == edges_.end() ? 0.0 : it->second;
  }

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::map<EdgeKey, double>& edge_map() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [k, w] : edges_) out.push_back({k.first, k.second, w});
    return out;
  }

  double total_weight() const {
    double m = 0.0;
    for (const auto& [k, w] : edges_) m += w;
    return m;
  }

  /// Induced subgraph on `keep`; ids absent from this graph are ignored.
  WeightedGraph induced(const std::set<std::string>& keep) const {
    WeightedGraph out(kind_, label_);
    for (const auto& n : keep)
      if (nodes_.contains(n)) out.add_node(n);
    for (const auto& [k, w] : edges_)
      if (keep.contains(k.first) && keep.contains(k.second)) out.edges_.emplace(k, w);
    return out;
  }

  WeightedGraph without_isolated_nodes() const {
    WeightedGraph out(kind_, label_);
    for (const auto& [k, w] : edges_) out.set_edge(k.first, k.second, w);
    return out;
  }

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

  static EdgeKey key(const std::string& u, const std::string& v) {
    return u < v ? EdgeKey{u, v} : EdgeKey{v, u};
  }

 private:
  GraphKind kind_ = GraphKind::content;
  std::string label_;
  std::set<std::string> nodes_;
  std::map<EdgeKey, double> edges_;
};

// Text dump:
//   #graph <TAB> content|social <TAB> label
//   <node>                       one line per node (the node manifest)
//   <u> <TAB> <v> <TAB> <weight> one line per edge
// Weights use the shortest round-trip decimal form, so dump/load is lossless.

inline void write_graph(std::ostream& os, const WeightedGraph& g) {
  os << "#graph\t" << to_string(g.kind()) << '\t' << g.label() << '\n';
  for (const auto& n : g.nodes()) os << n << '\n';
  for (const auto& [k, w] : g.edge_map()) os << k.first << '\t' << k.second << '\t' << format_real(w) << '\n';
}

inline WeightedGraph read_graph(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("malformed graph dump: empty input");
  auto header = split_fields(strip_cr(line), '\t');
  if (header.size() < 2 || header[0] != "#graph" || (header[1] != "content" && header[1] != "social"))
    throw Error("malformed graph dump: bad header");
  WeightedGraph g(header[1] == "content" ? GraphKind::content : GraphKind::social,
                  header.size() > 2 ? std::string(header[2]) : std::string());
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    auto view = strip_cr(line);
    if (view.empty()) continue;
    auto f = split_fields(view, '\t');
    if (f.size() == 1) {
      g.add_node(std::string(f[0]));
    } else if (f.size() == 3) {
      auto w = parse_real(f[2]);
      if (!w) throw Error("malformed graph dump: bad weight on line " + std::to_string(lineno));
      g.set_edge(std::string(f[0]), std::string(f[1]), *w);
    } else {
      throw Error("malformed graph dump: line " + std::to_string(lineno));
    }
  }
  return g;
}

}  // namespace contentlink

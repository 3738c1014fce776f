// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "contentlink/common.hpp"
#include "contentlink/weighted_graph.hpp"

namespace contentlink {

/// Hard assignment of nodes to communities. Community ids are dense from 0
/// and canonical: numbered in order of first appearance when nodes are
/// visited in id order, so equal groupings compare equal.
class Partition {
 public:
  Partition() = default;

  template <class Label>
  static Partition from_labels(const std::map<std::string, Label>& labels) {
    Partition p;
    std::map<Label, std::size_t> dense;
    for (const auto& [node, label] : labels) {
      auto [it, inserted] = dense.emplace(label, dense.size());
      p.assignment_.emplace(node, it->second);
    }
    p.count_ = dense.size();
    return p;
  }

  static Partition from_groups(const std::vector<std::vector<std::string>>& groups) {
    std::map<std::string, std::size_t> labels;
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (const auto& n : groups[g])
        if (!labels.emplace(n, g).second) throw Error("node assigned twice: " + n);
    return from_labels(labels);
  }

  static Partition single_community(const std::set<std::string>& nodes) {
    std::map<std::string, int> labels;
    for (const auto& n : nodes) labels.emplace(n, 0);
    return from_labels(labels);
  }

  static Partition singletons(const std::set<std::string>& nodes) {
    std::map<std::string, std::size_t> labels;
    std::size_t i = 0;
    for (const auto& n : nodes) labels.emplace(n, i++);
    return from_labels(labels);
  }

  const std::map<std::string, std::size_t>& assignment() const { return assignment_; }
  std::size_t community_of(const std::string& node) const {
    auto it = assignment_.find(node);
    if (it == assignment_.end()) throw Error("node not in partition: " + node);
    return it->second;
  }
  std::size_t community_count() const { return count_; }
  std::size_t size() const { return assignment_.size(); }
  bool contains(const std::string& node) const { return assignment_.contains(node); }

  std::set<std::string> nodes() const {
    std::set<std::string> out;
    for (const auto& [n, c] : assignment_) out.insert(n);
    return out;
  }

  std::vector<std::vector<std::string>> communities() const {
    std::vector<std::vector<std::string>> out(count_);
    for (const auto& [n, c] : assignment_) out[c].push_back(n);
    return out;
  }

  /// The partition induced on `keep` (ids renumbered densely).
  Partition restricted(const std::set<std::string>& keep) const {
    std::map<std::string, std::size_t> labels;
    for (const auto& [n, c] : assignment_)
      if (keep.contains(n)) labels.emplace(n, c);
    return from_labels(labels);
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::map<std::string, std::size_t> assignment_;
  std::size_t count_ = 0;
};

/// Weighted multi-community modularity:
///   Q = 1/(2m) * sum_ij (A_ij - k_i k_j / 2m) [s_i == s_j]
inline double modularity(const WeightedGraph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw Error("partition does not cover the graph");
  for (const auto& n : g.nodes())
    if (!p.contains(n)) throw Error("partition does not cover the graph: " + n);
  const double m = g.total_weight();
  if (!(m > 0.0)) throw Error("undefined modularity");
  std::vector<double> inside(p.community_count(), 0.0);
  std::vector<double> degree(p.community_count(), 0.0);
  for (const auto& [k, w] : g.edge_map()) {
    auto cu = p.community_of(k.first);
    auto cv = p.community_of(k.second);
    degree[cu] += w;
    degree[cv] += w;
    if (cu == cv) inside[cu] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < inside.size(); ++c) {
    double frac = degree[c] / (2.0 * m);
    q += inside[c] / m - frac * frac;
  }
  return q;
}

namespace detail {

// Compact graph for one Louvain level. `loop[i]` is the summed A_ij over
// ordered pairs inside super-node i (twice the internal edge weight).
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

inline LevelGraph level_graph(const WeightedGraph& g, const std::vector<std::string>& ids) {
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
  LevelGraph lg;
  lg.adj.resize(ids.size());
  lg.loop.assign(ids.size(), 0.0);
  lg.degree.assign(ids.size(), 0.0);
  for (const auto& [k, w] : g.edge_map()) {
    auto a = index.at(k.first), b = index.at(k.second);
    lg.adj[a].emplace_back(b, w);
    lg.adj[b].emplace_back(a, w);
    lg.degree[a] += w;
    lg.degree[b] += w;
    lg.two_m += 2.0 * w;
  }
  return lg;
}

// Renumbers `membership` densely in order of first appearance; returns the count.
inline std::uint32_t renumber(std::vector<std::uint32_t>& membership) {
  std::vector<std::int64_t> dense(membership.size(), -1);
  std::uint32_t next = 0;
  for (auto& c : membership) {
    if (dense[c] < 0) dense[c] = next++;
    c = static_cast<std::uint32_t>(dense[c]);
  }
  return next;
}

inline LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& membership, std::uint32_t count) {
  LevelGraph out;
  out.adj.resize(count);
  out.loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::uint32_t, double>> acc(count);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    auto ci = membership[i];
    out.loop[ci] += g.loop[i];
    out.degree[ci] += g.degree[i];
    for (const auto& [j, w] : g.adj[i]) {
      auto cj = membership[j];
      if (ci == cj) {
        out.loop[ci] += w;
      } else {
        acc[ci][cj] += w;
      }
    }
  }
  for (std::uint32_t c = 0; c < count; ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
  return out;
}

// Moves single nodes between communities while some move raises Q by more
// than `tolerance`. Returns whether anything moved.
inline bool local_moves(const LevelGraph& g, std::vector<std::uint32_t>& membership, std::mt19937_64& rng,
                        double tolerance) {
  const std::size_t n = g.size();
  if (n == 0 || g.two_m <= 0.0) return false;
  const double m = g.two_m / 2.0;
  std::vector<double> tot(n, 0.0);
  std::vector<std::uint32_t> members(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    tot[membership[i]] += g.degree[i];
    ++members[membership[i]];
  }
  std::vector<std::uint32_t> empty;
  for (std::uint32_t c = static_cast<std::uint32_t>(n); c-- > 0;)
    if (members[c] == 0) empty.push_back(c);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  for (int sweep = 0; sweep < 10000; ++sweep) {
    bool moved = false;
    for (auto i : order) {
      const auto old = membership[i];
      const double k = g.degree[i];
      touched.clear();
      for (const auto& [j, w] : g.adj[i]) {
        auto c = membership[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[old] -= k;
      --members[old];
      // Scaled gain of inserting i into c: link_c - tot_c * k / 2m. The change
      // in Q from moving old -> c is (gain_c - gain_old) / m.
      auto gain = [&](std::uint32_t c) { return link[c] - tot[c] * k / g.two_m; };
      std::uint32_t best = old;
      double best_gain = gain(old);
      for (auto c : touched) {
        double gc = gain(c);
        if ((gc - best_gain) / m > tolerance) {
          best = c;
          best_gain = gc;
        }
      }
      if (members[old] > 0 && (0.0 - best_gain) / m > tolerance && !empty.empty()) {
        best = empty.back();
        best_gain = 0.0;
      }
      if (best != old && !empty.empty() && best == empty.back()) empty.pop_back();
      tot[best] += k;
      ++members[best];
      membership[i] = best;
      if (members[old] == 0 && best != old) empty.push_back(old);
      for (auto c : touched) link[c] = 0.0;
      if (best != old) moved = true;
    }
    if (!moved) break;
    any = true;
  }
  return any;
}

inline std::vector<std::uint32_t> identity_membership(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0U);
  return v;
}

}  // namespace detail

inline constexpr double kModularityTolerance = 1e-9;

namespace detail {

// One Louvain run. With `random_start`, nodes begin in a random partition
// into at most sqrt(n) groups instead of singletons.
inline std::vector<std::uint32_t> louvain_once(const LevelGraph& base, std::uint64_t seed, bool random_start) {
  std::mt19937_64 rng(seed);
  auto membership = identity_membership(base.size());
  if (random_start && base.size() > 1) {
    auto groups = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(base.size()))));
    std::uniform_int_distribution<std::uint32_t> pick(0, groups - 1);
    for (auto& c : membership) c = pick(rng);
  }
  for (int round = 0; round < 100; ++round) {
    bool moved = local_moves(base, membership, rng, kModularityTolerance);
    auto count = renumber(membership);
    auto level = aggregate(base, membership, count);
    while (true) {
      auto sub = identity_membership(level.size());
      if (!local_moves(level, sub, rng, kModularityTolerance)) break;
      moved = true;
      auto sub_count = renumber(sub);
      for (auto& c : membership) c = sub[c];
      level = aggregate(level, sub, sub_count);
    }
    if (!moved) break;
  }
  return membership;
}

inline double level_modularity(const LevelGraph& g, const std::vector<std::uint32_t>& membership) {
  std::vector<double> in(g.size(), 0.0), tot(g.size(), 0.0);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    tot[membership[i]] += g.degree[i];
    for (const auto& [j, w] : g.adj[i])
      if (membership[j] == membership[i]) in[membership[i]] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) q += in[c] / g.two_m - (tot[c] / g.two_m) * (tot[c] / g.two_m);
  return q;
}

}  // namespace detail

inline constexpr int kDefaultLouvainRestarts = 16;

/// BGLL/Louvain modularity maximization. Each round runs local node moves on
/// the input graph (starting from the current partition), then repeatedly
/// aggregates communities into super-nodes and moves those, until no move
/// anywhere raises Q by more than 1e-9. Visit order is shuffled from `seed`.
/// The whole procedure runs `restarts` times with derived seeds and the
/// partition with the highest Q is returned (the earliest on ties).
inline Partition louvain(const WeightedGraph& g, std::uint64_t seed, int restarts = kDefaultLouvainRestarts) {
  if (g.node_count() == 0 || !(g.total_weight() > 0.0)) throw Error("undefined modularity");
  if (restarts < 1) throw Error("louvain restarts must be positive");
  std::vector<std::string> ids(g.nodes().begin(), g.nodes().end());
  const auto base = detail::level_graph(g, ids);

  std::vector<std::uint32_t> best;
  double best_q = 0.0;
  for (int r = 0; r < restarts; ++r) {
    auto membership = detail::louvain_once(base, r == 0 ? seed : derive_seed(seed, "restart", r), r % 2 == 1);
    double q = detail::level_modularity(base, membership);
    if (best.empty() || q > best_q + kModularityTolerance) {
      best = std::move(membership);
      best_q = q;
    }
  }

  std::map<std::string, std::uint32_t> labels;
  for (std::size_t i = 0; i < ids.size(); ++i) labels.emplace(ids[i], best[i]);
  return Partition::from_labels(labels);
}

inline constexpr std::size_t kBruteForceNodeLimit = 10;

/// Exhaustive modularity maximization over all set partitions (restricted
/// growth strings). The first maximizer in enumeration order wins, so the
/// coarsest of tied optima is preferred. Test oracle for small graphs.
inline std::pair<Partition, double> brute_force_max_modularity(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  if (n > kBruteForceNodeLimit) throw Error("oracle limit");
  const double m = g.total_weight();
  if (n == 0 || !(m > 0.0)) throw Error("undefined modularity");
  std::vector<std::string> ids(g.nodes().begin(), g.nodes().end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(ids[i], i);
  struct E {
    std::size_t a, b;
    double w;
  };
  std::vector<E> edges;
  std::vector<double> degree(n, 0.0);
  for (const auto& [k, w] : g.edge_map()) {
    edges.push_back({index.at(k.first), index.at(k.second), w});
    degree[index.at(k.first)] += w;
    degree[index.at(k.second)] += w;
  }

  std::vector<std::size_t> rgs(n, 0), prefix_max(n, 0);
  std::vector<std::size_t> best = rgs;
  double best_q = -std::numeric_limits<double>::infinity();
  std::vector<double> inside(n), tot(n);
  while (true) {
    std::fill(inside.begin(), inside.end(), 0.0);
    std::fill(tot.begin(), tot.end(), 0.0);
    for (const auto& e : edges)
      if (rgs[e.a] == rgs[e.b]) inside[rgs[e.a]] += e.w;
    for (std::size_t i = 0; i < n; ++i) tot[rgs[i]] += degree[i];
    double q = 0.0;
    for (std::size_t c = 0; c < n; ++c) q += inside[c] / m - (tot[c] / (2.0 * m)) * (tot[c] / (2.0 * m));
    if (q > best_q + 1e-12) {
      best_q = q;
      best = rgs;
    }
    // Next restricted growth string: rgs[i] <= 1 + max(rgs[0..i-1]).
    std::size_t i = n;
    while (i-- > 1) {
      if (rgs[i] <= prefix_max[i - 1]) break;
    }
    if (i == 0 || i >= n) break;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
  std::map<std::string, std::size_t> labels;
  for (std::size_t i = 0; i < n; ++i) labels.emplace(ids[i], best[i]);
  auto p = Partition::from_labels(labels);
  return {p, modularity(g, p)};
}

// Partition dump: one "node <TAB> community" line per node.

inline void write_partition(std::ostream& os, const Partition& p) {
  for (const auto& [n, c] : p.assignment()) os << n << '\t' << c << '\n';
}

inline Partition read_partition(std::istream& is) {
  std::map<std::string, std::size_t> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto v = strip_cr(line);
    if (v.empty()) continue;
    auto f = split_fields(v, '\t');
    std::size_t c = 0;
    if (f.size() != 2 || f[0].empty() || std::from_chars(f[1].data(), f[1].data() + f[1].size(), c).ec != std::errc())
      throw Error("malformed partition dump: line " + std::to_string(lineno));
    if (!labels.emplace(std::string(f[0]), c).second) throw Error("node assigned twice: " + std::string(f[0]));
  }
  return Partition::from_labels(labels);
}

}  // namespace contentlink

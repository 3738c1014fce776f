// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contentlink/common.hpp"
#include "contentlink/corpus.hpp"
#include "contentlink/ngram.hpp"
#include "contentlink/weighted_graph.hpp"

namespace contentlink {

struct PairCost {
  std::string u;
  std::string v;
  double cost = 0.0;
};

/// Turns pairwise dissimilarities into similarity weights: w = max cost - cost,
/// with the maximum taken over the given pairs. Pairs at the maximum get
/// weight 0 and are left out.
inline WeightedGraph graph_from_pair_costs(const std::set<std::string>& participants,
                                           const std::vector<PairCost>& costs, std::string label) {
  WeightedGraph g(GraphKind::content, std::move(label));
  for (const auto& u : participants) g.add_node(u);
  if (costs.empty()) return g;
  double max_cost = costs.front().cost;
  for (const auto& c : costs) max_cost = std::max(max_cost, c.cost);
  for (const auto& c : costs) {
    double w = max_cost - c.cost;
    if (w > 0.0) g.set_edge(c.u, c.v, w);
  }
  return g;
}

/// Symmetrized cross-entropy for every unordered participant pair:
/// ce(u, v) = (H(d_v under l_u) + H(d_u under l_v)) / 2.
inline std::vector<PairCost> pairwise_cross_entropy(const std::set<std::string>& participants,
                                                    const std::map<std::string, NGramModel>& models,
                                                    const std::map<std::string, Document>& docs) {
  std::vector<std::string> users(participants.begin(), participants.end());
  for (const auto& u : users) {
    if (!models.contains(u)) throw Error("missing model for participant " + u);
    auto it = docs.find(u);
    if (it == docs.end() || it->second.empty()) throw Error("missing or empty document for participant " + u);
  }
  std::vector<PairCost> out;
  out.reserve(users.size() * (users.size() - (users.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& mi = models.at(users[i]);
    const auto& di = docs.at(users[i]);
    for (std::size_t j = i + 1; j < users.size(); ++j) {
      double ce = 0.5 * (cross_entropy(mi, docs.at(users[j])) + cross_entropy(models.at(users[j]), di));
      out.push_back({users[i], users[j], ce});
    }
  }
  return out;
}

/// Content graph for an n-gram model within one scope (an event or a topic).
inline WeightedGraph build_ngram_edges(const std::set<std::string>& participants,
                                       const std::map<std::string, NGramModel>& models,
                                       const std::map<std::string, Document>& docs, std::string label = "ngram") {
  if (participants.size() < 2) {
    warn("content graph '" + label + "' has fewer than 2 participants");
    WeightedGraph g(GraphKind::content, std::move(label));
    for (const auto& u : participants) g.add_node(u);
    return g;
  }
  return graph_from_pair_costs(participants, pairwise_cross_entropy(participants, models, docs), std::move(label));
}

/// Topic-model content graph. Event scope (topic == nullopt): weight is the
/// dot product of the two theta vectors. Topic scope: only users with
/// theta[k] > 1/K take part and the weight is theta_u[k] * theta_v[k].
inline WeightedGraph build_lda_edges(const std::set<std::string>& participants,
                                     const std::map<std::string, std::vector<double>>& thetas,
                                     std::optional<int> topic = std::nullopt, std::string label = "lda") {
  std::optional<std::size_t> K;
  for (const auto& u : participants) {
    auto it = thetas.find(u);
    if (it == thetas.end()) throw Error("missing topic vector for participant " + u);
    if (K && *K != it->second.size()) throw Error("mismatched topic count");
    K = it->second.size();
  }
  if (topic && K && (*topic < 0 || static_cast<std::size_t>(*topic) >= *K)) throw Error("topic index out of range");

  std::vector<std::string> users;
  for (const auto& u : participants)
    if (!topic || thetas.at(u)[*topic] > 1.0 / static_cast<double>(*K)) users.push_back(u);

  WeightedGraph g(GraphKind::content, std::move(label));
  for (const auto& u : users) g.add_node(u);
  for (std::size_t i = 0; i < users.size(); ++i) {
    const auto& a = thetas.at(users[i]);
    for (std::size_t j = i + 1; j < users.size(); ++j) {
      const auto& b = thetas.at(users[j]);
      double w = 0.0;
      if (topic) {
        w = a[*topic] * b[*topic];
      } else {
        for (std::size_t k = 0; k < a.size(); ++k) w += a[k] * b[k];
      }
      if (w > 0.0) g.set_edge(users[i], users[j], w);
    }
  }
  return g;
}

/// Number of edges kept by top-`percent` retention of `edge_count` edges.
inline std::size_t retained_edge_count(std::size_t edge_count, double percent) {
  if (!(percent > 0.0) || percent > 100.0) throw Error("retention percent must be in (0, 100]");
  // The small slack absorbs representation error in products like 0.07 * 100.
  double exact = percent * static_cast<double>(edge_count) / 100.0;
  auto keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return std::min(std::max<std::size_t>(keep, edge_count > 0 ? 1 : 0), edge_count);
}

/// Keeps the ceil(percent/100 * |E|) heaviest edges; ties at the cut go to the
/// lexicographically smaller (u, v) pair. Every node is kept.
inline WeightedGraph retain_top_k_percent(const WeightedGraph& g, double percent) {
  auto keep = retained_edge_count(g.edge_count(), percent);
  if (g.edge_count() == 0) throw Error("retention on a graph without edges");
  auto edges = g.edges();
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.weight > b.weight; });
  WeightedGraph out(g.kind(), g.label());
  for (const auto& n : g.nodes()) out.add_node(n);
  for (std::size_t i = 0; i < keep; ++i) out.set_edge(edges[i].u, edges[i].v, edges[i].weight);
  return out;
}

/// Same topology, every weight set to 1.
inline WeightedGraph binarize(const WeightedGraph& g) {
  WeightedGraph out(g.kind(), g.label());
  for (const auto& n : g.nodes()) out.add_node(n);
  for (const auto& [k, w] : g.edge_map()) out.set_edge(k.first, k.second, 1.0);
  return out;
}

/// Followership graph induced on `participants`, unit weights. Participants
/// missing from the social graph appear as isolated nodes.
inline WeightedGraph social_subgraph(const WeightedGraph& social, const std::set<std::string>& participants) {
  WeightedGraph out(GraphKind::social, social.label());
  for (const auto& u : participants) out.add_node(u);
  if (participants.size() < social.node_count()) {
    std::vector<std::string> users(participants.begin(), participants.end());
    for (std::size_t i = 0; i < users.size(); ++i)
      for (std::size_t j = i + 1; j < users.size(); ++j)
        if (social.has_edge(users[i], users[j])) out.set_edge(users[i], users[j], 1.0);
  } else {
    for (const auto& [k, w] : social.edge_map())
      if (participants.contains(k.first) && participants.contains(k.second)) out.set_edge(k.first, k.second, 1.0);
  }
  return out;
}

}  // namespace contentlink

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "contentlink/contentlink.hpp"

namespace contentlink::testing {

inline std::string node_name(std::size_t i) { return "n" + std::to_string(i); }

/// Erdos-Renyi graph with uniform edge weights in [w_lo, w_hi].
inline WeightedGraph random_graph(std::size_t n, double p, std::mt19937_64& rng, double w_lo = 0.5,
                                  double w_hi = 2.0) {
  WeightedGraph g(GraphKind::content, "random");
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> weight(w_lo, w_hi);
  for (std::size_t i = 0; i < n; ++i) g.add_node(node_name(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) g.set_edge(node_name(i), node_name(j), weight(rng));
  return g;
}

/// Disjoint cliques of the given sizes, unit weights, optional bridges
/// between consecutive cliques (first node of one to first node of the next).
inline WeightedGraph cliques(const std::vector<std::size_t>& sizes, bool bridged) {
  WeightedGraph g(GraphKind::content, "cliques");
  std::size_t base = 0;
  std::vector<std::size_t> firsts;
  for (auto s : sizes) {
    firsts.push_back(base);
    for (std::size_t i = 0; i < s; ++i) g.add_node(node_name(base + i));
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j) g.set_edge(node_name(base + i), node_name(base + j), 1.0);
    base += s;
  }
  if (bridged)
    for (std::size_t c = 0; c + 1 < firsts.size(); ++c) g.set_edge(node_name(firsts[c]), node_name(firsts[c + 1]), 1.0);
  return g;
}

/// Random partition of `nodes` into at most `k` labelled groups.
inline Partition random_partition(const std::set<std::string>& nodes, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::map<std::string, std::size_t> labels;
  for (const auto& n : nodes) labels[n] = pick(rng);
  return Partition::from_labels(labels);
}

inline std::set<std::string> node_set(std::size_t n) {
  std::set<std::string> s;
  for (std::size_t i = 0; i < n; ++i) s.insert(node_name(i));
  return s;
}

inline Document make_doc(const std::string& owner, const std::vector<std::vector<std::string>>& segments) {
  Document d(owner, DocumentScope::event);
  for (const auto& s : segments) d.append_segment(s);
  return d;
}

struct SynthRun {
  SynthOutput synth;
  IngestResult ingest;
  SocialGraphLoad social;
  GoodnessReport report;
};

/// Generates a corpus and runs the in-memory pipeline over it.
inline SynthRun run_on_synth(const SynthConfig& sc, const PipelineConfig& pc) {
  SynthRun r;
  r.synth = generate(sc);
  r.ingest = ingest_tweets(std::string_view(r.synth.tweets_tsv));
  std::set<std::string> users;
  for (const auto& [id, ev] : r.ingest.events) users.insert(ev.users.begin(), ev.users.end());
  r.social = load_social_graph(std::string_view(r.synth.edges_tsv), users);
  r.report = run_pipeline(pc, r.ingest.events, r.social.graph, default_stopwords());
  return r;
}

}  // namespace contentlink::testing

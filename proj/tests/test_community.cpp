// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "contentlink/community.hpp"
#include "support.hpp"

namespace cl = contentlink;
using cl::testing::cliques;

namespace {

// Two triangles joined by one edge.
cl::WeightedGraph barbell() { return cliques({3, 3}, true); }

// Independent modularity: direct double sum over node pairs.
double modularity_oracle(const cl::WeightedGraph& g, const cl::Partition& p) {
  std::map<std::string, double> k;
  for (const auto& e : g.edges()) {
    k[e.u] += e.weight;
    k[e.v] += e.weight;
  }
  const double two_m = 2.0 * g.total_weight();
  double q = 0;
  for (const auto& i : g.nodes())
    for (const auto& j : g.nodes()) {
      if (p.community_of(i) != p.community_of(j)) continue;
      double a = i == j ? 0.0 : g.weight(i, j);
      q += a - k[i] * k[j] / two_m;
    }
  return q / two_m;
}

}  // namespace

TEST(Modularity, Barbell) {
  auto g = barbell();
  auto split = cl::Partition::from_groups({{"n0", "n1", "n2"}, {"n3", "n4", "n5"}});
  EXPECT_NEAR(cl::modularity(g, split), 0.357142857, 1e-9);
  EXPECT_NEAR(cl::modularity(g, cl::Partition::single_community(g.nodes())), 0.0, 1e-15);
}

TEST(Modularity, SingletonFormula) {
  std::mt19937_64 rng(1);
  auto g = cl::testing::random_graph(12, 0.4, rng);
  std::map<std::string, double> k;
  for (const auto& e : g.edges()) {
    k[e.u] += e.weight;
    k[e.v] += e.weight;
  }
  double expect = 0;
  for (const auto& [n, d] : k) expect -= (d / (2 * g.total_weight())) * (d / (2 * g.total_weight()));
  EXPECT_NEAR(cl::modularity(g, cl::Partition::singletons(g.nodes())), expect, 1e-12);
}

TEST(Modularity, MatchesPairSumOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = cl::testing::random_graph(10, 0.4, rng);
    if (g.edge_count() == 0) continue;
    auto p = cl::testing::random_partition(g.nodes(), 4, rng);
    EXPECT_NEAR(cl::modularity(g, p), modularity_oracle(g, p), 1e-12);
  }
}

TEST(Modularity, ScaleInvariant) {
  std::mt19937_64 rng(3);
  auto g = cl::testing::random_graph(15, 0.3, rng);
  cl::WeightedGraph scaled(g.kind());
  for (const auto& n : g.nodes()) scaled.add_node(n);
  for (const auto& e : g.edges()) scaled.set_edge(e.u, e.v, 7.5 * e.weight);
  for (int t = 0; t < 10; ++t) {
    auto p = cl::testing::random_partition(g.nodes(), 3, rng);
    EXPECT_NEAR(cl::modularity(g, p), cl::modularity(scaled, p), 1e-12);
  }
}

TEST(Modularity, Errors) {
  cl::WeightedGraph g(cl::GraphKind::content);
  g.add_node("a");
  g.add_node("b");
  try {
    cl::modularity(g, cl::Partition::single_community(g.nodes()));
    FAIL();
  } catch (const cl::Error& e) {
    EXPECT_STREQ(e.what(), "undefined modularity");
  }
  g.set_edge("a", "b", 1.0);
  EXPECT_THROW(cl::modularity(g, cl::Partition::single_community({"a"})), cl::Error);
}

TEST(Louvain, BarbellSplit) {
  auto g = barbell();
  auto p = cl::louvain(g, 1);
  EXPECT_EQ(p.community_count(), 2U);
  EXPECT_EQ(p.community_of("n0"), p.community_of("n2"));
  EXPECT_NE(p.community_of("n0"), p.community_of("n3"));
  EXPECT_NEAR(cl::modularity(g, p), 0.357142857, 1e-9);
}

TEST(Louvain, CompleteGraphIsOneCommunity) {
  auto g = cliques({5}, false);
  auto p = cl::louvain(g, 1);
  EXPECT_EQ(p.community_count(), 1U);
  EXPECT_NEAR(cl::modularity(g, p), 0.0, 1e-12);
  EXPECT_NEAR(cl::brute_force_max_modularity(g).second, 0.0, 1e-12);
}

TEST(Louvain, DisjointCliquesRecovered) {
  auto g = cliques({4, 4}, false);
  auto p = cl::louvain(g, 3);
  EXPECT_EQ(p, cl::Partition::from_groups({{"n0", "n1", "n2", "n3"}, {"n4", "n5", "n6", "n7"}}));
  EXPECT_NEAR(cl::modularity(g, p), 0.5, 1e-12);
}

TEST(Louvain, SingleEdge) {
  cl::WeightedGraph g(cl::GraphKind::content);
  g.set_edge("a", "b", 1.0);
  auto p = cl::louvain(g, 1);
  EXPECT_EQ(p.community_count(), 1U);
  EXPECT_NEAR(cl::modularity(g, cl::Partition::singletons(g.nodes())), -0.5, 1e-12);
}

TEST(Louvain, IsolatedNodesAreSingletons) {
  auto g = cliques({3, 3}, false);
  g.add_node("x");
  g.add_node("y");
  auto p = cl::louvain(g, 5);
  EXPECT_EQ(p.size(), 8U);
  EXPECT_EQ(p.community_count(), 4U);
  EXPECT_NE(p.community_of("x"), p.community_of("y"));
}

TEST(Louvain, DeterministicForSeed) {
  std::mt19937_64 rng(4);
  auto g = cl::testing::random_graph(60, 0.1, rng);
  EXPECT_EQ(cl::louvain(g, 99), cl::louvain(g, 99));
  EXPECT_EQ(cl::louvain(g, 99, 1), cl::louvain(g, 99, 1));
}

TEST(Louvain, LocallyOptimal) {
  // No single node move to another existing community or to a fresh
  // singleton raises Q by more than the move tolerance.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = cl::testing::random_graph(30, 0.15, rng);
    if (g.edge_count() == 0) continue;
    auto p = cl::louvain(g, trial);
    const double q = cl::modularity(g, p);
    auto labels = p.assignment();
    for (const auto& n : g.nodes()) {
      const auto own = labels.at(n);
      for (std::size_t c = 0; c <= p.community_count(); ++c) {
        if (c == own) continue;
        labels[n] = c;
        EXPECT_LE(cl::modularity(g, cl::Partition::from_labels(labels)), q + 1e-9);
      }
      labels[n] = own;
    }
  }
}

TEST(Louvain, NearBruteForceOptimum) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = cl::testing::random_graph(8, 0.45, rng);
    if (g.edge_count() == 0) continue;
    auto [best, q_opt] = cl::brute_force_max_modularity(g);
    EXPECT_NEAR(cl::modularity(g, best), q_opt, 1e-12);
    double q = cl::modularity(g, cl::louvain(g, trial));
    EXPECT_LE(q, q_opt + 1e-9);
    if (q_opt > cl::kModularityTolerance) {
      EXPECT_GE(q, 0.9 * q_opt);
    }
  }
}

TEST(Louvain, Errors) {
  cl::WeightedGraph g(cl::GraphKind::content);
  EXPECT_THROW(cl::louvain(g, 1), cl::Error);
  g.add_node("a");
  EXPECT_THROW(cl::louvain(g, 1), cl::Error);
  g.set_edge("a", "b", 1.0);
  EXPECT_THROW(cl::louvain(g, 1, 0), cl::Error);
}

TEST(BruteForce, Limits) {
  auto big = cliques({11}, false);
  try {
    cl::brute_force_max_modularity(big);
    FAIL();
  } catch (const cl::Error& e) {
    EXPECT_STREQ(e.what(), "oracle limit");
  }
  cl::WeightedGraph empty(cl::GraphKind::content);
  empty.add_node("a");
  EXPECT_THROW(cl::brute_force_max_modularity(empty), cl::Error);
}

TEST(BruteForce, CountsEveryPartition) {
  // Three disjoint edges: the optimum pairs each edge, Q = 2/3.
  cl::WeightedGraph g(cl::GraphKind::content);
  g.set_edge("a", "b", 1.0);
  g.set_edge("c", "d", 1.0);
  g.set_edge("e", "f", 1.0);
  auto [p, q] = cl::brute_force_max_modularity(g);
  EXPECT_NEAR(q, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(p.community_count(), 3U);
}

TEST(Partition, Construction) {
  auto p = cl::Partition::from_labels(std::map<std::string, std::string>{{"a", "x"}, {"b", "y"}, {"c", "x"}});
  EXPECT_EQ(p.community_count(), 2U);
  EXPECT_EQ(p.community_of("a"), p.community_of("c"));
  EXPECT_THROW(p.community_of("zz"), cl::Error);
  EXPECT_THROW(cl::Partition::from_groups({{"a"}, {"a"}}), cl::Error);
  auto r = p.restricted({"a", "b"});
  EXPECT_EQ(r.size(), 2U);
  EXPECT_EQ(r.community_count(), 2U);
}

TEST(Partition, RoundTrip) {
  std::mt19937_64 rng(7);
  auto p = cl::testing::random_partition(cl::testing::node_set(40), 6, rng);
  std::stringstream ss;
  cl::write_partition(ss, p);
  EXPECT_EQ(cl::read_partition(ss), p);
  std::istringstream bad("a\tx\n"), dup("a\t1\na\t2\n");
  EXPECT_THROW(cl::read_partition(bad), cl::Error);
  EXPECT_THROW(cl::read_partition(dup), cl::Error);
}

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/corpus.hpp"

namespace contentlink {

struct LdaParams {
  int topics = 10;
  double alpha = 5.0;  // symmetric doc-topic prior; 50 / topics by convention
  double beta = 0.01;
  int iterations = 1000;
  int inference_iterations = 100;
  std::uint64_t seed = 1;

  static LdaParams with_topics(int k) {
    LdaParams p;
    p.topics = k;
    p.alpha = 50.0 / k;
    return p;
  }
};

/// Fitted topic-word distributions. Immutable once returned by fit_lda.
class TopicModel {
 public:
  int topics() const { return k_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  int iterations() const { return iterations_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& vocabulary() const { return words_; }
  std::size_t vocabulary_size() const { return words_.size(); }

  std::optional<std::uint32_t> word_id(const std::string& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// P(word | topic) by vocabulary id.
  double word_probability(int topic, std::uint32_t word) const {
    return topic_word_[static_cast<std::size_t>(topic) * words_.size() + word];
  }

  std::span<const double> topic_row(int topic) const {
    return std::span<const double>(topic_word_).subspan(static_cast<std::size_t>(topic) * words_.size(),
                                                        words_.size());
  }

  std::vector<std::pair<std::string, double>> top_words(int topic, std::size_t n) const {
    auto row = topic_row(topic);
    std::vector<std::uint32_t> ids(words_.size());
    for (std::uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
    n = std::min(n, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                      [&](auto a, auto b) { return row[a] != row[b] ? row[a] > row[b] : words_[a] < words_[b]; });
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(words_[ids[i]], row[ids[i]]);
    return out;
  }

  /// Top words per topic, for manual inspection.
  nlohmann::json topic_dump(std::size_t n = 20) const {
    nlohmann::json j;
    j["topics"] = k_;
    j["alpha"] = alpha_;
    j["beta"] = beta_;
    j["iterations"] = iterations_;
    j["seed"] = seed_;
    j["vocabulary_size"] = words_.size();
    nlohmann::json arr = nlohmann::json::array();
    for (int k = 0; k < k_; ++k) {
      nlohmann::json words = nlohmann::json::array();
      for (const auto& [w, p] : top_words(k, n)) words.push_back({{"word", w}, {"p", p}});
      arr.push_back({{"topic", k}, {"words", std::move(words)}});
    }
    j["top_words"] = std::move(arr);
    return j;
  }

  friend TopicModel fit_lda(std::span<const Document> docs, const LdaParams& params);

 private:
  int k_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  int iterations_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> topic_word_;  // K x V row-major
};

namespace detail {

inline int sample_discrete(std::span<const double> cumulative, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, cumulative.back());
  double u = unit(rng);
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

}  // namespace detail

/// Collapsed Gibbs sampling over token-topic assignments. The topic-word
/// matrix is read off the final-state counts with beta smoothing. The result
/// depends only on (docs, params).
inline TopicModel fit_lda(std::span<const Document> docs, const LdaParams& params) {
  const int K = params.topics;
  if (K < 2) throw Error("topic count must be at least 2");
  if (!(params.alpha > 0.0) || !(params.beta > 0.0)) throw Error("alpha and beta must be positive");
  if (params.iterations < 1) throw Error("iterations must be positive");
  if (docs.size() < static_cast<std::size_t>(K)) throw Error("insufficient documents: fewer than K");
  for (const auto& d : docs)
    if (d.empty()) throw Error("empty document in topic-model input: " + d.owner());

  TopicModel m;
  m.k_ = K;
  m.alpha_ = params.alpha;
  m.beta_ = params.beta;
  m.iterations_ = params.iterations;
  m.seed_ = params.seed;

  std::set<std::string> vocab;
  for (const auto& d : docs)
    for (const auto& [t, n] : d.counts()) vocab.insert(t);
  if (vocab.size() < static_cast<std::size_t>(K)) throw Error("insufficient vocabulary");
  for (const auto& w : vocab) {
    m.index_.emplace(w, static_cast<std::uint32_t>(m.words_.size()));
    m.words_.push_back(w);
  }
  const std::size_t V = m.words_.size();

  std::vector<std::vector<std::uint32_t>> words(docs.size());
  std::vector<std::vector<int>> z(docs.size());
  std::vector<std::int64_t> n_dk(docs.size() * K, 0);
  std::vector<std::int64_t> n_kw(static_cast<std::size_t>(K) * V, 0);
  std::vector<std::int64_t> n_k(K, 0);

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<int> any_topic(0, K - 1);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    words[d].reserve(docs[d].size());
    for (const auto& t : docs[d].tokens()) words[d].push_back(m.index_.at(t));
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      int k = any_topic(rng);
      z[d][i] = k;
      ++n_dk[d * K + k];
      ++n_kw[static_cast<std::size_t>(k) * V + words[d][i]];
      ++n_k[k];
    }
  }

  const double vbeta = static_cast<double>(V) * params.beta;
  std::vector<double> cumulative(K);
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const auto w = words[d][i];
        int k = z[d][i];
        --n_dk[d * K + k];
        --n_kw[static_cast<std::size_t>(k) * V + w];
        --n_k[k];
        double acc = 0.0;
        for (int t = 0; t < K; ++t) {
          acc += (static_cast<double>(n_dk[d * K + t]) + params.alpha) *
                 (static_cast<double>(n_kw[static_cast<std::size_t>(t) * V + w]) + params.beta) /
                 (static_cast<double>(n_k[t]) + vbeta);
          cumulative[t] = acc;
        }
        k = detail::sample_discrete(cumulative, rng);
        z[d][i] = k;
        ++n_dk[d * K + k];
        ++n_kw[static_cast<std::size_t>(k) * V + w];
        ++n_k[k];
      }
    }
  }

  m.topic_word_.resize(static_cast<std::size_t>(K) * V);
  for (int k = 0; k < K; ++k)
    for (std::size_t w = 0; w < V; ++w)
      m.topic_word_[static_cast<std::size_t>(k) * V + w] =
          (static_cast<double>(n_kw[static_cast<std::size_t>(k) * V + w]) + params.beta) /
          (static_cast<double>(n_k[k]) + vbeta);
  return m;
}

/// Document-topic proportions by Gibbs sampling with the topic-word matrix
/// held fixed: theta[k] = (n_k + alpha) / (N + K alpha) from the final state.
/// A document with no in-vocabulary token yields the uniform vector.
inline std::vector<double> infer_doc_topics(const TopicModel& m, const Document& d, std::uint64_t seed,
                                            int iterations = 100) {
  const int K = m.topics();
  std::vector<std::uint32_t> words;
  for (const auto& t : d.tokens())
    if (auto id = m.word_id(t)) words.push_back(*id);
  if (words.empty()) {
    warn("document '" + d.owner() + "' has no in-vocabulary tokens; using uniform topic vector");
    return std::vector<double>(K, 1.0 / K);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> any_topic(0, K - 1);
  std::vector<int> z(words.size());
  std::vector<std::int64_t> n_k(K, 0);
  for (auto& k : z) {
    k = any_topic(rng);
    ++n_k[k];
  }
  std::vector<double> cumulative(K);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --n_k[z[i]];
      double acc = 0.0;
      for (int t = 0; t < K; ++t) {
        acc += (static_cast<double>(n_k[t]) + m.alpha()) * m.word_probability(t, words[i]);
        cumulative[t] = acc;
      }
      z[i] = detail::sample_discrete(cumulative, rng);
      ++n_k[z[i]];
    }
  }
  std::vector<double> theta(K);
  const double denom = static_cast<double>(words.size()) + K * m.alpha();
  for (int k = 0; k < K; ++k) theta[k] = (static_cast<double>(n_k[k]) + m.alpha()) / denom;
  return theta;
}

/// A user's topic mixture within one event. A topic counts as participated
/// when its probability strictly exceeds the uniform level 1/K.
struct TopicMembership {
  std::string user_id;
  std::string event_id;
  std::vector<double> theta;
  std::vector<int> participating_topics;

  static TopicMembership from_theta(std::string user, std::string event, std::vector<double> theta) {
    TopicMembership m{std::move(user), std::move(event), std::move(theta), {}};
    const double uniform = 1.0 / static_cast<double>(m.theta.size());
    for (std::size_t k = 0; k < m.theta.size(); ++k)
      if (m.theta[k] > uniform) m.participating_topics.push_back(static_cast<int>(k));
    return m;
  }

  bool participates(int k) const {
    return std::find(participating_topics.begin(), participating_topics.end(), k) != participating_topics.end();
  }
};

/// Users whose theta[k] exceeds `threshold` (1/K when not given), strictly.
inline std::set<std::string> topic_participants(std::span<const TopicMembership> memberships, int k,
                                                std::optional<double> threshold = std::nullopt) {
  std::set<std::string> out;
  for (const auto& m : memberships) {
    if (k < 0 || static_cast<std::size_t>(k) >= m.theta.size()) throw Error("topic index out of range");
    const double level = threshold.value_or(1.0 / static_cast<double>(m.theta.size()));
    if (m.theta[k] > level) out.insert(m.user_id);
  }
  return out;
}

/// Unique argmax of theta, or nullopt on a tie for the maximum.
inline std::optional<int> dominant_topic(std::span<const double> theta) {
  if (theta.empty()) return std::nullopt;
  auto it = std::max_element(theta.begin(), theta.end());
  if (std::count(theta.begin(), theta.end(), *it) > 1) return std::nullopt;
  return static_cast<int>(it - theta.begin());
}

/// The user's event document restricted to the tweets whose inferred
/// dominant topic is `k` (topic inference sees stopword-filtered tokens; the
/// retained tweets keep all their tokens). Falls back to the full event
/// document when no tweet qualifies.
inline Document build_topic_document(const EventCorpus& e, const TopicMembership& membership, const TopicModel& m,
                                     int k, const std::set<std::string>& stopwords, std::uint64_t seed,
                                     int inference_iterations = 100) {
  if (!membership.participates(k))
    throw Error("non-participant: " + membership.user_id + " in topic " + std::to_string(k));
  Document out(membership.user_id, DocumentScope::topic);
  std::size_t index = 0;
  for (const auto* t : distinct_tweets_of(e, membership.user_id)) {
    auto tokens = tokenize(t->text);
    Document tweet(t->tweet_id, DocumentScope::topic);
    tweet.append_segment(tokens);
    auto theta = infer_doc_topics(m, tweet.without(stopwords), derive_seed(seed, "tweet", index++),
                                  inference_iterations);
    if (dominant_topic(theta) == k) out.append_segment(tokens);
  }
  if (out.empty()) {
    Document full = build_user_event_document(membership.user_id, e);
    Document fallback(membership.user_id, DocumentScope::topic);
    fallback.append(full);
    return fallback;
  }
  return out;
}

}  // namespace contentlink

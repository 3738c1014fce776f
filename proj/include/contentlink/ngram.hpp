// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/corpus.hpp"

namespace contentlink {

inline constexpr std::string_view kUnknownToken = "<unk>";
inline constexpr std::string_view kBoundaryToken = "<s>";
inline constexpr double kDefaultDelta = 0.01;

// ---------------------------------------------------------------------------
// Discrete distributions (bits)

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

/// D_KL(P || Q) in bits. Both inputs must be probability vectors of equal
/// length (sum 1 within 1e-9) with Q(i) > 0 wherever P(i) > 0.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("distribution length mismatch");
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw Error("negative probability");
    sp += p[i];
    sq += q[i];
  }
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9) throw Error("not a probability distribution");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) throw Error("absolute continuity violated");
    d += p[i] * std::log2(p[i] / q[i]);
  }
  return d;
}

// ---------------------------------------------------------------------------
// N-gram language model

/// Additive-delta smoothed unigram or bigram model over the training
/// vocabulary plus a shared "<unk>" outcome. Bigram contexts are the previous
/// token of the same tweet, or "<s>" at a tweet start.
class NGramModel {
 public:
  int order() const { return order_; }
  double delta() const { return delta_; }
  std::size_t vocabulary_size() const { return words_.size(); }
  const std::vector<std::string>& vocabulary() const { return words_; }

  /// P(token | context). `context` is ignored for unigram models; for bigram
  /// models pass kBoundaryToken at a tweet start.
  double probability(std::string_view token, std::string_view context = kBoundaryToken) const {
    auto w = outcome_id(token);
    if (order_ == 1) return unigram_prob_[w];
    return bigram_prob(context_id(context), w);
  }

  /// Sum of P(t | context) over the full outcome space (vocab and <unk>).
  double context_mass(std::string_view context = kBoundaryToken) const {
    double s = 0.0;
    if (order_ == 1) {
      for (double p : unigram_prob_) s += p;
      return s;
    }
    auto c = context_id(context);
    for (std::uint32_t w = 0; w <= unk_id(); ++w) s += bigram_prob(c, w);
    return s;
  }

  /// Unigram outcome distribution keyed by token, "<unk>" included.
  std::map<std::string, double> unigram_distribution() const {
    if (order_ != 1) throw Error("unigram_distribution on a bigram model");
    std::map<std::string, double> out;
    for (std::uint32_t i = 0; i < words_.size(); ++i) out[words_[i]] = unigram_prob_[i];
    out[std::string(kUnknownToken)] += unigram_prob_[unk_id()];
    return out;
  }

  /// Sum of log2 Q(token | context) over every token position of `d`.
  double log2_likelihood(const Document& d) const {
    double s = 0.0;
    if (order_ == 1) {
      for (const auto& [tok, n] : d.counts()) s += static_cast<double>(n) * unigram_log_[outcome_id(tok)];
      return s;
    }
    for (std::size_t seg = 0; seg < d.segment_count(); ++seg) {
      std::uint32_t ctx = boundary_id();
      for (const auto& tok : d.segment(seg)) {
        auto w = outcome_id(tok);
        s += std::log2(bigram_prob(ctx, w));
        ctx = w;
      }
    }
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["order"] = order_;
    j["delta"] = delta_;
    j["vocabulary_size"] = words_.size();
    if (order_ == 1) {
      nlohmann::json probs = nlohmann::json::object();
      for (const auto& [t, p] : unigram_distribution()) probs[t] = p;
      j["probabilities"] = std::move(probs);
    } else {
      j["bigram_types"] = pair_counts_.size();
    }
    return j;
  }

  friend NGramModel train_ngram(const Document& d, int order, double delta);
  static NGramModel from_unigram_distribution(const std::map<std::string, double>& probs);

 private:
  std::uint32_t unk_id() const { return static_cast<std::uint32_t>(words_.size()); }
  std::uint32_t boundary_id() const { return unk_id() + 1; }
  double outcome_count() const { return static_cast<double>(words_.size() + 1); }

  std::uint32_t outcome_id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? unk_id() : it->second;
  }

  std::uint32_t context_id(std::string_view context) const {
    if (context == kBoundaryToken) return boundary_id();
    return outcome_id(context);
  }

  static std::uint64_t pair_key(std::uint32_t ctx, std::uint32_t w) {
    return (static_cast<std::uint64_t>(ctx) << 32) | w;
  }

  double bigram_prob(std::uint32_t ctx, std::uint32_t w) const {
    auto it = pair_counts_.find(pair_key(ctx, w));
    double c = it == pair_counts_.end() ? 0.0 : it->second;
    return (c + delta_) / (context_totals_[ctx] + delta_ * outcome_count());
  }

  void index_vocabulary(const std::map<std::string, std::size_t>& counts) {
    for (const auto& [tok, n] : counts) {
      index_.emplace(tok, static_cast<std::uint32_t>(words_.size()));
      words_.push_back(tok);
    }
  }

  int order_ = 1;
  double delta_ = kDefaultDelta;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<double> unigram_prob_;  // size V + 1
  std::vector<double> unigram_log_;
  std::unordered_map<std::uint64_t, double> pair_counts_;
  std::vector<double> context_totals_;  // size V + 2 (words, <unk>, <s>)
};

inline NGramModel train_ngram(const Document& d, int order, double delta = kDefaultDelta) {
  if (order != 1 && order != 2) throw Error("unsupported n-gram order: " + std::to_string(order));
  if (!(delta > 0.0)) throw Error("smoothing delta must be positive");
  if (d.empty() || (order == 2 && d.size() < 2)) throw Error("untrainable: " + d.owner());

  NGramModel m;
  m.order_ = order;
  m.delta_ = delta;
  m.index_vocabulary(d.counts());
  if (order == 1) {
    double denom = static_cast<double>(d.size()) + delta * m.outcome_count();
    m.unigram_prob_.assign(m.words_.size() + 1, delta / denom);
    for (const auto& [tok, n] : d.counts())
      m.unigram_prob_[m.index_.at(tok)] = (static_cast<double>(n) + delta) / denom;
    m.unigram_log_.resize(m.unigram_prob_.size());
    for (std::size_t i = 0; i < m.unigram_prob_.size(); ++i) m.unigram_log_[i] = std::log2(m.unigram_prob_[i]);
    return m;
  }
  m.context_totals_.assign(m.words_.size() + 2, 0.0);
  for (std::size_t seg = 0; seg < d.segment_count(); ++seg) {
    std::uint32_t ctx = m.boundary_id();
    for (const auto& tok : d.segment(seg)) {
      auto w = m.index_.at(tok);
      m.pair_counts_[NGramModel::pair_key(ctx, w)] += 1.0;
      m.context_totals_[ctx] += 1.0;
      ctx = w;
    }
  }
  return m;
}

/// Model with explicitly given unigram probabilities (positive, summing to 1).
/// Tokens outside the map fall into "<unk>", which has zero mass unless the
/// map itself contains "<unk>".
inline NGramModel NGramModel::from_unigram_distribution(const std::map<std::string, double>& probs) {
  NGramModel m;
  m.order_ = 1;
  double total = 0.0;
  double unk = 0.0;
  std::map<std::string, std::size_t> keys;
  for (const auto& [tok, p] : probs) {
    if (!(p > 0.0)) throw Error("non-positive probability for " + tok);
    total += p;
    if (tok == kUnknownToken) {
      unk = p;
    } else {
      keys.emplace(tok, 1);
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("not a probability distribution");
  m.index_vocabulary(keys);
  m.unigram_prob_.assign(m.words_.size() + 1, 0.0);
  for (std::uint32_t i = 0; i < m.words_.size(); ++i) m.unigram_prob_[i] = probs.at(m.words_[i]);
  m.unigram_prob_[m.unk_id()] = unk;
  m.unigram_log_.resize(m.unigram_prob_.size());
  for (std::size_t i = 0; i < m.unigram_prob_.size(); ++i) m.unigram_log_[i] = std::log2(m.unigram_prob_[i]);
  return m;
}

/// H(P, Q) in bits per token: the average negative log2-probability that
/// model `q` assigns to the token positions of document `p`. Infinite only
/// for hand-built models that leave an observed token without mass.
inline double cross_entropy(const NGramModel& q, const Document& p) {
  if (p.empty()) throw Error("cross-entropy of an empty document");
  return -q.log2_likelihood(p) / static_cast<double>(p.size());
}

}  // namespace contentlink

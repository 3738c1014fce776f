// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/community.hpp"
#include "contentlink/corpus.hpp"

namespace contentlink {

/// Planted-partition corpus generator settings.
///
/// Users are split evenly into communities; followership edges appear with
/// probability p_in inside a community and p_out across. Half of the word
/// inventory is community vocabulary (one disjoint block per community), the
/// other half is theme vocabulary (one block per event theme, shared by all
/// communities). Every tweet picks one of its author's themes; each token is
/// drawn from the author's community block with probability `community_bias`
/// and from the theme block otherwise. With `subtopics` on, each community
/// block is further split per theme, so a community speaks about each theme
/// with its own sub-vocabulary.
struct SynthConfig {
  std::size_t n_users = 100;
  std::size_t n_communities = 4;
  double p_in = 0.3;
  double p_out = 0.02;
  std::size_t vocab_size = 2000;
  double community_bias = 0.8;
  std::size_t n_events = 1;
  std::size_t topics_per_event = 10;
  std::size_t themes_per_user = 3;
  std::size_t tweets_per_user_min = 10;
  std::size_t tweets_per_user_max = 20;
  std::size_t tokens_per_tweet_min = 8;
  std::size_t tokens_per_tweet_max = 16;
  double zipf_exponent = 1.0;
  bool subtopics = false;
  std::uint64_t seed = 1;

  void validate() const {
    if (n_users == 0 || n_communities == 0 || n_events == 0 || topics_per_event == 0 || themes_per_user == 0)
      throw Error("synth: counts must be positive");
    if (n_communities > n_users) throw Error("synth: more communities than users");
    if (!(p_in > p_out) || p_out < 0.0 || p_in > 1.0) throw Error("synth: need 1 >= p_in > p_out >= 0");
    if (community_bias < 0.0 || community_bias > 1.0) throw Error("synth: community_bias outside [0, 1]");
    if (themes_per_user > topics_per_event) throw Error("synth: themes_per_user exceeds topics_per_event");
    if (tweets_per_user_min == 0 || tweets_per_user_min > tweets_per_user_max)
      throw Error("synth: bad tweets_per_user range");
    if (tokens_per_tweet_min == 0 || tokens_per_tweet_min > tokens_per_tweet_max)
      throw Error("synth: bad tokens_per_tweet range");
    if (community_block_size() < 5 || theme_block_size() < 5)
      throw Error("synth: infeasible config, vocabulary too small to split");
  }

  std::size_t theme_block_size() const { return vocab_size / 2 / (n_events * topics_per_event); }
  std::size_t community_block_size() const {
    return vocab_size / 2 / n_communities / (subtopics ? topics_per_event : 1);
  }

  nlohmann::json to_json() const {
    return {{"n_users", n_users},
            {"n_communities", n_communities},
            {"p_in", p_in},
            {"p_out", p_out},
            {"vocab_size", vocab_size},
            {"community_bias", community_bias},
            {"n_events", n_events},
            {"topics_per_event", topics_per_event},
            {"themes_per_user", themes_per_user},
            {"tweets_per_user_min", tweets_per_user_min},
            {"tweets_per_user_max", tweets_per_user_max},
            {"tokens_per_tweet_min", tokens_per_tweet_min},
            {"tokens_per_tweet_max", tokens_per_tweet_max},
            {"zipf_exponent", zipf_exponent},
            {"subtopics", subtopics},
            {"seed", seed}};
  }

  static SynthConfig from_json(const nlohmann::json& j) {
    SynthConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_users", c.n_users);
    get("n_communities", c.n_communities);
    get("p_in", c.p_in);
    get("p_out", c.p_out);
    get("vocab_size", c.vocab_size);
    get("community_bias", c.community_bias);
    get("n_events", c.n_events);
    get("topics_per_event", c.topics_per_event);
    get("themes_per_user", c.themes_per_user);
    get("tweets_per_user_min", c.tweets_per_user_min);
    get("tweets_per_user_max", c.tweets_per_user_max);
    get("tokens_per_tweet_min", c.tokens_per_tweet_min);
    get("tokens_per_tweet_max", c.tokens_per_tweet_max);
    get("zipf_exponent", c.zipf_exponent);
    get("subtopics", c.subtopics);
    get("seed", c.seed);
    return c;
  }
};

struct SynthOutput {
  std::string tweets_tsv;
  std::string edges_tsv;
  Partition planted;
  std::vector<std::string> events;
};

namespace detail {

// Pronounceable pseudo-word for an index; distinct indices give distinct
// words, and none collides with the default stopword list.
inline std::string pseudo_word(std::size_t index) {
  static constexpr const char* kSyllables[] = {"ka", "lo", "mi", "ru", "te", "vo", "zi", "pa", "ne", "gu",
                                               "sha", "bri", "dor", "fey", "jun", "qui", "wel", "yam", "xo", "cla"};
  constexpr std::size_t base = std::size(kSyllables);
  std::string w;
  std::size_t x = index;
  for (int i = 0; i < 3; ++i) {
    w += kSyllables[x % base];
    x /= base;
  }
  while (x > 0) {
    w += kSyllables[x % base];
    x /= base;
  }
  return w;
}

class ZipfBlock {
 public:
  ZipfBlock(std::vector<std::string> words, double exponent) : words_(std::move(words)) {
    std::vector<double> w(words_.size());
    for (std::size_t r = 0; r < w.size(); ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  }
  const std::string& draw(std::mt19937_64& rng) { return words_[dist_(rng)]; }

 private:
  std::vector<std::string> words_;
  std::discrete_distribution<std::size_t> dist_;
};

}  // namespace detail

/// Generates a tweet file, a followership edge file, and the planted
/// community partition. Output bytes depend only on the config.
inline SynthOutput generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t C = cfg.n_communities;
  const std::size_t T = cfg.topics_per_event;

  std::vector<std::string> users(cfg.n_users);
  std::map<std::string, std::size_t> community;
  const int width = static_cast<int>(std::to_string(cfg.n_users).size());
  for (std::size_t i = 0; i < cfg.n_users; ++i) {
    auto id = std::to_string(i);
    users[i] = "u" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
    community[users[i]] = i * C / cfg.n_users;
  }

  SynthOutput out;
  out.planted = Partition::from_labels(community);

  // Followership: one directed record per undirected pair, random direction.
  std::ostringstream edges;
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < users.size(); ++i)
    for (std::size_t j = i + 1; j < users.size(); ++j) {
      double p = community[users[i]] == community[users[j]] ? cfg.p_in : cfg.p_out;
      if (std::bernoulli_distribution(p)(rng)) {
        if (coin(rng)) {
          edges << users[i] << '\t' << users[j] << '\n';
        } else {
          edges << users[j] << '\t' << users[i] << '\n';
        }
      }
    }
  out.edges_tsv = edges.str();

  // Vocabulary blocks, in word-index order: theme blocks then community blocks.
  const auto& stop = default_stopwords();
  std::size_t next_word = 0;
  auto take = [&](std::size_t n) {
    std::vector<std::string> words;
    while (words.size() < n) {
      auto w = detail::pseudo_word(next_word++);
      if (!stop.contains(w)) words.push_back(std::move(w));
    }
    std::shuffle(words.begin(), words.end(), rng);
    return detail::ZipfBlock(std::move(words), cfg.zipf_exponent);
  };
  std::vector<std::vector<detail::ZipfBlock>> themes(cfg.n_events);
  for (auto& ev : themes)
    for (std::size_t t = 0; t < T; ++t) ev.push_back(take(cfg.theme_block_size()));
  std::vector<std::vector<detail::ZipfBlock>> dialect(C);
  for (auto& blocks : dialect)
    for (std::size_t s = 0; s < (cfg.subtopics ? T : 1); ++s) blocks.push_back(take(cfg.community_block_size()));

  std::ostringstream tweets;
  std::size_t tweet_no = 0;
  std::uniform_int_distribution<std::size_t> n_tweets(cfg.tweets_per_user_min, cfg.tweets_per_user_max);
  std::uniform_int_distribution<std::size_t> n_tokens(cfg.tokens_per_tweet_min, cfg.tokens_per_tweet_max);
  std::bernoulli_distribution from_community(cfg.community_bias);
  for (std::size_t e = 0; e < cfg.n_events; ++e) {
    std::string event = "event" + std::to_string(e);
    out.events.push_back(event);
    for (const auto& u : users) {
      std::vector<std::size_t> all(T);
      std::iota(all.begin(), all.end(), 0U);
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::size_t> mine(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cfg.themes_per_user));
      std::uniform_int_distribution<std::size_t> pick(0, mine.size() - 1);
      const auto c = community[u];
      const std::size_t count = n_tweets(rng);
      for (std::size_t k = 0; k < count; ++k) {
        const auto theme = mine[pick(rng)];
        auto& own = dialect[c][cfg.subtopics ? theme : 0];
        std::string text;
        const std::size_t len = n_tokens(rng);
        for (std::size_t t = 0; t < len; ++t) {
          if (t) text += ' ';
          text += from_community(rng) ? own.draw(rng) : themes[e][theme].draw(rng);
        }
        tweets << 't' << ++tweet_no << '\t' << u << '\t' << event << '\t' << text << '\n';
      }
    }
  }
  out.tweets_tsv = tweets.str();
  return out;
}

}  // namespace contentlink

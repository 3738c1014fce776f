// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/weighted_graph.hpp"

namespace contentlink {

inline constexpr std::string_view kUrlToken = "<url>";
inline constexpr std::string_view kMentionToken = "<mention>";

namespace detail {

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes
// decode as themselves so that no input byte is ever lost.
inline char32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 1;
  char32_t cp = len == 2 ? (b0 & 0x1F) : len == 3 ? (b0 & 0x0F) : (b0 & 0x07);
  for (int k = 1; k < len; ++k) {
    int c = cont(k);
    if (c < 0) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | static_cast<char32_t>(c);
  }
  i += static_cast<std::size_t>(len);
  return len == 1 ? b0 : cp;
}

inline bool is_space(char32_t c) {
  return c == ' ' || (c >= 0x09 && c <= 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

inline bool is_punct(char32_t c) {
  if (c < 0x80) return c != '_' && ((c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
                                    (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E));
  return (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB5 && c != 0xBA) || c == 0xD7 || c == 0xF7 ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x303F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20);
}

inline bool is_handle_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

inline void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  if (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") || starts_with_ci(chunk, "www.")) {
    out.emplace_back(kUrlToken);
    return;
  }
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  std::size_t i = 0;
  while (i < chunk.size()) {
    std::size_t start = i;
    char32_t cp = next_code_point(chunk, i);
    if (cp == '@' && word.empty() && i < chunk.size() && is_handle_char(chunk[i])) {
      while (i < chunk.size() && is_handle_char(chunk[i])) ++i;
      out.emplace_back(kMentionToken);
      continue;
    }
    if (is_punct(cp)) {
      flush();
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') {
      word.push_back(static_cast<char>(cp - 'A' + 'a'));
    } else {
      word.append(chunk.substr(start, i - start));
    }
  }
  flush();
}

}  // namespace detail

/// Microblog tokenizer: lowercases ASCII letters, splits on whitespace and
/// punctuation, maps URLs to "<url>" and @handles to "<mention>", and drops
/// the '#' marker while keeping the hashtag word.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  std::size_t chunk_start = 0;
  bool in_chunk = false;
  while (i < text.size()) {
    std::size_t at = i;
    char32_t cp = detail::next_code_point(text, i);
    if (detail::is_space(cp)) {
      if (in_chunk) detail::tokenize_chunk(text.substr(chunk_start, at - chunk_start), out);
      in_chunk = false;
    } else if (!in_chunk) {
      chunk_start = at;
      in_chunk = true;
    }
  }
  if (in_chunk) detail::tokenize_chunk(text.substr(chunk_start), out);
  return out;
}

struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  std::string text;
  std::set<std::string> hashtags;  // lowercase, without '#'

  friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

struct EventCorpus {
  std::string event_id;
  std::vector<TweetRecord> tweets;
  std::set<std::string> users;

  void add(TweetRecord t) {
    users.insert(t.user_id);
    tweets.push_back(std::move(t));
  }

  std::vector<const TweetRecord*> tweets_of(const std::string& user) const {
    std::vector<const TweetRecord*> out;
    for (const auto& t : tweets)
      if (t.user_id == user) out.push_back(&t);
    return out;
  }

  friend bool operator==(const EventCorpus&, const EventCorpus&) = default;
};

enum class DocumentScope { event, topic };

/// Token multiset with per-tweet segment boundaries. Segments matter only to
/// bigram models, which never form a bigram across two tweets.
class Document {
 public:
  Document() = default;
  Document(std::string owner, DocumentScope scope) : owner_(std::move(owner)), scope_(scope) {}

  const std::string& owner() const { return owner_; }
  DocumentScope scope() const { return scope_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::map<std::string, std::size_t>& counts() const { return counts_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  /// Appends one tweet's tokens as a new segment; empty segments are ignored.
  void append_segment(std::span<const std::string> tokens) {
    if (tokens.empty()) return;
    segment_starts_.push_back(tokens_.size());
    for (const auto& t : tokens) {
      tokens_.push_back(t);
      ++counts_[t];
    }
  }

  void append(const Document& other) {
    for (std::size_t s = 0; s < other.segment_count(); ++s) append_segment(other.segment(s));
  }

  std::size_t segment_count() const { return segment_starts_.size(); }

  std::span<const std::string> segment(std::size_t s) const {
    std::size_t begin = segment_starts_.at(s);
    std::size_t end = s + 1 < segment_starts_.size() ? segment_starts_[s + 1] : tokens_.size();
    return std::span<const std::string>(tokens_).subspan(begin, end - begin);
  }

  /// Copy with the given tokens removed (segment structure kept).
  Document without(const std::set<std::string>& drop) const {
    Document out(owner_, scope_);
    std::vector<std::string> seg;
    for (std::size_t s = 0; s < segment_count(); ++s) {
      seg.clear();
      for (const auto& t : segment(s))
        if (!drop.contains(t)) seg.push_back(t);
      out.append_segment(seg);
    }
    return out;
  }

 private:
  std::string owner_;
  DocumentScope scope_ = DocumentScope::event;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> segment_starts_;
  std::map<std::string, std::size_t> counts_;
};

/// Distinct tweets of `user` in corpus order; later duplicates of a tweet_id
/// are dropped (set-union semantics over tweets).
inline std::vector<const TweetRecord*> distinct_tweets_of(const EventCorpus& e, const std::string& user) {
  std::vector<const TweetRecord*> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : e.tweets)
    if (t.user_id == user && seen.insert(t.tweet_id).second) out.push_back(&t);
  return out;
}

/// A user's lifetime participation in one event: the concatenated token
/// streams of their distinct tweets, one segment per tweet.
inline Document build_user_event_document(const std::string& user, const EventCorpus& e) {
  if (!e.users.contains(user)) throw Error("unknown participant: " + user + " in " + e.event_id);
  Document d(user, DocumentScope::event);
  for (const auto* t : distinct_tweets_of(e, user)) d.append_segment(tokenize(t->text));
  return d;
}

/// Union of all participants' documents for the event (users in id order).
inline Document build_event_document(const EventCorpus& e) {
  if (e.users.empty()) throw Error("empty event: " + e.event_id);
  Document d(e.event_id, DocumentScope::event);
  for (const auto& u : e.users) d.append(build_user_event_document(u, e));
  return d;
}

// ---------------------------------------------------------------------------
// Ingest

struct IngestReport {
  std::size_t lines_read = 0;
  std::size_t records = 0;
  std::size_t skipped_malformed = 0;
  std::size_t duplicate_ids = 0;
  std::size_t untagged = 0;
  std::map<std::string, std::size_t> tweets_per_event;
  std::map<std::string, std::size_t> users_per_event;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["lines_read"] = lines_read;
    j["records"] = records;
    j["skipped_malformed"] = skipped_malformed;
    j["duplicate_ids"] = duplicate_ids;
    j["untagged"] = untagged;
    nlohmann::json events = nlohmann::json::object();
    for (const auto& [e, n] : tweets_per_event) events[e] = {{"tweets", n}, {"users", users_per_event.at(e)}};
    j["events"] = std::move(events);
    return j;
  }
};

struct IngestResult {
  std::map<std::string, EventCorpus> events;
  IngestReport report;
};

inline std::optional<TweetRecord> parse_tweet_line(std::string_view line) {
  // tweet_id \t user_id \t hashtags \t text ; text may itself contain tabs.
  std::size_t p1 = line.find('\t');
  if (p1 == std::string_view::npos) return std::nullopt;
  std::size_t p2 = line.find('\t', p1 + 1);
  if (p2 == std::string_view::npos) return std::nullopt;
  std::size_t p3 = line.find('\t', p2 + 1);
  if (p3 == std::string_view::npos) return std::nullopt;
  TweetRecord t;
  t.tweet_id = std::string(line.substr(0, p1));
  t.user_id = std::string(line.substr(p1 + 1, p2 - p1 - 1));
  t.text = std::string(line.substr(p3 + 1));
  if (t.tweet_id.empty() || t.user_id.empty()) return std::nullopt;
  for (auto tag : split_fields(line.substr(p2 + 1, p3 - p2 - 1), ',')) {
    while (!tag.empty() && tag.front() == ' ') tag.remove_prefix(1);
    while (!tag.empty() && tag.back() == ' ') tag.remove_suffix(1);
    if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
    if (tag.empty()) continue;
    std::string lower(tag);
    for (auto& c : lower)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    t.hashtags.insert(std::move(lower));
  }
  return t;
}

/// Reads the tab-separated tweet stream and groups records into one corpus
/// per hashtag. Malformed lines are counted, never fatal; a repeated
/// tweet_id keeps its first occurrence.
inline IngestResult ingest_tweets(std::istream& in) {
  IngestResult result;
  auto& rep = result.report;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  while (std::getline(in, line)) {
    auto view = strip_cr(line);
    if (view.empty()) continue;
    ++rep.lines_read;
    auto rec = parse_tweet_line(view);
    if (!rec) {
      ++rep.skipped_malformed;
      continue;
    }
    if (!seen_ids.insert(rec->tweet_id).second) {
      ++rep.duplicate_ids;
      continue;
    }
    ++rep.records;
    if (rec->hashtags.empty()) {
      ++rep.untagged;
      continue;
    }
    for (const auto& tag : rec->hashtags) {
      auto& ev = result.events[tag];
      ev.event_id = tag;
      ev.add(*rec);
    }
  }
  if (result.events.empty()) throw Error("no events");
  for (const auto& [id, ev] : result.events) {
    rep.tweets_per_event[id] = ev.tweets.size();
    rep.users_per_event[id] = ev.users.size();
  }
  return result;
}

inline IngestResult ingest_tweets(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ingest_tweets(in);
}

// ---------------------------------------------------------------------------
// Followership graph

struct SocialGraphLoad {
  WeightedGraph graph{GraphKind::social, "followership"};
  std::size_t lines_read = 0;
  std::size_t malformed = 0;
  std::size_t self_loops = 0;
  std::size_t dangling = 0;  // at least one endpoint outside the filter
  std::size_t collapsed = 0;  // duplicate or reciprocal pairs merged

  nlohmann::json to_json() const {
    return {{"lines_read", lines_read},   {"malformed", malformed}, {"self_loops", self_loops},
            {"dangling", dangling},       {"collapsed", collapsed}, {"nodes", graph.node_count()},
            {"edges", graph.edge_count()}};
  }
};

/// Undirected unit-weight followership graph. With a filter, the node set is
/// exactly the filter and edges leaving it are dropped; without one, the node
/// set is every endpoint seen.
inline SocialGraphLoad load_social_graph(std::istream& in, const std::optional<std::set<std::string>>& filter) {
  SocialGraphLoad out;
  if (filter)
    for (const auto& u : *filter) out.graph.add_node(u);
  std::string line;
  while (std::getline(in, line)) {
    auto view = strip_cr(line);
    if (view.empty()) continue;
    ++out.lines_read;
    auto f = split_fields(view, '\t');
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      ++out.malformed;
      continue;
    }
    std::string a(f[0]), b(f[1]);
    if (a == b) {
      ++out.self_loops;
      continue;
    }
    if (filter && (!filter->contains(a) || !filter->contains(b))) {
      ++out.dangling;
      continue;
    }
    if (out.graph.has_edge(a, b)) {
      ++out.collapsed;
      continue;
    }
    out.graph.set_edge(a, b, 1.0);
  }
  return out;
}

inline SocialGraphLoad load_social_graph(std::string_view text, const std::optional<std::set<std::string>>& filter) {
  std::istringstream in{std::string(text)};
  return load_social_graph(in, filter);
}

// ---------------------------------------------------------------------------
// Stopwords (applied to topic-model input only)

inline const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",     "about", "above", "after", "again", "all",   "am",    "an",    "and",   "any",   "are",
      "as",    "at",    "be",    "been",  "before", "being", "below", "both",  "but",   "by",    "can",
      "did",   "do",    "does",  "doing", "down",  "during", "each", "few",   "for",   "from",  "further",
      "had",   "has",   "have",  "having", "he",   "her",   "here",  "hers",  "him",   "his",   "how",
      "i",     "if",    "in",    "into",  "is",    "it",    "its",   "just",  "me",    "more",  "most",
      "my",    "no",    "nor",   "not",   "now",   "of",    "off",   "on",    "once",  "only",  "or",
      "other", "our",   "out",   "over",  "own",   "rt",    "s",     "same",  "she",   "should", "so",
      "some",  "such",  "t",     "than",  "that",  "the",   "their", "them",  "then",  "there", "these",
      "they",  "this",  "those", "through", "to",  "too",   "under", "until", "up",    "very",  "was",
      "we",    "were",  "what",  "when",  "where", "which", "while", "who",   "whom",  "why",   "will",
      "with",  "you",   "your",  "yours", "<url>", "<mention>"};
  return words;
}

/// One word per line; blank lines and '#' comments ignored; lowercased.
inline std::set<std::string> read_stopwords(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto v = strip_cr(line);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    if (v.empty() || v.front() == '#') continue;
    std::string w(v);
    for (auto& c : w)
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out.insert(std::move(w));
  }
  return out;
}

}  // namespace contentlink

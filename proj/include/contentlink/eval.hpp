// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/community.hpp"

namespace contentlink {

/// Shannon entropy of the community-size distribution, in bits.
inline double partition_entropy(const Partition& p) {
  if (p.size() == 0) return 0.0;
  std::vector<double> sizes(p.community_count(), 0.0);
  for (const auto& [n, c] : p.assignment()) sizes[c] += 1.0;
  const double total = static_cast<double>(p.size());
  double h = 0.0;
  for (double s : sizes)
    if (s > 0.0) h -= (s / total) * std::log2(s / total);
  return h;
}

/// I(X; Y) in bits from the joint contingency table of the two partitions.
inline double mutual_information(const Partition& x, const Partition& y) {
  if (x.size() != y.size()) throw Error("unaligned partitions");
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::vector<double> px(x.community_count(), 0.0), py(y.community_count(), 0.0);
  auto ix = x.assignment().begin();
  auto iy = y.assignment().begin();
  for (; ix != x.assignment().end(); ++ix, ++iy) {
    if (ix->first != iy->first) throw Error("unaligned partitions");
    joint[{ix->second, iy->second}] += 1.0;
    px[ix->second] += 1.0;
    py[iy->second] += 1.0;
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [cell, count] : joint)
    mi += (count / n) * std::log2(count * n / (px[cell.first] * py[cell.second]));
  return std::max(mi, 0.0);
}

enum class NmiMode { by_hx, by_hy, symmetric };

/// Normalized mutual information: I/H(X), I/H(Y), or I/sqrt(H(X)H(Y)).
/// Two single-community partitions are identical trivial structures (1).
inline double nmi(const Partition& x, const Partition& y, NmiMode mode) {
  const double mi = mutual_information(x, y);
  const double hx = partition_entropy(x);
  const double hy = partition_entropy(y);
  if (hx == 0.0 && hy == 0.0) return 1.0;
  double denom = 0.0;
  switch (mode) {
    case NmiMode::by_hx: denom = hx; break;
    case NmiMode::by_hy: denom = hy; break;
    case NmiMode::symmetric: denom = std::sqrt(hx * hy); break;
  }
  if (denom == 0.0) throw Error("degenerate partition");
  return std::clamp(mi / denom, 0.0, 1.0);
}

/// Both partitions restricted to their common node set.
inline std::pair<Partition, Partition> align_partitions(const Partition& x, const Partition& y) {
  std::set<std::string> common;
  for (const auto& [n, c] : x.assignment())
    if (y.contains(n)) common.insert(n);
  return {x.restricted(common), y.restricted(common)};
}

/// One cell of the goodness grid: content communities (X) against social
/// communities (Y) for an (event, scope, model, threshold) combination.
struct GoodnessScore {
  std::string event_id;
  std::string scope;  // "event" or "topic-<k>"
  std::string model;  // unigram | bigram | lda
  double threshold_pct = 0.0;
  double nmi_xy = 0.0;  // I / H(Y)
  double nmi_yx = 0.0;  // I / H(X)
  double nmi_sym = 0.0;
  std::size_t node_count = 0;
  std::size_t content_communities = 0;
  std::size_t social_communities = 0;

  friend bool operator==(const GoodnessScore&, const GoodnessScore&) = default;
};

struct ScoreMeta {
  std::string event_id;
  std::string scope;
  std::string model;
  double threshold_pct = 0.0;
};

/// Scores content vs. social communities over their common node set.
inline GoodnessScore goodness(const Partition& content, const Partition& social, const ScoreMeta& meta) {
  auto [x, y] = align_partitions(content, social);
  if (x.size() == 0) throw Error("unaligned partitions: no common nodes");
  GoodnessScore s;
  s.event_id = meta.event_id;
  s.scope = meta.scope;
  s.model = meta.model;
  s.threshold_pct = meta.threshold_pct;
  s.nmi_xy = nmi(x, y, NmiMode::by_hy);
  s.nmi_yx = nmi(x, y, NmiMode::by_hx);
  s.nmi_sym = nmi(x, y, NmiMode::symmetric);
  s.node_count = x.size();
  s.content_communities = x.community_count();
  s.social_communities = y.community_count();
  return s;
}

inline constexpr std::string_view kScoreCsvHeader =
    "event,scope,model,threshold_pct,nmi_xy,nmi_yx,nmi_sym,nodes,content_comms,social_comms";

inline void write_score_row(std::ostream& os, const GoodnessScore& s) {
  os << s.event_id << ',' << s.scope << ',' << s.model << ',' << format_real(s.threshold_pct) << ','
     << format_real(s.nmi_xy) << ',' << format_real(s.nmi_yx) << ',' << format_real(s.nmi_sym) << ','
     << s.node_count << ',' << s.content_communities << ',' << s.social_communities << '\n';
}

inline void write_scores_csv(std::ostream& os, const std::vector<GoodnessScore>& scores) {
  os << kScoreCsvHeader << '\n';
  for (const auto& s : scores) write_score_row(os, s);
}

inline std::vector<GoodnessScore> read_scores_csv(std::istream& is) {
  std::vector<GoodnessScore> out;
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != kScoreCsvHeader) throw Error("score CSV: bad header");
  std::size_t lineno = 1;
  auto count = [&](std::string_view f) {
    std::size_t v = 0;
    if (std::from_chars(f.data(), f.data() + f.size(), v).ec != std::errc())
      throw Error("score CSV: bad integer on line " + std::to_string(lineno));
    return v;
  };
  auto real = [&](std::string_view f) {
    auto v = parse_real(f);
    if (!v) throw Error("score CSV: bad number on line " + std::to_string(lineno));
    return *v;
  };
  while (std::getline(is, line)) {
    ++lineno;
    auto v = strip_cr(line);
    if (v.empty()) continue;
    auto f = split_fields(v, ',');
    if (f.size() != 10) throw Error("score CSV: wrong field count on line " + std::to_string(lineno));
    GoodnessScore s;
    s.event_id = std::string(f[0]);
    s.scope = std::string(f[1]);
    s.model = std::string(f[2]);
    s.threshold_pct = real(f[3]);
    s.nmi_xy = real(f[4]);
    s.nmi_yx = real(f[5]);
    s.nmi_sym = real(f[6]);
    s.node_count = count(f[7]);
    s.content_communities = count(f[8]);
    s.social_communities = count(f[9]);
    out.push_back(std::move(s));
  }
  return out;
}

inline nlohmann::json to_json(const GoodnessScore& s) {
  return {{"event", s.event_id},
          {"scope", s.scope},
          {"model", s.model},
          {"threshold_pct", s.threshold_pct},
          {"nmi_xy", s.nmi_xy},
          {"nmi_yx", s.nmi_yx},
          {"nmi_sym", s.nmi_sym},
          {"nodes", s.node_count},
          {"content_comms", s.content_communities},
          {"social_comms", s.social_communities}};
}

inline GoodnessScore score_from_json(const nlohmann::json& j) {
  GoodnessScore s;
  s.event_id = j.at("event").get<std::string>();
  s.scope = j.at("scope").get<std::string>();
  s.model = j.at("model").get<std::string>();
  s.threshold_pct = j.at("threshold_pct").get<double>();
  s.nmi_xy = j.at("nmi_xy").get<double>();
  s.nmi_yx = j.at("nmi_yx").get<double>();
  s.nmi_sym = j.at("nmi_sym").get<double>();
  s.node_count = j.at("nodes").get<std::size_t>();
  s.content_communities = j.at("content_comms").get<std::size_t>();
  s.social_communities = j.at("social_comms").get<std::size_t>();
  return s;
}

}  // namespace contentlink

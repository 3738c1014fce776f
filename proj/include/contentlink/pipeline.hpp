// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "contentlink/common.hpp"
#include "contentlink/community.hpp"
#include "contentlink/content_graph.hpp"
#include "contentlink/corpus.hpp"
#include "contentlink/eval.hpp"
#include "contentlink/lda.hpp"
#include "contentlink/ngram.hpp"
#include "contentlink/synth.hpp"
#include "contentlink/weighted_graph.hpp"

namespace contentlink {

enum class ContentModel { unigram, bigram, lda };

inline std::string to_string(ContentModel m) {
  switch (m) {
    case ContentModel::unigram: return "unigram";
    case ContentModel::bigram: return "bigram";
    case ContentModel::lda: return "lda";
  }
  return "?";
}

inline ContentModel parse_content_model(std::string_view s) {
  if (s == "unigram") return ContentModel::unigram;
  if (s == "bigram") return ContentModel::bigram;
  if (s == "lda") return ContentModel::lda;
  throw Error("unknown content model: " + std::string(s));
}

inline std::string topic_scope(int k) { return "topic-" + std::to_string(k); }
inline constexpr std::string_view kEventScope = "event";

/// Every tunable of a run. A manifest holding this object and the input
/// hashes is enough to reproduce the run.
struct PipelineConfig {
  std::string tweets_path;
  std::string edges_path;
  std::optional<SynthConfig> synth;  // used when no input paths are given
  std::vector<ContentModel> models{ContentModel::unigram, ContentModel::bigram, ContentModel::lda};
  int topics = 10;
  std::vector<double> thresholds{5, 10, 20, 30, 40, 50};
  double lda_alpha = 0.0;  // <= 0 means 50 / topics
  double lda_beta = 0.01;
  int lda_iterations = 1000;
  int inference_iterations = 100;
  double delta = kDefaultDelta;
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  bool binarize_content_graph = false;
  bool keep_isolated_nodes = true;
  bool topic_level = true;
  std::string stopwords_path;

  double effective_alpha() const { return lda_alpha > 0.0 ? lda_alpha : 50.0 / topics; }

  void validate() const {
    if (models.empty()) throw Error("config: at least one model must be selected");
    if (thresholds.empty()) throw Error("config: threshold grid is empty");
    for (double t : thresholds)
      if (!(t > 0.0) || t > 100.0) throw Error("config: threshold outside (0, 100]: " + format_real(t));
    if (topics < 2) throw Error("config: topics must be at least 2");
    if (!(lda_beta > 0.0)) throw Error("config: lda_beta must be positive");
    if (lda_iterations < 1 || inference_iterations < 1) throw Error("config: iterations must be positive");
    if (!(delta > 0.0)) throw Error("config: delta must be positive");
    if (synth) synth->validate();
  }

  LdaParams lda_params(std::uint64_t seed_value) const {
    LdaParams p;
    p.topics = topics;
    p.alpha = effective_alpha();
    p.beta = lda_beta;
    p.iterations = lda_iterations;
    p.inference_iterations = inference_iterations;
    p.seed = seed_value;
    return p;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["tweets"] = tweets_path;
    j["edges"] = edges_path;
    if (synth) j["synth"] = synth->to_json();
    std::vector<std::string> names;
    for (auto m : models) names.push_back(to_string(m));
    j["models"] = names;
    j["topics"] = topics;
    j["thresholds"] = thresholds;
    j["lda_alpha"] = effective_alpha();
    j["lda_beta"] = lda_beta;
    j["lda_iterations"] = lda_iterations;
    j["inference_iterations"] = inference_iterations;
    j["delta"] = delta;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["binarize_content_graph"] = binarize_content_graph;
    j["keep_isolated_nodes"] = keep_isolated_nodes;
    j["topic_level"] = topic_level;
    j["stopwords"] = stopwords_path;
    return j;
  }

  /// Fields present in `j` override this config; absent fields are kept.
  void merge_json(const nlohmann::json& j) {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("tweets", tweets_path);
    get("edges", edges_path);
    if (j.contains("synth")) synth = SynthConfig::from_json(j.at("synth"));
    if (j.contains("models")) {
      models.clear();
      for (const auto& m : j.at("models")) models.push_back(parse_content_model(m.get<std::string>()));
    }
    get("topics", topics);
    get("thresholds", thresholds);
    get("lda_alpha", lda_alpha);
    get("lda_beta", lda_beta);
    get("lda_iterations", lda_iterations);
    get("inference_iterations", inference_iterations);
    get("delta", delta);
    get("seed", seed);
    get("output_dir", output_dir);
    get("binarize_content_graph", binarize_content_graph);
    get("keep_isolated_nodes", keep_isolated_nodes);
    get("topic_level", topic_level);
    get("stopwords", stopwords_path);
  }

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.merge_json(j);
    return c;
  }
};

struct CellFailure {
  std::string event_id;
  std::string scope;
  std::string model;
  std::string message;

  nlohmann::json to_json() const {
    return {{"event", event_id}, {"scope", scope}, {"model", model}, {"error", message}};
  }
};

struct PartitionDump {
  std::string path;  // relative to the output directory
  Partition partition;
};

/// Everything one run produces, in deterministic order.
struct GoodnessReport {
  std::vector<GoodnessScore> scores;
  std::vector<CellFailure> failures;
  std::vector<PartitionDump> partitions;
  std::map<std::string, nlohmann::json> topic_dumps;  // event -> top words
  std::map<std::string, nlohmann::json> event_stats;
};

namespace detail {

struct NgramScope {
  std::set<std::string> participants;
  std::map<std::string, Document> docs;
};

inline WeightedGraph ngram_content_graph(const NgramScope& scope, int order, double delta,
                                         const std::string& label) {
  std::set<std::string> trainable;
  std::map<std::string, NGramModel> models;
  for (const auto& u : scope.participants) {
    const auto& d = scope.docs.at(u);
    if (d.size() < static_cast<std::size_t>(order)) {
      warn("user " + u + " has too few tokens for an order-" + std::to_string(order) + " model in " + label);
      continue;
    }
    models.emplace(u, train_ngram(d, order, delta));
    trainable.insert(u);
  }
  return build_ngram_edges(trainable, models, scope.docs, label);
}

// Per-tweet dominant topics of one user, computed once per event.
inline std::vector<std::pair<std::vector<std::string>, std::optional<int>>> tweet_topics(
    const EventCorpus& e, const std::string& user, const TopicModel& m, const std::set<std::string>& stopwords,
    std::uint64_t seed, int iterations) {
  std::vector<std::pair<std::vector<std::string>, std::optional<int>>> out;
  std::size_t index = 0;
  for (const auto* t : distinct_tweets_of(e, user)) {
    auto tokens = tokenize(t->text);
    Document tweet(t->tweet_id, DocumentScope::topic);
    tweet.append_segment(tokens);
    auto filtered = tweet.without(stopwords);
    std::optional<int> dominant;
    if (!filtered.empty()) {
      auto theta = infer_doc_topics(m, filtered, derive_seed(seed, "tweet", index), iterations);
      dominant = dominant_topic(theta);
    }
    ++index;
    out.emplace_back(std::move(tokens), dominant);
  }
  return out;
}

}  // namespace detail

/// Runs the full goodness grid over the given events: per event, one topic
/// model, event-level content graphs per model and threshold, then per topic
/// the participant subset, topic-level graphs, and scores. A failure inside
/// one (event, scope, model) cell is recorded and never affects other cells.
inline GoodnessReport run_pipeline(const PipelineConfig& cfg, const std::map<std::string, EventCorpus>& events,
                                   const WeightedGraph& social, const std::set<std::string>& stopwords) {
  cfg.validate();
  GoodnessReport report;
  const bool need_lda = cfg.topic_level || std::count(cfg.models.begin(), cfg.models.end(), ContentModel::lda) > 0;

  for (const auto& [event_id, e] : events) {
    auto fail_all = [&](const std::string& scope, const std::string& msg) {
      for (auto m : cfg.models) report.failures.push_back({event_id, scope, to_string(m), msg});
    };

    detail::NgramScope event_scope;
    std::map<std::string, Document> lda_docs;
    for (const auto& u : e.users) {
      auto d = build_user_event_document(u, e);
      if (d.empty()) continue;
      event_scope.participants.insert(u);
      lda_docs.emplace(u, d.without(stopwords));
      event_scope.docs.emplace(u, std::move(d));
    }

    // Social communities for a participant set; nullopt (with failures
    // recorded) when the induced followership graph has no edges.
    auto social_partition = [&](const std::set<std::string>& participants,
                                const std::string& scope) -> std::optional<Partition> {
      auto g = social_subgraph(social, participants);
      try {
        auto p = louvain(g, derive_seed(cfg.seed, "louvain-social", event_id, scope));
        report.partitions.push_back({"partitions/" + event_id + "/" + scope + "/social.tsv", p});
        return p;
      } catch (const Error& err) {
        fail_all(scope, std::string("social graph: ") + err.what());
        return std::nullopt;
      }
    };

    // Threshold sweep for one content graph; any error aborts the cell.
    auto score_cell = [&](const WeightedGraph& content, const Partition& social_part, const std::string& scope,
                          ContentModel model) {
      const auto name = to_string(model);
      try {
        if (content.edge_count() == 0) throw Error("content graph has no edges");
        std::vector<GoodnessScore> rows;
        std::vector<PartitionDump> dumps;
        for (double thr : cfg.thresholds) {
          auto g = retain_top_k_percent(content, thr);
          if (cfg.binarize_content_graph) g = binarize(g);
          if (!cfg.keep_isolated_nodes) g = g.without_isolated_nodes();
          auto part = louvain(g, derive_seed(cfg.seed, "louvain-content", event_id, scope, name, format_real(thr)));
          rows.push_back(goodness(part, social_part, {event_id, scope, name, thr}));
          dumps.push_back({"partitions/" + event_id + "/" + scope + "/" + name + "_" + format_real(thr) + ".tsv",
                           std::move(part)});
        }
        report.scores.insert(report.scores.end(), rows.begin(), rows.end());
        for (auto& d : dumps) report.partitions.push_back(std::move(d));
      } catch (const std::exception& err) {
        report.failures.push_back({event_id, scope, name, err.what()});
      }
    };

    nlohmann::json stats = {{"users", e.users.size()},
                            {"participants", event_scope.participants.size()},
                            {"tweets", e.tweets.size()}};

    // Topic model for the event.
    std::optional<TopicModel> topic_model;
    std::map<std::string, std::vector<double>> thetas;
    std::vector<TopicMembership> memberships;
    std::string lda_error;
    if (need_lda) {
      try {
        std::vector<Document> input;
        for (const auto& [u, d] : lda_docs)
          if (!d.empty()) input.push_back(d);
        topic_model = fit_lda(input, cfg.lda_params(derive_seed(cfg.seed, "lda", event_id)));
        for (const auto& u : event_scope.participants) {
          auto theta = infer_doc_topics(*topic_model, lda_docs.at(u), derive_seed(cfg.seed, "theta", event_id, u),
                                        cfg.inference_iterations);
          memberships.push_back(TopicMembership::from_theta(u, event_id, theta));
          thetas.emplace(u, std::move(theta));
        }
        report.topic_dumps.emplace(event_id, topic_model->topic_dump(20));
      } catch (const std::exception& err) {
        lda_error = std::string("topic model: ") + err.what();
      }
    }

    // Event level.
    std::string event_scope_name(kEventScope);
    if (auto social_event = social_partition(event_scope.participants, event_scope_name)) {
      for (auto model : cfg.models) {
        if (model == ContentModel::lda) {
          if (!topic_model) {
            report.failures.push_back({event_id, event_scope_name, "lda", lda_error});
            continue;
          }
          score_cell(build_lda_edges(event_scope.participants, thetas, std::nullopt, "lda/event"), *social_event,
                     event_scope_name, model);
        } else {
          const int order = model == ContentModel::unigram ? 1 : 2;
          try {
            auto g = detail::ngram_content_graph(event_scope, order, cfg.delta, to_string(model) + "/event");
            score_cell(g, *social_event, event_scope_name, model);
          } catch (const std::exception& err) {
            report.failures.push_back({event_id, event_scope_name, to_string(model), err.what()});
          }
        }
      }
    }

    // Topic level.
    if (cfg.topic_level) {
      if (!topic_model) {
        for (int k = 0; k < cfg.topics; ++k) fail_all(topic_scope(k), lda_error);
      } else {
        std::map<std::string, std::vector<std::pair<std::vector<std::string>, std::optional<int>>>> tweet_topics;
        bool need_topic_docs = std::any_of(cfg.models.begin(), cfg.models.end(),
                                           [](auto m) { return m != ContentModel::lda; });
        if (need_topic_docs)
          for (const auto& m : memberships)
            if (!m.participating_topics.empty())
              tweet_topics.emplace(m.user_id, detail::tweet_topics(e, m.user_id, *topic_model, stopwords,
                                                                   derive_seed(cfg.seed, "tweets", event_id,
                                                                               m.user_id),
                                                                   cfg.inference_iterations));
        nlohmann::json topic_sizes = nlohmann::json::array();
        for (int k = 0; k < cfg.topics; ++k) {
          const auto scope = topic_scope(k);
          auto participants = topic_participants(memberships, k);
          topic_sizes.push_back(participants.size());
          if (participants.size() < 2) {
            fail_all(scope, "fewer than 2 topic participants");
            continue;
          }
          auto social_topic = social_partition(participants, scope);
          if (!social_topic) continue;

          detail::NgramScope topic_docs;
          if (need_topic_docs) {
            topic_docs.participants = participants;
            for (const auto& u : participants) {
              Document d(u, DocumentScope::topic);
              for (const auto& [tokens, dominant] : tweet_topics.at(u))
                if (dominant == k) d.append_segment(tokens);
              if (d.empty()) d.append(event_scope.docs.at(u));
              topic_docs.docs.emplace(u, std::move(d));
            }
          }
          for (auto model : cfg.models) {
            if (model == ContentModel::lda) {
              score_cell(build_lda_edges(participants, thetas, k, "lda/" + scope), *social_topic, scope, model);
              continue;
            }
            const int order = model == ContentModel::unigram ? 1 : 2;
            try {
              auto g = detail::ngram_content_graph(topic_docs, order, cfg.delta, to_string(model) + "/" + scope);
              score_cell(g, *social_topic, scope, model);
            } catch (const std::exception& err) {
              report.failures.push_back({event_id, scope, to_string(model), err.what()});
            }
          }
        }
        stats["topic_participants"] = std::move(topic_sizes);
      }
    }
    report.event_stats.emplace(event_id, std::move(stats));
  }
  return report;
}

// ---------------------------------------------------------------------------
// File-level driver

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view bytes) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << bytes;
}

/// Distinguishes bad configuration (exit 1) from unreadable or unusable
/// inputs (exit 2).
class InputError : public Error {
 public:
  using Error::Error;
};

struct RunResult {
  GoodnessReport report;
  nlohmann::json manifest;
};

inline std::string scores_csv(const std::vector<GoodnessScore>& scores) {
  std::ostringstream os;
  write_scores_csv(os, scores);
  return os.str();
}

struct PlotSeries {
  std::string path;
  std::vector<std::pair<double, double>> points;  // (threshold_pct, nmi_sym)
};

/// One threshold-vs-NMI series per (event, model, scope), in report order.
inline std::vector<PlotSeries> plot_series(const std::vector<GoodnessScore>& scores) {
  std::vector<PlotSeries> out;
  std::map<std::string, std::size_t> index;
  for (const auto& s : scores) {
    auto path = "series/" + s.event_id + "/" + s.model + "_" + s.scope + ".tsv";
    auto [it, inserted] = index.emplace(path, out.size());
    if (inserted) out.push_back({path, {}});
    out[it->second].points.emplace_back(s.threshold_pct, s.nmi_sym);
  }
  return out;
}

/// Writes the series files under `dir` plus series/manifest.json listing the
/// written files and the failed cells that have no series.
inline nlohmann::json emit_plot_data(const std::vector<GoodnessScore>& scores, const std::vector<CellFailure>& failures,
                                     const std::filesystem::path& dir) {
  if (scores.empty() && failures.empty()) throw Error("empty report");
  nlohmann::json written = nlohmann::json::array();
  for (const auto& series : plot_series(scores)) {
    std::ostringstream os;
    os << "threshold_pct\tnmi_sym\n";
    for (const auto& [t, v] : series.points) os << format_real(t) << '\t' << format_real(v) << '\n';
    write_file(dir / series.path, os.str());
    written.push_back(series.path);
  }
  nlohmann::json omitted = nlohmann::json::array();
  for (const auto& f : failures) omitted.push_back(f.to_json());
  nlohmann::json manifest = {{"series", written}, {"omitted", omitted}};
  write_file(dir / "series" / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

/// Reads inputs (or generates a synthetic corpus), runs the grid, and writes
/// scores.csv, scores.json, partition and topic dumps, and manifest.json.
inline RunResult run_pipeline_files(const PipelineConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path out_dir = cfg.output_dir;
  std::string tweets_bytes, edges_bytes;
  nlohmann::json inputs;
  if (!cfg.tweets_path.empty() || !cfg.edges_path.empty()) {
    if (cfg.tweets_path.empty() || cfg.edges_path.empty())
      throw Error("config: both tweets and edges paths are required");
    try {
      tweets_bytes = read_file(cfg.tweets_path);
      edges_bytes = read_file(cfg.edges_path);
    } catch (const Error& err) {
      throw InputError(err.what());
    }
    inputs["tweets"] = {{"path", cfg.tweets_path}, {"sha256", sha256_hex(tweets_bytes)}};
    inputs["edges"] = {{"path", cfg.edges_path}, {"sha256", sha256_hex(edges_bytes)}};
  } else if (cfg.synth) {
    auto synth = generate(*cfg.synth);
    tweets_bytes = std::move(synth.tweets_tsv);
    edges_bytes = std::move(synth.edges_tsv);
    std::ostringstream planted;
    write_partition(planted, synth.planted);
    write_file(out_dir / "inputs" / "tweets.tsv", tweets_bytes);
    write_file(out_dir / "inputs" / "edges.tsv", edges_bytes);
    write_file(out_dir / "inputs" / "planted.tsv", planted.str());
    inputs["tweets"] = {{"path", "inputs/tweets.tsv"}, {"sha256", sha256_hex(tweets_bytes)}};
    inputs["edges"] = {{"path", "inputs/edges.tsv"}, {"sha256", sha256_hex(edges_bytes)}};
  } else {
    throw Error("config: no inputs (give tweets and edges paths, or a synth config)");
  }

  std::set<std::string> stopwords = default_stopwords();
  if (!cfg.stopwords_path.empty()) {
    try {
      std::istringstream in(read_file(cfg.stopwords_path));
      stopwords = read_stopwords(in);
    } catch (const Error& err) {
      throw InputError(err.what());
    }
    inputs["stopwords"] = {{"path", cfg.stopwords_path}, {"sha256", sha256_hex(read_file(cfg.stopwords_path))}};
  }

  IngestResult ingest;
  try {
    ingest = ingest_tweets(tweets_bytes);
  } catch (const Error& err) {
    throw InputError(err.what());
  }
  std::set<std::string> all_users;
  for (const auto& [id, ev] : ingest.events) all_users.insert(ev.users.begin(), ev.users.end());
  auto social = load_social_graph(std::string_view(edges_bytes), all_users);

  RunResult result;
  result.report = run_pipeline(cfg, ingest.events, social.graph, stopwords);
  const auto& rep = result.report;

  write_file(out_dir / "scores.csv", scores_csv(rep.scores));
  nlohmann::json scores_json = nlohmann::json::array();
  for (const auto& s : rep.scores) scores_json.push_back(to_json(s));
  write_file(out_dir / "scores.json", scores_json.dump(2) + "\n");
  for (const auto& d : rep.partitions) {
    std::ostringstream os;
    write_partition(os, d.partition);
    write_file(out_dir / d.path, os.str());
  }
  for (const auto& [event, dump] : rep.topic_dumps) write_file(out_dir / "topics" / (event + ".json"), dump.dump(2) + "\n");

  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : rep.failures) failures.push_back(f.to_json());
  result.manifest = {{"config", cfg.to_json()},
                     {"inputs", inputs},
                     {"ingest", ingest.report.to_json()},
                     {"social_graph", social.to_json()},
                     {"events", rep.event_stats},
                     {"score_rows", rep.scores.size()},
                     {"failures", failures}};
  write_file(out_dir / "manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

}  // namespace contentlink

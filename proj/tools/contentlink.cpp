// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The contentlink Authors

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "contentlink/contentlink.hpp"

namespace cl = contentlink;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitPartial = 3;

// Collects flag values and remembers which ones were given, so that flags
// override a config file field by field.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, T& storage,
                   const std::string& help) {
    auto* opt = app->add_option(flag, storage, help);
    entries_.push_back([opt, key, &storage](nlohmann::json& j) {
      if (opt->count() > 0) j[key] = storage;
    });
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& key, bool& storage,
                    const std::string& help) {
    auto* opt = app->add_flag(flag, storage, help);
    entries_.push_back([opt, key, &storage](nlohmann::json& j) {
      if (opt->count() > 0) j[key] = storage;
    });
    return opt;
  }
  nlohmann::json collect() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& e : entries_) e(j);
    return j;
  }

 private:
  std::vector<std::function<void(nlohmann::json&)>> entries_;
};

struct SynthFlags {
  std::size_t n_users = 0, n_communities = 0, vocab_size = 0, n_events = 0, topics_per_event = 0,
              themes_per_user = 0, tweets_min = 0, tweets_max = 0, tokens_min = 0, tokens_max = 0;
  double p_in = 0, p_out = 0, community_bias = 0, zipf = 0;
  bool subtopics = false;
  std::uint64_t seed = 0;

  void add(CLI::App* app, Overrides& o) {
    o.add(app, "--users", "n_users", n_users, "number of users");
    o.add(app, "--communities", "n_communities", n_communities, "number of planted communities");
    o.add(app, "--p-in", "p_in", p_in, "edge probability inside a community");
    o.add(app, "--p-out", "p_out", p_out, "edge probability across communities");
    o.add(app, "--vocab-size", "vocab_size", vocab_size, "word inventory size");
    o.add(app, "--bias", "community_bias", community_bias, "probability a token comes from community vocabulary");
    o.add(app, "--events", "n_events", n_events, "number of events");
    o.add(app, "--themes", "topics_per_event", topics_per_event, "themes per event");
    o.add(app, "--themes-per-user", "themes_per_user", themes_per_user, "themes each user tweets about");
    o.add(app, "--tweets-min", "tweets_per_user_min", tweets_min, "fewest tweets per user and event");
    o.add(app, "--tweets-max", "tweets_per_user_max", tweets_max, "most tweets per user and event");
    o.add(app, "--tokens-min", "tokens_per_tweet_min", tokens_min, "fewest tokens per tweet");
    o.add(app, "--tokens-max", "tokens_per_tweet_max", tokens_max, "most tokens per tweet");
    o.add(app, "--zipf", "zipf_exponent", zipf, "Zipf exponent of word frequencies within a block");
    o.flag(app, "--subtopics,!--no-subtopics", "subtopics", subtopics, "community vocabulary split per theme");
    o.add(app, "--synth-seed", "seed", seed, "generator seed");
  }
};

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cl::Error("config: cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw cl::Error("config: " + path + ": " + e.what());
  }
}

int run_ingest(const std::string& tweets, const std::string& edges) {
  auto result = cl::ingest_tweets(cl::read_file(tweets));
  nlohmann::json out = {{"ingest", result.report.to_json()}};
  if (!edges.empty()) {
    std::set<std::string> users;
    for (const auto& [id, ev] : result.events) users.insert(ev.users.begin(), ev.users.end());
    auto social = cl::load_social_graph(std::string_view(cl::read_file(edges)), users);
    out["social_graph"] = social.to_json();
  }
  std::cerr << out.dump(2) << '\n';
  return kExitOk;
}

int run_synth(const cl::SynthConfig& cfg, const fs::path& dir) {
  auto out = cl::generate(cfg);
  std::ostringstream planted;
  cl::write_partition(planted, out.planted);
  cl::write_file(dir / "tweets.tsv", out.tweets_tsv);
  cl::write_file(dir / "edges.tsv", out.edges_tsv);
  cl::write_file(dir / "planted.tsv", planted.str());
  cl::write_file(dir / "synth.json", cfg.to_json().dump(2) + "\n");
  std::cerr << "wrote " << (dir / "tweets.tsv").string() << ", edges.tsv, planted.tsv\n";
  return kExitOk;
}

int run_run(const cl::PipelineConfig& cfg) {
  auto result = cl::run_pipeline_files(cfg);
  const auto& rep = result.report;
  std::cerr << nlohmann::json{{"ingest", result.manifest.at("ingest")}}.dump() << '\n';
  std::cerr << rep.scores.size() << " score rows, " << rep.failures.size() << " failed cells; output in "
            << cfg.output_dir << '\n';
  return rep.failures.empty() ? kExitOk : kExitPartial;
}

int run_plotdata(const std::string& dir_arg) {
  const fs::path dir = dir_arg;
  std::ifstream in(dir / "scores.csv");
  if (!in) throw cl::InputError("cannot read " + (dir / "scores.csv").string());
  std::vector<cl::GoodnessScore> scores;
  try {
    scores = cl::read_scores_csv(in);
  } catch (const cl::Error& e) {
    throw cl::InputError(e.what());
  }
  std::vector<cl::CellFailure> failures;
  if (fs::exists(dir / "manifest.json")) {
    auto manifest = nlohmann::json::parse(cl::read_file(dir / "manifest.json"));
    for (const auto& f : manifest.value("failures", nlohmann::json::array()))
      failures.push_back({f.at("event"), f.at("scope"), f.at("model"), f.at("error")});
  }
  auto manifest = cl::emit_plot_data(scores, failures, dir);
  std::cerr << manifest.at("series").size() << " series written under " << (dir / "series").string() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-based social link prediction and community goodness"};
  app.require_subcommand(1);

  std::string tweets_path, edges_path;
  auto* ingest = app.add_subcommand("ingest", "validate a tweet file (and edge file); statistics go to stderr as JSON");
  ingest->add_option("--tweets", tweets_path, "tweet TSV")->required();
  ingest->add_option("--edges", edges_path, "followership edge TSV");

  Overrides synth_overrides;
  SynthFlags synth_flags;
  std::string synth_config_path, synth_out = "synth";
  auto* synth = app.add_subcommand("synth", "generate a planted-community corpus");
  synth->add_option("--config", synth_config_path, "synth config JSON");
  synth->add_option("--out", synth_out, "output directory");
  synth_flags.add(synth, synth_overrides);

  Overrides run_overrides;
  std::string run_config_path;
  std::string r_tweets, r_edges, r_out, r_stopwords;
  std::vector<std::string> r_models;
  std::vector<double> r_thresholds;
  int r_topics = 0, r_iterations = 0, r_inference = 0;
  double r_alpha = 0, r_beta = 0, r_delta = 0;
  std::uint64_t r_seed = 0;
  bool r_binarize = false, r_keep_isolated = true, r_topic_level = true;
  Overrides run_synth_overrides;
  SynthFlags run_synth_flags;
  bool r_use_synth = false;
  auto* run = app.add_subcommand("run", "run the full goodness pipeline");
  run->add_option("--config", run_config_path, "pipeline config JSON; flags override its fields");
  run_overrides.add(run, "--tweets", "tweets", r_tweets, "tweet TSV");
  run_overrides.add(run, "--edges", "edges", r_edges, "followership edge TSV");
  run_overrides.add(run, "--out", "output_dir", r_out, "output directory");
  run_overrides.add(run, "--models", "models", r_models, "content models: unigram bigram lda")->delimiter(',');
  run_overrides.add(run, "--topics", "topics", r_topics, "LDA topics per event");
  run_overrides.add(run, "--thresholds", "thresholds", r_thresholds, "retention percentages")->delimiter(',');
  run_overrides.add(run, "--lda-alpha", "lda_alpha", r_alpha, "document-topic prior (default 50/K)");
  run_overrides.add(run, "--lda-beta", "lda_beta", r_beta, "topic-word prior");
  run_overrides.add(run, "--lda-iterations", "lda_iterations", r_iterations, "Gibbs sweeps for training");
  run_overrides.add(run, "--inference-iterations", "inference_iterations", r_inference, "Gibbs sweeps for inference");
  run_overrides.add(run, "--delta", "delta", r_delta, "additive smoothing constant");
  run_overrides.add(run, "--seed", "seed", r_seed, "master seed");
  run_overrides.add(run, "--stopwords", "stopwords", r_stopwords, "stopword list, one per line");
  run_overrides.flag(run, "--binarize-content-graph,!--weighted-content-graph", "binarize_content_graph", r_binarize,
                     "unit weights after retention");
  run_overrides.flag(run, "--keep-isolated-nodes,!--drop-isolated-nodes", "keep_isolated_nodes", r_keep_isolated,
                     "keep nodes left without edges after retention");
  run_overrides.flag(run, "--topic-level,!--no-topic-level", "topic_level", r_topic_level, "score topic scopes");
  run->add_flag("--synth", r_use_synth, "generate the input corpus instead of reading files");
  run_synth_flags.add(run, run_synth_overrides);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plotdata", "write threshold-vs-NMI series from a run directory");
  plot->add_option("dir", plot_dir, "run output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) return run_ingest(tweets_path, edges_path);
    if (*synth) {
      nlohmann::json j = synth_config_path.empty() ? nlohmann::json::object() : load_json_file(synth_config_path);
      j.update(synth_overrides.collect());
      return run_synth(cl::SynthConfig::from_json(j), synth_out);
    }
    if (*run) {
      nlohmann::json j = run_config_path.empty() ? nlohmann::json::object() : load_json_file(run_config_path);
      j.update(run_overrides.collect());
      auto synth_json = run_synth_overrides.collect();
      if (r_use_synth || !synth_json.empty()) {
        nlohmann::json s = j.value("synth", nlohmann::json::object());
        s.update(synth_json);
        j["synth"] = s;
      }
      cl::PipelineConfig cfg;
      try {
        cfg = cl::PipelineConfig::from_json(j);
        cfg.validate();
      } catch (const nlohmann::json::exception& e) {
        throw cl::Error(std::string("config: ") + e.what());
      }
      return run_run(cfg);
    }
    if (*plot) return run_plotdata(plot_dir);
  } catch (const cl::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const cl::Error& e) {
    std::string msg = e.what();
    bool config = msg.rfind("config", 0) == 0 || msg.rfind("synth", 0) == 0;
    std::cerr << (config ? "config error: " : "input error: ") << msg << '\n';
    return config ? kExitConfig : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitConfig;
}

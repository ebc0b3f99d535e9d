#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "fuzzyembed/clustering.hpp"
#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/io.hpp"
#include "fuzzyembed/pipeline.hpp"
#include "fuzzyembed/rulebase.hpp"
#include "fuzzyembed/sentiment.hpp"

#ifndef FUZZYEMBED_DATA_DIR
#define FUZZYEMBED_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace fuzzyembed;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kIngestion = 3, kSearch = 4 };

const std::string kDefaultLexicon = std::string(FUZZYEMBED_DATA_DIR) + "/lexicon";

struct FitArgs {
  std::string config;
  std::string embeddings, texts, features, labels, lexicon, output_dir;
  std::optional<std::size_t> k, k_min, k_max, trials, generations, population;
  std::optional<std::uint64_t> seed;
  std::string kind, loss;
  std::optional<double> train_fraction, prune_threshold;
  std::string anchor;
  std::optional<std::size_t> m;
};

void add_fit_options(CLI::App* cmd, FitArgs& a) {
  cmd->add_option("--config", a.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--embeddings", a.embeddings, "embeddings CSV (id,e0,...)");
  cmd->add_option("--texts", a.texts, "texts JSONL ({\"id\", \"text\"})");
  cmd->add_option("--features", a.features, "features CSV (id,<feature>...)");
  cmd->add_option("--labels", a.labels, "precomputed cluster labels (id,cluster)");
  cmd->add_option("--lexicon", a.lexicon, "lexicon directory");
  cmd->add_option("--output-dir,-o", a.output_dir, "output directory");
  cmd->add_option("--k", a.k, "fixed number of clusters");
  cmd->add_option("--k-min", a.k_min);
  cmd->add_option("--k-max", a.k_max);
  cmd->add_option("--trials", a.trials);
  cmd->add_option("--generations", a.generations);
  cmd->add_option("--population", a.population);
  cmd->add_option("--kind", a.kind, "t1 or it2");
  cmd->add_option("--loss", a.loss, "mcc or composite");
  cmd->add_option("--train-fraction", a.train_fraction);
  cmd->add_option("--prune-threshold", a.prune_threshold);
  cmd->add_option("--seed", a.seed, "run seed")->required();
}

RunConfig build_config(const FitArgs& a) {
  RunConfig c;
  if (!a.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_text_file(a.config));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: {}", a.config, e.what()));
    }
    c = run_config_from_json(j, fs::path(a.config).parent_path());
  }
  if (!a.embeddings.empty()) c.embeddings = a.embeddings;
  if (!a.texts.empty()) {
    c.texts = a.texts;
    c.features.clear();
  }
  if (!a.features.empty()) {
    c.features = a.features;
    if (a.texts.empty()) c.texts.clear();
  }
  if (!a.labels.empty()) c.labels = a.labels;
  if (!a.lexicon.empty()) c.lexicon = a.lexicon;
  if (c.lexicon.empty()) c.lexicon = kDefaultLexicon;
  if (!a.output_dir.empty()) c.output_dir = a.output_dir;
  if (a.k) c.k = *a.k;
  if (a.k_min) c.k_min = *a.k_min;
  if (a.k_max) c.k_max = *a.k_max;
  if (a.trials) c.trials = *a.trials;
  if (a.generations) c.ga.generations = *a.generations;
  if (a.population) c.ga.population = *a.population;
  if (!a.kind.empty()) c.kind = parse_kind(a.kind);
  if (!a.loss.empty()) c.ga.loss = parse_loss(a.loss);
  if (a.train_fraction) c.train_fraction = *a.train_fraction;
  if (a.prune_threshold) c.ga.prune_threshold = *a.prune_threshold;
  if (a.seed) c.seed = *a.seed;
  if (!a.anchor.empty() || a.m) {
    LocalConfig l = c.local.value_or(LocalConfig{});
    if (!a.anchor.empty()) l.anchor = a.anchor;
    if (a.m) l.m = *a.m;
    c.local = l;
  }
  return c;
}

void print_summary(const PipelineResult& r) {
  const auto& s = r.summary;
  std::cout << fmt::format("k = {}, trials = {}\n", r.clusters.k, r.trials.size());
  std::cout << fmt::format("train accuracy {:.4f} ± {:.4f}, MCC {:.4f} ± {:.4f}\n", s.accuracy.mean,
                           s.accuracy.std, s.mcc.mean, s.mcc.std);
  std::cout << fmt::format("rules {:.2f} ± {:.2f}, antecedents {:.2f} ± {:.2f}\n", s.rules.mean,
                           s.rules.std, s.antecedents.mean, s.antecedents.std);
  if (s.test_accuracy) {
    std::cout << fmt::format("hold-out accuracy {:.4f} ± {:.4f}\n", s.test_accuracy->mean,
                             s.test_accuracy->std);
  }
  std::cout << "outputs in " << r.output_dir.string() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Fuzzy rule-based explanations of embedding clusters"};
  app.require_subcommand(1);

  std::string texts, lexicon = kDefaultLexicon, output;
  auto* features_cmd = app.add_subcommand("features", "extract sentiment features from texts");
  features_cmd->add_option("--texts", texts, "texts JSONL")->required();
  features_cmd->add_option("--lexicon", lexicon, "lexicon directory");
  features_cmd->add_option("--output,-o", output, "features CSV")->required();

  std::string emb_path, cluster_out = "out";
  std::optional<std::size_t> ck;
  std::size_t ck_min = 2, ck_max = 8;
  std::uint64_t cseed = 0;
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means with silhouette model selection");
  cluster_cmd->add_option("--embeddings", emb_path)->required();
  cluster_cmd->add_option("--k", ck);
  cluster_cmd->add_option("--k-min", ck_min);
  cluster_cmd->add_option("--k-max", ck_max);
  cluster_cmd->add_option("--seed", cseed)->required();
  cluster_cmd->add_option("--output-dir,-o", cluster_out);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "cluster, extract features and fit rule bases");
  add_fit_options(fit_cmd, fit);

  FitArgs loc;
  auto* local_cmd = app.add_subcommand("local", "explain the neighbourhood of one sample");
  add_fit_options(local_cmd, loc);
  local_cmd->add_option("--anchor", loc.anchor, "anchor id or 'random'");
  local_cmd->add_option("--m", loc.m, "neighbourhood size");

  std::string rb_path, ev_features, ev_labels;
  auto* eval_cmd = app.add_subcommand("evaluate", "score a saved rule base on labelled features");
  eval_cmd->add_option("--rulebase", rb_path)->required();
  eval_cmd->add_option("--features", ev_features)->required();
  eval_cmd->add_option("--labels", ev_labels)->required();

  std::string report_rb;
  auto* report_cmd = app.add_subcommand("report", "print a saved rule base as a markdown table");
  report_cmd->add_option("--rulebase", report_rb)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (*features_cmd) {
    const Lexicon lex = Lexicon::load(lexicon);
    std::vector<std::string> ids, bodies;
    for (auto& r : io::read_texts_jsonl(texts)) {
      ids.push_back(std::move(r.id));
      bodies.push_back(std::move(r.text));
    }
    io::write_text_file(output, io::features_csv(batch_features(ids, bodies, lex)));
    std::cout << fmt::format("wrote {} rows to {}\n", ids.size(), output);
  } else if (*cluster_cmd) {
    RunConfig c;
    c.k = ck;
    c.k_min = ck_min;
    c.k_max = ck_max;
    c.seed = cseed;
    const EmbeddingSet emb = io::read_embeddings_csv(emb_path);
    const ClusterStage stage = cluster_embeddings(emb, c);
    const fs::path dir(cluster_out);
    io::write_text_file(dir / "clusters.csv", io::labels_csv(emb.ids(), stage.labels));
    std::string sil = "k,silhouette\n";
    for (const auto& r : stage.silhouette) sil += fmt::format("{},{}\n", r.k, io::format_double(r.silhouette));
    io::write_text_file(dir / "silhouette.csv", sil);
    std::cout << fmt::format("k = {}\n", stage.k);
  } else if (*fit_cmd) {
    print_summary(run_pipeline(build_config(fit)));
  } else if (*local_cmd) {
    RunConfig c = build_config(loc);
    if (!c.local) c.local = LocalConfig{};
    const LocalResult r = run_local_explanation(c);
    std::cout << fmt::format("anchor {} with {} members\n", r.anchor_id, r.members.size());
    print_summary(r.pipeline);
  } else if (*eval_cmd) {
    std::cout << to_json(evaluate(rb_path, ev_features, ev_labels)).dump(2) << "\n";
  } else if (*report_cmd) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(io::read_text_file(report_rb));
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(fmt::format("{}: {}", report_rb, e.what()));
    }
    const RuleBase rb = rulebase_from_json(j);
    std::cout << render_markdown(rb, report_from_json(j));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IngestionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kIngestion;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kIngestion;
  } catch (const DegenerateSearch& e) {
    std::cerr << "search failed: " << e.what() << "\n";
    return kSearch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

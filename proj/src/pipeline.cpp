#include "fuzzyembed/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/io.hpp"
#include "fuzzyembed/random.hpp"
#include "fuzzyembed/sentiment.hpp"

namespace fuzzyembed {

namespace {

constexpr std::uint64_t kSplitStream = 0x5350'4C49'54ULL;   // train/test shuffle
constexpr std::uint64_t kAnchorStream = 0x414E'4348'4F52ULL;  // random anchor draw

std::string opt_path(const std::filesystem::path& p) { return p.empty() ? "" : p.string(); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::size_t antecedent_total(const RuleBase& rb) {
  std::size_t n = 0;
  for (const Rule& r : rb.rules()) n += r.antecedents.size();
  return n;
}

double accuracy(std::span<const ClassIndex> pred, std::span<const ClassIndex> truth) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i] ? 1 : 0;
  return pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
}

std::vector<ClassIndex> predict(const RuleBase& rb, const FeatureMatrix& features) {
  std::vector<ClassIndex> out;
  for (const auto& p : classify_all(rb, features)) out.push_back(p.predicted);
  return out;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

std::string pm(const MeanStd& m) { return fmt::format("{:.3f} ± {:.3f}", m.mean, m.std); }

}  // namespace

void RunConfig::validate() const {
  if (texts.empty() == features.empty()) {
    throw ConfigError("exactly one of 'texts' or 'features' must be given");
  }
  if (!texts.empty() && lexicon.empty()) throw ConfigError("'texts' requires a 'lexicon' directory");
  if (embeddings.empty() && labels.empty()) {
    throw ConfigError("either 'embeddings' or precomputed 'labels' must be given");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("train_fraction must lie in (0, 1]");
  }
  if (k && *k < 2) throw ConfigError("k must be >= 2");
  if (!k && (k_min < 2 || k_max < k_min)) throw ConfigError("k range must satisfy 2 <= k_min <= k_max");
  if (local && local->m < 1) throw ConfigError("local.m must be >= 1");
  if (local && embeddings.empty()) throw ConfigError("local explanations need 'embeddings'");
  ga.validate();
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"embeddings", opt_path(c.embeddings)},
                   {"texts", opt_path(c.texts)},
                   {"features", opt_path(c.features)},
                   {"labels", opt_path(c.labels)},
                   {"lexicon", opt_path(c.lexicon)},
                   {"output_dir", opt_path(c.output_dir)},
                   {"k", c.k ? nlohmann::json(*c.k) : nlohmann::json()},
                   {"k_range", {c.k_min, c.k_max}},
                   {"kmeans",
                    {{"max_iter", c.kmeans.max_iter},
                     {"restarts", c.kmeans.restarts},
                     {"tolerance", c.kmeans.tolerance},
                     {"metric", c.kmeans.metric}}},
                   {"kind", kind_name(c.kind)},
                   {"ga", to_json(c.ga)},
                   {"trials", c.trials},
                   {"train_fraction", c.train_fraction},
                   {"seed", c.seed}};
  j["local"] = c.local ? nlohmann::json{{"anchor", c.local->anchor}, {"m", c.local->m}}
                       : nlohmann::json();
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "embeddings") c.embeddings = resolve(base_dir, v.get<std::string>());
      else if (key == "texts") c.texts = resolve(base_dir, v.get<std::string>());
      else if (key == "features") c.features = resolve(base_dir, v.get<std::string>());
      else if (key == "labels") c.labels = resolve(base_dir, v.get<std::string>());
      else if (key == "lexicon") c.lexicon = resolve(base_dir, v.get<std::string>());
      else if (key == "output_dir") c.output_dir = resolve(base_dir, v.get<std::string>());
      else if (key == "k") c.k = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
      else if (key == "k_range") {
        if (!v.is_array() || v.size() != 2) throw ConfigError("k_range must be [k_min, k_max]");
        c.k_min = v[0].get<std::size_t>();
        c.k_max = v[1].get<std::size_t>();
      } else if (key == "kmeans") {
        for (const auto& [kk, kv] : v.items()) {
          if (kk == "max_iter") c.kmeans.max_iter = kv.get<std::size_t>();
          else if (kk == "restarts") c.kmeans.restarts = kv.get<std::size_t>();
          else if (kk == "tolerance") c.kmeans.tolerance = kv.get<double>();
          else if (kk == "metric") c.kmeans.metric = kv.get<std::string>();
          else throw ConfigError(fmt::format("unknown kmeans key '{}'", kk));
        }
      } else if (key == "kind") c.kind = parse_kind(v.get<std::string>());
      else if (key == "loss") c.ga.loss = parse_loss(v.get<std::string>());
      else if (key == "ga") c.ga = ga_config_from_json(v, c.ga);
      else if (key == "trials") c.trials = v.get<std::size_t>();
      else if (key == "train_fraction") c.train_fraction = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "local") {
        if (v.is_null()) {
          c.local.reset();
        } else {
          LocalConfig l;
          l.anchor = v.value("anchor", l.anchor);
          l.m = v.value("m", l.m);
          c.local = l;
        }
      } else {
        throw ConfigError(fmt::format("unknown run config key '{}'", key));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("run config: {}", e.what()));
  }
  return c;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

TrialSummary summarize(std::span<const TrialResult> trials) {
  std::vector<double> acc, mcc_v, rules, ants, tacc, tmcc;
  for (const auto& t : trials) {
    acc.push_back(t.train_accuracy);
    mcc_v.push_back(t.train_mcc);
    rules.push_back(static_cast<double>(t.rules));
    ants.push_back(static_cast<double>(t.antecedents));
    if (t.test_accuracy) tacc.push_back(*t.test_accuracy);
    if (t.test_mcc) tmcc.push_back(*t.test_mcc);
  }
  TrialSummary s{mean_std(acc), mean_std(mcc_v), mean_std(rules), mean_std(ants), {}, {}};
  if (!tacc.empty()) s.test_accuracy = mean_std(tacc);
  if (!tmcc.empty()) s.test_mcc = mean_std(tmcc);
  return s;
}

std::uint64_t trial_seed(std::uint64_t run_seed, std::size_t trial) {
  return split_seed(run_seed, trial);
}

FeatureMatrix load_features(const RunConfig& config) {
  if (!config.features.empty()) return io::read_features_csv(config.features);
  const Lexicon lexicon = Lexicon::load(config.lexicon);
  const auto records = io::read_texts_jsonl(config.texts);
  std::vector<std::string> ids, texts;
  for (const auto& r : records) {
    ids.push_back(r.id);
    texts.push_back(r.text);
  }
  return batch_features(ids, texts, lexicon);
}

FeatureMatrix align_features(const FeatureMatrix& features, std::span<const std::string> ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    if (!index.emplace(features.ids()[i], i).second) {
      throw IngestionError(fmt::format("duplicate feature id '{}'", features.ids()[i]));
    }
  }
  std::vector<std::string> offending;
  std::vector<std::size_t> rows;
  std::unordered_map<std::string, bool> wanted;
  for (const auto& id : ids) {
    if (!wanted.emplace(id, true).second) {
      throw IngestionError(fmt::format("duplicate id '{}'", id));
    }
    const auto it = index.find(id);
    if (it == index.end()) {
      offending.push_back(id);
    } else {
      rows.push_back(it->second);
    }
  }
  for (const auto& id : features.ids()) {
    if (!wanted.contains(id)) offending.push_back(id);
  }
  if (!offending.empty()) {
    std::string list;
    for (std::size_t i = 0; i < offending.size() && i < 20; ++i) {
      list += (i ? ", " : "") + offending[i];
    }
    if (offending.size() > 20) list += fmt::format(", ... ({} total)", offending.size());
    throw IngestionMismatch(fmt::format("ids differ between inputs: {}", list), std::move(offending));
  }
  return features.select_rows(rows);
}

ClusterStage cluster_embeddings(const EmbeddingSet& embeddings, const RunConfig& config) {
  ClusterStage stage;
  if (config.k) {
    ClusterAssignment a = kmeans(embeddings, *config.k, config.seed, config.kmeans);
    stage.k = *config.k;
    stage.silhouette.push_back({stage.k, silhouette(embeddings, a.labels)});
    stage.labels = std::move(a.labels);
    return stage;
  }
  SweepResult sweep = sweep_k(embeddings, config.k_min, config.k_max, config.seed, config.kmeans);
  stage.k = sweep.best_k;
  stage.silhouette = sweep.rows;
  stage.labels = std::move(sweep.assignments[stage.k - config.k_min].labels);
  return stage;
}

TrialResult run_trial(const FeatureMatrix& data, int class_count, const RunConfig& config,
                      std::uint64_t seed) {
  if (!data.labels()) throw ConfigError("run_trial: data has no labels");
  const std::size_t n = data.rows();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> train_rows = order, test_rows;
  if (config.train_fraction < 1.0) {
    Rng rng(split_seed(seed, kSplitStream));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    const auto n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n))));
    train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
  }
  // constant columns carry no partition; fit on the rest
  const FeatureMatrix rows_only = data.select_rows(train_rows);
  std::vector<std::string> usable;
  for (std::size_t j = 0; j < rows_only.cols(); ++j) {
    const auto col = rows_only.column(j);
    if (std::adjacent_find(col.begin(), col.end(), std::not_equal_to<>()) != col.end()) {
      usable.push_back(rows_only.columns()[j]);
    }
  }
  if (usable.empty()) throw DegeneratePartition("every feature column is constant on the training rows");
  const FeatureMatrix train = rows_only.select_columns(usable);
  std::vector<LinguisticVariable> variables;
  for (std::size_t j = 0; j < train.cols(); ++j) {
    variables.push_back(build_partition(train.column(j), config.kind, train.columns()[j]));
  }
  const LabeledData labeled = bind_labels(train, class_count);
  GaConfig ga = config.ga;
  ga.seed = seed;
  EvolutionResult evo = evolve(labeled, variables, ga);

  const auto train_pred = predict(evo.rulebase, train);
  std::optional<double> test_acc, test_mcc;
  if (!test_rows.empty()) {
    const FeatureMatrix test = data.select_rows(test_rows).select_columns(usable);
    const auto pred = predict(evo.rulebase, test);
    test_acc = accuracy(pred, *test.labels());
    test_mcc = mcc(pred, *test.labels(), class_count);
  }
  auto report = per_rule_report(evo.rulebase, labeled);
  const std::size_t rules = evo.rulebase.size();
  const std::size_t ants = antecedent_total(evo.rulebase);
  return TrialResult{.trial = 0,
                     .seed = seed,
                     .train_accuracy = accuracy(train_pred, labeled.labels),
                     .train_mcc = mcc(train_pred, labeled.labels, class_count),
                     .rules = rules,
                     .antecedents = ants,
                     .test_accuracy = test_acc,
                     .test_mcc = test_mcc,
                     .fitness = evo.fitness,
                     .rulebase = std::move(evo.rulebase),
                     .report = std::move(report),
                     .history = std::move(evo.history)};
}

std::string trials_csv(std::span<const TrialResult> trials) {
  std::string out = "trial,seed,train_accuracy,train_mcc,rules,antecedents,fitness,test_accuracy,test_mcc\n";
  for (const auto& t : trials) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", t.trial, t.seed,
                       io::format_double(t.train_accuracy), io::format_double(t.train_mcc), t.rules,
                       t.antecedents, io::format_double(t.fitness.total), fmt_opt(t.test_accuracy),
                       fmt_opt(t.test_mcc));
  }
  return out;
}

namespace {

std::vector<TrialResult> run_trials(const FeatureMatrix& data, int class_count,
                                    const RunConfig& config) {
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, config.trials);
  std::vector<std::optional<TrialResult>> slots(config.trials);
  for (std::size_t start = 0; start < config.trials; start += workers) {
    std::vector<std::future<TrialResult>> batch;
    const std::size_t end = std::min(config.trials, start + workers);
    for (std::size_t t = start; t < end; ++t) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, [&, t] {
        TrialResult r = run_trial(data, class_count, config, trial_seed(config.seed, t + 1));
        r.trial = t + 1;
        return r;
      }));
    }
    for (std::size_t t = start; t < end; ++t) slots[t] = batch[t - start].get();
  }
  std::vector<TrialResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string summary_csv(const TrialSummary& s) {
  std::string out = "metric,mean,std\n";
  auto row = [&](std::string_view name, const MeanStd& m) {
    out += fmt::format("{},{},{}\n", name, io::format_double(m.mean), io::format_double(m.std));
  };
  row("train_accuracy", s.accuracy);
  row("train_mcc", s.mcc);
  row("rules", s.rules);
  row("antecedents", s.antecedents);
  if (s.test_accuracy) row("test_accuracy", *s.test_accuracy);
  if (s.test_mcc) row("test_mcc", *s.test_mcc);
  return out;
}

std::string summary_md(const TrialSummary& s, const RunConfig& c, std::size_t k) {
  std::string out = fmt::format("Results over {} trials, k = {}, seed {}.\n\n", c.trials, k, c.seed);
  out += "| Loss | Fuzzy set | Accuracy | MCC | Rules | Antecedents |";
  std::string sep = "|---|---|---|---|---|---|";
  if (s.test_accuracy) {
    out += " Hold-out accuracy |";
    sep += "---|";
  }
  out += "\n" + sep + "\n";
  out += fmt::format("| {} | {} | {} | {} | {} | {} |", loss_name(c.ga.loss), kind_name(c.kind),
                     pm(s.accuracy), pm(s.mcc), pm(s.rules), pm(s.antecedents));
  if (s.test_accuracy) out += fmt::format(" {} |", pm(*s.test_accuracy));
  return out + "\n";
}

std::string silhouette_csv(std::span<const SilhouetteRow> rows) {
  std::string out = "k,silhouette\n";
  for (const auto& r : rows) out += fmt::format("{},{}\n", r.k, io::format_double(r.silhouette));
  return out;
}

std::size_t best_trial_index(std::span<const TrialResult> trials) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].fitness.total > trials[best].fitness.total) best = i;
  }
  return best;
}

/// Fit and write everything for rows already aligned with `embeddings`
/// (which may be empty when labels were supplied).
PipelineResult fit_and_write(const EmbeddingSet* embeddings, FeatureMatrix features,
                             const RunConfig& config, const std::filesystem::path& out_dir) {
  PipelineResult result;
  result.output_dir = out_dir;
  if (embeddings) {
    result.clusters = cluster_embeddings(*embeddings, config);
  } else {
    const io::LabelTable table = io::read_labels_csv(config.labels);
    FeatureMatrix lab(std::vector<std::string>{"cluster"}, table.ids,
                      std::vector<double>(table.labels.begin(), table.labels.end()));
    const FeatureMatrix aligned = align_features(lab, features.ids());
    for (std::size_t i = 0; i < aligned.rows(); ++i) {
      result.clusters.labels.push_back(static_cast<int>(aligned.at(i, 0)));
    }
    result.clusters.k = static_cast<std::size_t>(
        *std::max_element(result.clusters.labels.begin(), result.clusters.labels.end()) + 1);
  }
  features.set_labels(result.clusters.labels);
  const int class_count = static_cast<int>(result.clusters.k);

  result.trials = run_trials(features, class_count, config);
  result.summary = summarize(result.trials);
  result.best_trial = best_trial_index(result.trials);
  const TrialResult& best = result.trials[result.best_trial];

  io::write_text_file(out_dir / "clusters.csv", io::labels_csv(features.ids(), result.clusters.labels));
  if (!result.clusters.silhouette.empty()) {
    io::write_text_file(out_dir / "silhouette.csv", silhouette_csv(result.clusters.silhouette));
  }
  io::write_text_file(out_dir / "trials.csv", trials_csv(result.trials));
  io::write_text_file(out_dir / "summary.csv", summary_csv(result.summary));
  io::write_text_file(out_dir / "summary.md", summary_md(result.summary, config, result.clusters.k));
  nlohmann::json rb = to_json(best.rulebase, best.report);
  rb["trial"] = best.trial;
  rb["trial_seed"] = best.seed;
  io::write_text_file(out_dir / "rulebase.json", rb.dump(2) + "\n");
  io::write_text_file(out_dir / "rules.md", render_markdown(best.rulebase, best.report));
  io::write_text_file(out_dir / "history.csv", history_csv(best.history));
  io::write_text_file(out_dir / "config.json", to_json(config).dump(2) + "\n");
  return result;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  config.validate();
  FeatureMatrix features = load_features(config);
  if (config.embeddings.empty()) {
    return fit_and_write(nullptr, std::move(features), config, config.output_dir);
  }
  const EmbeddingSet embeddings = io::read_embeddings_csv(config.embeddings);
  FeatureMatrix aligned = align_features(features, embeddings.ids());
  if (config.local && config.local->m > embeddings.size()) {
    throw ConfigError(fmt::format("local subset size {} exceeds {} samples", config.local->m,
                                  embeddings.size()));
  }
  return fit_and_write(&embeddings, std::move(aligned), config, config.output_dir);
}

LocalResult run_local_explanation(const RunConfig& config) {
  config.validate();
  if (!config.local) throw ConfigError("local explanation requested without a 'local' section");
  const EmbeddingSet embeddings = io::read_embeddings_csv(config.embeddings);
  const FeatureMatrix features = align_features(load_features(config), embeddings.ids());
  if (config.local->m > embeddings.size()) {
    throw ConfigError(fmt::format("local subset size {} exceeds {} samples", config.local->m,
                                  embeddings.size()));
  }

  LocalResult result;
  if (config.local->anchor == "random") {
    Rng rng(split_seed(config.seed, kAnchorStream));
    result.anchor_id = embeddings.ids()[uniform_index(rng, embeddings.size())];
  } else {
    result.anchor_id = config.local->anchor;
  }
  std::vector<std::size_t> rows = nearest_rows(embeddings, result.anchor_id, config.local->m);
  const std::size_t anchor_row = rows.front();
  std::string members = "id,distance\n";
  for (std::size_t r : rows) {
    result.members.push_back(embeddings.ids()[r]);
    members += fmt::format("{},{}\n", embeddings.ids()[r],
                           io::format_double(std::sqrt(squared_distance(
                               embeddings.row(r), embeddings.row(anchor_row)))));
  }
  // Fit on the subset in input order so that m = n reproduces the global run.
  std::sort(rows.begin(), rows.end());
  const EmbeddingSet sub_embeddings = embeddings.select_rows(rows);
  FeatureMatrix sub_features = features.select_rows(rows);

  RunConfig local = config;
  if (!local.k) local.k_max = std::min(local.k_max, sub_embeddings.size() - 1);
  const auto out_dir = config.output_dir / "local" / result.anchor_id;
  result.pipeline = fit_and_write(&sub_embeddings, std::move(sub_features), local, out_dir);
  io::write_text_file(out_dir / "members.csv", members);
  return result;
}

EvaluationReport evaluate(const std::filesystem::path& rulebase_file,
                          const std::filesystem::path& features_file,
                          const std::filesystem::path& labels_file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_text_file(rulebase_file));
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(fmt::format("{}: {}", rulebase_file.string(), e.what()));
  }
  const RuleBase rb = rulebase_from_json(j);
  if (!rb.scored()) throw NotScored(fmt::format("{}: rule base carries no scores", rulebase_file.string()));
  if (rb.empty()) throw EmptyRuleBase(fmt::format("{}: rule base has no rules", rulebase_file.string()));

  const FeatureMatrix raw = io::read_features_csv(features_file);
  std::vector<std::string> names;
  for (const auto& v : rb.variables()) {
    if (std::find(raw.columns().begin(), raw.columns().end(), v.name()) == raw.columns().end()) {
      throw ConfigError(fmt::format("features file has no column '{}' required by the rule base",
                                    v.name()));
    }
    names.push_back(v.name());
  }
  FeatureMatrix features = raw.select_columns(names);

  const io::LabelTable table = io::read_labels_csv(labels_file);
  FeatureMatrix lab(std::vector<std::string>{"cluster"}, table.ids,
                    std::vector<double>(table.labels.begin(), table.labels.end()));
  const FeatureMatrix aligned = align_features(lab, features.ids());
  std::vector<ClassIndex> labels;
  for (std::size_t i = 0; i < aligned.rows(); ++i) labels.push_back(static_cast<int>(aligned.at(i, 0)));
  features.set_labels(labels);
  const LabeledData data = bind_labels(features, rb.class_count());

  const auto pred = predict(rb, features);
  return {accuracy(pred, labels), mcc(pred, labels, rb.class_count()), labels.size(),
          per_rule_report(rb, data)};
}

nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& rr : r.rules) {
    rules.push_back({{"rule", rr.rule},
                     {"dominance", rr.dominance},
                     {"accuracy", rr.accuracy ? nlohmann::json(*rr.accuracy) : nlohmann::json()},
                     {"fire_count", rr.fire_count}});
  }
  return {{"accuracy", r.accuracy}, {"mcc", r.mcc}, {"samples", r.samples}, {"rules", rules}};
}

}  // namespace fuzzyembed

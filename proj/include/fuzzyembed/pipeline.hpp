#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzyembed/clustering.hpp"
#include "fuzzyembed/dataset.hpp"
#include "fuzzyembed/fuzzy.hpp"
#include "fuzzyembed/optimizer.hpp"
#include "fuzzyembed/rulebase.hpp"

namespace fuzzyembed {

struct LocalConfig {
  /// Embedding id, or "random" to draw one with the run seed.
  std::string anchor = "random";
  std::size_t m = 1000;
};

struct RunConfig {
  std::filesystem::path embeddings;
  std::filesystem::path texts;
  std::filesystem::path features;
  /// Precomputed cluster labels (id,cluster); skips clustering when set.
  std::filesystem::path labels;
  std::filesystem::path lexicon;
  std::filesystem::path output_dir = "out";

  /// Fixed k; otherwise the silhouette argmax over [k_min, k_max].
  std::optional<std::size_t> k;
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  KMeansOptions kmeans;

  FuzzyKind kind = FuzzyKind::IT2;
  GaConfig ga;
  std::size_t trials = 30;
  /// Fraction of rows used for fitting; the rest is scored as hold-out.
  double train_fraction = 1.0;
  std::uint64_t seed = 0;
  std::optional<LocalConfig> local;

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Relative paths are resolved against `base_dir`. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

struct TrialResult {
  std::size_t trial = 0;  // 1-based
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  double train_mcc = 0.0;
  std::size_t rules = 0;
  std::size_t antecedents = 0;
  std::optional<double> test_accuracy;
  std::optional<double> test_mcc;
  FitnessBreakdown fitness;
  RuleBase rulebase;
  std::vector<RuleReport> report;
  std::vector<GenerationStats> history;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single trial
};

struct TrialSummary {
  MeanStd accuracy;
  MeanStd mcc;
  MeanStd rules;
  MeanStd antecedents;
  std::optional<MeanStd> test_accuracy;
  std::optional<MeanStd> test_mcc;
};

MeanStd mean_std(std::span<const double> values);
TrialSummary summarize(std::span<const TrialResult> trials);

/// Seed of trial t (1-based) under run seed s.
std::uint64_t trial_seed(std::uint64_t run_seed, std::size_t trial);

/// Features from the texts (through the lexicon) or from a features CSV.
FeatureMatrix load_features(const RunConfig& config);

/// Reorder `features` to follow `ids`. Throws IngestionMismatch naming every
/// id present on one side only.
FeatureMatrix align_features(const FeatureMatrix& features, std::span<const std::string> ids);

struct ClusterStage {
  std::size_t k = 0;
  std::vector<int> labels;
  std::vector<SilhouetteRow> silhouette;
};

ClusterStage cluster_embeddings(const EmbeddingSet& embeddings, const RunConfig& config);

/// One independent fit on `data` (features with labels) using `seed` for
/// the split and the GA.
TrialResult run_trial(const FeatureMatrix& data, int class_count, const RunConfig& config,
                      std::uint64_t seed);

struct PipelineResult {
  std::filesystem::path output_dir;
  ClusterStage clusters;
  std::vector<TrialResult> trials;
  TrialSummary summary;
  std::size_t best_trial = 0;  // index into trials
};

/// Ingest, cluster, fit `trials` seeds and write to config.output_dir:
/// clusters.csv, silhouette.csv, trials.csv, summary.csv, summary.md,
/// rulebase.json, rules.md, history.csv and config.json.
PipelineResult run_pipeline(const RunConfig& config);

struct LocalResult {
  std::string anchor_id;
  std::vector<std::string> members;  // nearest first
  PipelineResult pipeline;
};

/// Same report family for the m nearest neighbours of the anchor, written
/// under output_dir/local/<anchor id>/ along with members.csv.
LocalResult run_local_explanation(const RunConfig& config);

struct EvaluationReport {
  double accuracy = 0.0;
  double mcc = 0.0;
  std::size_t samples = 0;
  std::vector<RuleReport> rules;
};

/// Re-score a saved rule base. Feature columns are bound by variable name.
EvaluationReport evaluate(const std::filesystem::path& rulebase_file,
                          const std::filesystem::path& features_file,
                          const std::filesystem::path& labels_file);

nlohmann::json to_json(const EvaluationReport& report);

/// trials.csv content for the given results.
std::string trials_csv(std::span<const TrialResult> trials);

}  // namespace fuzzyembed

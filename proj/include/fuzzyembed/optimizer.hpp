#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzyembed/dataset.hpp"
#include "fuzzyembed/fuzzy.hpp"
#include "fuzzyembed/rulebase.hpp"

namespace fuzzyembed {

enum class LossKind { MCC, Composite };

std::string_view loss_name(LossKind loss);
LossKind parse_loss(std::string_view name);

struct GaConfig {
  std::size_t max_rules = kDefaultMaxRules;
  std::size_t max_ants = kDefaultMaxAnts;
  std::size_t generations = 300;
  std::size_t population = 30;
  double crossover_prob = 0.9;
  /// Per-gene mutation probability; 1 / genome length when unset.
  std::optional<double> mutation_prob;
  std::size_t elitism_count = 1;
  std::size_t tournament_size = 3;
  double prune_threshold = kDefaultPruneThreshold;
  LossKind loss = LossKind::MCC;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const GaConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
GaConfig ga_config_from_json(const nlohmann::json& j, GaConfig base = {});

/// Shape of the integer genome: max_rules blocks of
/// [var_0, label_0, ..., var_{A-1}, label_{A-1}, consequent].
/// A variable gene equal to variable_count marks an unused slot.
struct GenomeLayout {
  std::size_t max_rules = kDefaultMaxRules;
  std::size_t max_ants = kDefaultMaxAnts;
  std::size_t variable_count = 0;
  int class_count = 0;

  std::size_t block_size() const noexcept { return 2 * max_ants + 1; }
  std::size_t length() const noexcept { return max_rules * block_size(); }
  int unused_variable() const noexcept { return static_cast<int>(variable_count); }
  /// Number of admissible values of the gene at `pos`.
  int gene_cardinality(std::size_t pos) const noexcept;
};

struct Chromosome {
  std::vector<int> genes;

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Total over any gene vector of the right length: out-of-range genes are
/// reduced modulo their cardinality, blocks without used slots are dropped,
/// and repeated variables within a block keep the first occurrence.
RuleBase decode(const Chromosome& chromosome, const GenomeLayout& layout,
                std::span<const LinguisticVariable> variables);

struct FitnessBreakdown {
  double mcc = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double total = 0.0;
};

/// Matthews coefficient of a 2x2 confusion matrix; 0 when the denominator vanishes.
double mcc_binary(double tp, double tn, double fp, double fn);
/// Multiclass MCC over the full confusion matrix (reduces to the binary
/// form for two classes). Throws Error on empty or mismatched input.
double mcc(std::span<const ClassIndex> predictions, std::span<const ClassIndex> truths,
           int class_count);

/// Mean antecedent count normalized by max_ants. Throws EmptyRuleBase.
double l1_size(const RuleBase& rb, std::size_t max_ants);
/// Fraction of rules whose cached dominance is strictly above h.
/// Throws EmptyRuleBase or NotScored.
double l2_quality(const RuleBase& rb, double h);
/// 0.95 MCC + 0.05 (0.5 (1 - l1) + 0.5 l2).
constexpr double composite_fitness(double mcc, double l1, double l2) noexcept {
  return 0.95 * mcc + 0.05 * (0.5 * (1.0 - l1) + 0.5 * l2);
}

/// Fitness of an individual that yields no usable rule base sits in
/// [-2, -1], below every valid composite or MCC value.
inline constexpr double kInvalidFitnessBase = -2.0;

struct Evaluation {
  FitnessBreakdown fitness;
  /// Scored and pruned rule base; empty when the individual is invalid.
  std::optional<RuleBase> pruned;
  bool decoded_empty = false;

  bool valid() const noexcept { return pruned.has_value(); }
};

/// Score `decoded` on the training data, take l2 from those scores, prune at
/// h, and compute MCC and l1 on the pruned rule base.
Evaluation evaluate_rulebase(RuleBase decoded, const LabeledData& data,
                             const MembershipTable& table, const GaConfig& config);
Evaluation evaluate_rulebase(RuleBase decoded, const LabeledData& data, const GaConfig& config);

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double best_mcc = 0.0;
  std::size_t rules = 0;
  std::size_t antecedents = 0;
};

struct EvolutionResult {
  RuleBase rulebase;
  FitnessBreakdown fitness;
  Chromosome best;
  std::vector<GenerationStats> history;
};

using GenerationObserver = std::function<void(std::size_t, std::span<const Chromosome>)>;

/// Seeded generational GA: tournament selection, two-point crossover,
/// uniform per-gene mutation and elitism. History row 0 is the initial
/// population. Throws DegenerateSearch when a whole generation decodes to
/// empty rule bases or no individual ever survives pruning.
EvolutionResult evolve(const LabeledData& data, std::span<const LinguisticVariable> variables,
                       const GaConfig& config, const GenerationObserver& observer = {});

/// Header: generation,best_fitness,mean_fitness,best_mcc,rules,antecedents
std::string history_csv(std::span<const GenerationStats> history);

}  // namespace fuzzyembed

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fuzzyembed/dataset.hpp"
#include "fuzzyembed/fuzzy.hpp"

namespace fuzzyembed {

inline constexpr std::size_t kDefaultMaxRules = 15;
inline constexpr std::size_t kDefaultMaxAnts = 3;
inline constexpr double kDefaultPruneThreshold = 0.05;

struct Antecedent {
  std::size_t variable = 0;
  Label label = Label::Low;

  friend bool operator==(const Antecedent&, const Antecedent&) = default;
};

/// IF x[a.variable] is a.label AND ... THEN consequent.
struct Rule {
  std::vector<Antecedent> antecedents;
  ClassIndex consequent = 0;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleScore {
  double support = 0.0;
  double confidence = 0.0;
  double dominance = 0.0;
  /// No training sample carries this rule's consequent class.
  bool consequent_absent = false;

  friend bool operator==(const RuleScore&, const RuleScore&) = default;
};

/// Truth degrees of every (sample, variable, label) triple.
class MembershipTable {
 public:
  MembershipTable(const FeatureMatrix& features, std::span<const LinguisticVariable> variables);

  std::size_t rows() const noexcept { return rows_; }
  TruthDegree at(std::size_t row, std::size_t variable, Label label) const noexcept {
    return degrees_[(row * variables_ + variable) * 3 + static_cast<std::size_t>(label)];
  }

 private:
  std::size_t rows_;
  std::size_t variables_;
  std::vector<TruthDegree> degrees_;
};

class RuleBase {
 public:
  /// Throws ConfigError when a rule is empty, exceeds max_ants, repeats a
  /// variable, or references a variable or class out of range.
  RuleBase(std::vector<Rule> rules, std::vector<LinguisticVariable> variables, int class_count,
           std::size_t max_ants = kDefaultMaxAnts);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const std::vector<LinguisticVariable>& variables() const noexcept { return variables_; }
  int class_count() const noexcept { return class_count_; }
  std::size_t max_ants() const noexcept { return max_ants_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

  bool scored() const noexcept { return scores_.has_value(); }
  /// Majority class of the data last used for scoring.
  ClassIndex default_class() const noexcept { return default_class_; }
  /// Throws NotScored before score() or set_scores().
  const std::vector<RuleScore>& scores() const;
  double dominance(std::size_t rule) const { return scores().at(rule).dominance; }

  /// Compute support, confidence and dominance of every rule on `data`
  /// and cache them; sets default_class to the majority class.
  void score(const LabeledData& data);
  void score(const LabeledData& data, const MembershipTable& table);

  /// Install previously computed scores (deserialization).
  void set_scores(std::vector<RuleScore> scores, ClassIndex default_class);

 private:
  void validate() const;

  std::vector<Rule> rules_;
  std::vector<LinguisticVariable> variables_;
  int class_count_;
  std::size_t max_ants_;
  ClassIndex default_class_ = 0;
  std::optional<std::vector<RuleScore>> scores_;
};

struct ScoredPrediction {
  ClassIndex predicted = 0;
  std::optional<std::size_t> winning_rule;
  double association = 0.0;
  bool covered = false;

  friend bool operator==(const ScoredPrediction&, const ScoredPrediction&) = default;
};

struct RuleReport {
  std::size_t rule = 0;
  double dominance = 0.0;
  /// Fraction of won samples whose true class is the consequent; empty when
  /// the rule never wins.
  std::optional<double> accuracy;
  std::size_t fire_count = 0;
};

/// Product t-norm over antecedent degrees, lower and upper separately.
TruthDegree firing_strength(const Rule& rule, std::span<const double> x,
                            std::span<const LinguisticVariable> variables);
TruthDegree firing_strength(const Rule& rule, const MembershipTable& table, std::size_t row);

/// Midpoint type reduction of a firing interval.
constexpr double scalar_strength(TruthDegree d) noexcept { return 0.5 * (d.lower + d.upper); }

/// Mean firing strength over the samples of the rule's consequent class;
/// 0 when there are none.
double support(const RuleBase& rb, std::size_t rule, const LabeledData& data);
/// Share of the rule's firing mass among all rules on its class samples;
/// 0 when that total is 0.
double confidence(const RuleBase& rb, std::size_t rule, const LabeledData& data);
/// support * confidence, computed afresh (does not touch the cache).
double dominance_score(const RuleBase& rb, std::size_t rule, const LabeledData& data);

/// Firing strength times cached dominance. Throws NotScored.
double association_degree(const RuleBase& rb, std::size_t rule, std::span<const double> x);

/// Winner-take-all by association degree; ties go to the lower rule index.
/// Throws EmptyRuleBase or NotScored.
ScoredPrediction classify(const RuleBase& rb, std::span<const double> x);
ScoredPrediction classify(const RuleBase& rb, const MembershipTable& table, std::size_t row);
std::vector<ScoredPrediction> classify_all(const RuleBase& rb, const FeatureMatrix& features);

/// Keep the rules with dominance >= h (in order) and rescore them on `data`.
/// Throws NotScored, or EmptyRuleBase when nothing survives.
RuleBase prune(const RuleBase& rb, const LabeledData& data, double h);
RuleBase prune(const RuleBase& rb, const LabeledData& data, const MembershipTable& table,
               double h);

std::vector<RuleReport> per_rule_report(const RuleBase& rb, const LabeledData& data);

/// Antecedents referencing variables by name, plus cached scores when present.
nlohmann::json to_json(const RuleBase& rb,
                       std::span<const RuleReport> report = std::span<const RuleReport>{});
RuleBase rulebase_from_json(const nlohmann::json& j);
/// Per-rule training report stored alongside the rules, if any.
std::vector<RuleReport> report_from_json(const nlohmann::json& j);

/// One row per rule: cluster, label per variable (or "irrelevant"), DS, Acc.
std::string render_markdown(const RuleBase& rb,
                            std::span<const RuleReport> report = std::span<const RuleReport>{});

}  // namespace fuzzyembed

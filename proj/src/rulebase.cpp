#include "fuzzyembed/rulebase.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"

namespace fuzzyembed {

MembershipTable::MembershipTable(const FeatureMatrix& features,
                                 std::span<const LinguisticVariable> variables)
    : rows_(features.rows()), variables_(variables.size()) {
  if (features.cols() != variables.size()) {
    throw ConfigError(fmt::format("{} feature columns for {} linguistic variables",
                                  features.cols(), variables.size()));
  }
  degrees_.reserve(rows_ * variables_ * 3);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t v = 0; v < variables_; ++v) {
      for (Label l : kLabels) degrees_.push_back(variables[v].membership(l, features.at(i, v)));
    }
  }
}

RuleBase::RuleBase(std::vector<Rule> rules, std::vector<LinguisticVariable> variables,
                   int class_count, std::size_t max_ants)
    : rules_(std::move(rules)),
      variables_(std::move(variables)),
      class_count_(class_count),
      max_ants_(max_ants) {
  validate();
}

void RuleBase::validate() const {
  if (class_count_ < 1) throw ConfigError("rule base needs at least one class");
  if (max_ants_ < 1) throw ConfigError("max_ants must be at least 1");
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    const Rule& rule = rules_[r];
    if (rule.antecedents.empty()) throw ConfigError(fmt::format("rule {} has no antecedents", r));
    if (rule.antecedents.size() > max_ants_) {
      throw ConfigError(fmt::format("rule {} has {} antecedents (max {})", r,
                                    rule.antecedents.size(), max_ants_));
    }
    if (rule.consequent < 0 || rule.consequent >= class_count_) {
      throw ConfigError(fmt::format("rule {} consequent {} outside [0, {})", r, rule.consequent,
                                    class_count_));
    }
    std::unordered_set<std::size_t> seen;
    for (const Antecedent& a : rule.antecedents) {
      if (a.variable >= variables_.size()) {
        throw ConfigError(fmt::format("rule {} references variable {}", r, a.variable));
      }
      if (!seen.insert(a.variable).second) {
        throw ConfigError(fmt::format("rule {} repeats variable {}", r, a.variable));
      }
    }
  }
}

const std::vector<RuleScore>& RuleBase::scores() const {
  if (!scores_) throw NotScored("rule base has not been scored");
  return *scores_;
}

void RuleBase::set_scores(std::vector<RuleScore> scores, ClassIndex default_class) {
  if (scores.size() != rules_.size()) {
    throw ConfigError(fmt::format("{} scores for {} rules", scores.size(), rules_.size()));
  }
  if (default_class < 0 || default_class >= class_count_) {
    throw ConfigError(fmt::format("default class {} outside [0, {})", default_class, class_count_));
  }
  scores_ = std::move(scores);
  default_class_ = default_class;
}

TruthDegree firing_strength(const Rule& rule, std::span<const double> x,
                            std::span<const LinguisticVariable> variables) {
  TruthDegree w{1.0, 1.0};
  for (const Antecedent& a : rule.antecedents) {
    const TruthDegree d = variables[a.variable].membership(a.label, x[a.variable]);
    w.lower *= d.lower;
    w.upper *= d.upper;
  }
  return w;
}

TruthDegree firing_strength(const Rule& rule, const MembershipTable& table, std::size_t row) {
  TruthDegree w{1.0, 1.0};
  for (const Antecedent& a : rule.antecedents) {
    const TruthDegree d = table.at(row, a.variable, a.label);
    w.lower *= d.lower;
    w.upper *= d.upper;
  }
  return w;
}

namespace {

/// strengths[r * n + i] = scalar firing strength of rule r on sample i.
std::vector<double> strength_matrix(const RuleBase& rb, const MembershipTable& table) {
  const std::size_t n = table.rows();
  std::vector<double> w(rb.size() * n);
  for (std::size_t r = 0; r < rb.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      w[r * n + i] = scalar_strength(firing_strength(rb.rules()[r], table, i));
    }
  }
  return w;
}

std::vector<RuleScore> compute_scores(const RuleBase& rb, const LabeledData& data,
                                      const MembershipTable& table) {
  if (table.rows() != data.size()) {
    throw ConfigError(fmt::format("membership table has {} rows, data {}", table.rows(),
                                  data.size()));
  }
  const std::size_t n = data.size();
  const std::vector<double> w = strength_matrix(rb, table);
  std::vector<double> total(n, 0.0);
  for (std::size_t r = 0; r < rb.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) total[i] += w[r * n + i];
  }

  std::vector<RuleScore> scores(rb.size());
  for (std::size_t r = 0; r < rb.size(); ++r) {
    const ClassIndex cls = rb.rules()[r].consequent;
    double own = 0.0;
    double all = 0.0;
    std::size_t members = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (data.labels[i] != cls) continue;
      ++members;
      own += w[r * n + i];
      all += total[i];
    }
    RuleScore& s = scores[r];
    s.consequent_absent = members == 0;
    s.support = members == 0 ? 0.0 : own / static_cast<double>(members);
    s.confidence = all > 0.0 ? own / all : 0.0;
    s.dominance = s.support * s.confidence;
  }
  return scores;
}

ClassIndex majority_class(const LabeledData& data) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(data.class_count, 1)), 0);
  for (ClassIndex c : data.labels) ++counts.at(static_cast<std::size_t>(c));
  return static_cast<ClassIndex>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

template <typename StrengthFn>
ScoredPrediction pick_winner(const RuleBase& rb, StrengthFn&& strength) {
  if (rb.empty()) throw EmptyRuleBase("cannot classify with an empty rule base");
  const auto& scores = rb.scores();
  ScoredPrediction best{rb.default_class(), std::nullopt, 0.0, false};
  for (std::size_t r = 0; r < rb.size(); ++r) {
    const double as = strength(r) * scores[r].dominance;
    if (as > best.association) {
      best = {rb.rules()[r].consequent, r, as, true};
    }
  }
  return best;
}

}  // namespace

void RuleBase::score(const LabeledData& data) { score(data, MembershipTable(*data.features, variables_)); }

void RuleBase::score(const LabeledData& data, const MembershipTable& table) {
  if (data.class_count > class_count_) {
    throw ConfigError(fmt::format("data has {} classes, rule base {}", data.class_count,
                                  class_count_));
  }
  scores_ = compute_scores(*this, data, table);
  default_class_ = data.size() == 0 ? 0 : majority_class(data);
}

double support(const RuleBase& rb, std::size_t rule, const LabeledData& data) {
  const ClassIndex cls = rb.rules().at(rule).consequent;
  double own = 0.0;
  std::size_t members = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != cls) continue;
    ++members;
    own += scalar_strength(firing_strength(rb.rules()[rule], data.row(i), rb.variables()));
  }
  return members == 0 ? 0.0 : own / static_cast<double>(members);
}

double confidence(const RuleBase& rb, std::size_t rule, const LabeledData& data) {
  const ClassIndex cls = rb.rules().at(rule).consequent;
  double own = 0.0;
  double all = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != cls) continue;
    for (std::size_t r = 0; r < rb.size(); ++r) {
      const double w = scalar_strength(firing_strength(rb.rules()[r], data.row(i), rb.variables()));
      all += w;
      if (r == rule) own += w;
    }
  }
  return all > 0.0 ? own / all : 0.0;
}

double dominance_score(const RuleBase& rb, std::size_t rule, const LabeledData& data) {
  return support(rb, rule, data) * confidence(rb, rule, data);
}

double association_degree(const RuleBase& rb, std::size_t rule, std::span<const double> x) {
  const double ds = rb.dominance(rule);
  return scalar_strength(firing_strength(rb.rules().at(rule), x, rb.variables())) * ds;
}

ScoredPrediction classify(const RuleBase& rb, std::span<const double> x) {
  if (x.size() != rb.variables().size()) {
    throw ConfigError(fmt::format("sample has {} values, rule base expects {}", x.size(),
                                  rb.variables().size()));
  }
  return pick_winner(rb, [&](std::size_t r) {
    return scalar_strength(firing_strength(rb.rules()[r], x, rb.variables()));
  });
}

ScoredPrediction classify(const RuleBase& rb, const MembershipTable& table, std::size_t row) {
  return pick_winner(rb, [&](std::size_t r) {
    return scalar_strength(firing_strength(rb.rules()[r], table, row));
  });
}

std::vector<ScoredPrediction> classify_all(const RuleBase& rb, const FeatureMatrix& features) {
  const MembershipTable table(features, rb.variables());
  std::vector<ScoredPrediction> out;
  out.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out.push_back(classify(rb, table, i));
  return out;
}

RuleBase prune(const RuleBase& rb, const LabeledData& data, double h) {
  return prune(rb, data, MembershipTable(*data.features, rb.variables()), h);
}

RuleBase prune(const RuleBase& rb, const LabeledData& data, const MembershipTable& table,
               double h) {
  const auto& scores = rb.scores();
  std::vector<Rule> kept;
  for (std::size_t r = 0; r < rb.size(); ++r) {
    if (scores[r].dominance >= h) kept.push_back(rb.rules()[r]);
  }
  if (kept.empty()) {
    throw EmptyRuleBase(fmt::format("no rule reaches dominance threshold {}", h));
  }
  RuleBase out(std::move(kept), rb.variables(), rb.class_count(), rb.max_ants());
  out.score(data, table);
  return out;
}

std::vector<RuleReport> per_rule_report(const RuleBase& rb, const LabeledData& data) {
  const auto& scores = rb.scores();
  std::vector<RuleReport> report(rb.size());
  std::vector<std::size_t> correct(rb.size(), 0);
  for (std::size_t r = 0; r < rb.size(); ++r) {
    report[r].rule = r;
    report[r].dominance = scores[r].dominance;
  }
  if (!rb.empty()) {
    const MembershipTable table(*data.features, rb.variables());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const ScoredPrediction p = classify(rb, table, i);
      if (!p.winning_rule) continue;
      ++report[*p.winning_rule].fire_count;
      if (p.predicted == data.labels[i]) ++correct[*p.winning_rule];
    }
  }
  for (std::size_t r = 0; r < rb.size(); ++r) {
    if (report[r].fire_count > 0) {
      report[r].accuracy =
          static_cast<double>(correct[r]) / static_cast<double>(report[r].fire_count);
    }
  }
  return report;
}

nlohmann::json to_json(const RuleBase& rb, std::span<const RuleReport> report) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : rb.variables()) vars.push_back(to_json(v));
  nlohmann::json rules = nlohmann::json::array();
  for (std::size_t r = 0; r < rb.size(); ++r) {
    const Rule& rule = rb.rules()[r];
    nlohmann::json ants = nlohmann::json::array();
    for (const Antecedent& a : rule.antecedents) {
      ants.push_back({{"variable", rb.variables()[a.variable].name()}, {"label", label_name(a.label)}});
    }
    nlohmann::json jr{{"antecedents", ants}, {"consequent", rule.consequent}};
    if (rb.scored()) {
      const RuleScore& s = rb.scores()[r];
      jr["support"] = s.support;
      jr["confidence"] = s.confidence;
      jr["dominance"] = s.dominance;
    }
    if (r < report.size()) {
      jr["fire_count"] = report[r].fire_count;
      jr["accuracy"] = report[r].accuracy ? nlohmann::json(*report[r].accuracy) : nlohmann::json();
    }
    rules.push_back(std::move(jr));
  }
  nlohmann::json j{{"format", "fuzzyembed.rulebase/1"},
                   {"class_count", rb.class_count()},
                   {"max_ants", rb.max_ants()},
                   {"variables", vars},
                   {"rules", rules}};
  if (rb.scored()) j["default_class"] = rb.default_class();
  return j;
}

RuleBase rulebase_from_json(const nlohmann::json& j) {
  try {
    std::vector<LinguisticVariable> vars;
    for (const auto& jv : j.at("variables")) vars.push_back(variable_from_json(jv));
    auto index_of = [&](const std::string& name) {
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].name() == name) return v;
      }
      throw ConfigError(fmt::format("rule references unknown variable '{}'", name));
    };
    std::vector<Rule> rules;
    std::vector<RuleScore> scores;
    bool scored = j.contains("default_class");
    for (const auto& jr : j.at("rules")) {
      Rule rule;
      for (const auto& ja : jr.at("antecedents")) {
        rule.antecedents.push_back({index_of(ja.at("variable").get<std::string>()),
                                    parse_label(ja.at("label").get<std::string>())});
      }
      rule.consequent = jr.at("consequent").get<ClassIndex>();
      rules.push_back(std::move(rule));
      if (scored) {
        scores.push_back({jr.at("support").get<double>(), jr.at("confidence").get<double>(),
                          jr.at("dominance").get<double>(), false});
      }
    }
    RuleBase rb(std::move(rules), std::move(vars), j.at("class_count").get<int>(),
                j.value("max_ants", kDefaultMaxAnts));
    if (scored) rb.set_scores(std::move(scores), j.at("default_class").get<ClassIndex>());
    return rb;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed rule base JSON: {}", e.what()));
  }
}

std::vector<RuleReport> report_from_json(const nlohmann::json& j) {
  std::vector<RuleReport> report;
  const auto& rules = j.at("rules");
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& jr = rules[r];
    if (!jr.contains("fire_count")) return {};
    RuleReport row;
    row.rule = r;
    row.dominance = jr.value("dominance", 0.0);
    row.fire_count = jr.at("fire_count").get<std::size_t>();
    if (jr.contains("accuracy") && !jr.at("accuracy").is_null()) {
      row.accuracy = jr.at("accuracy").get<double>();
    }
    report.push_back(row);
  }
  return report;
}

std::string render_markdown(const RuleBase& rb, std::span<const RuleReport> report) {
  std::string out = "| Rule | Cluster |";
  std::string rule_line = "|---|---|";
  for (const auto& v : rb.variables()) {
    out += fmt::format(" {} |", v.name());
    rule_line += "---|";
  }
  out += " DS | Acc |\n" + rule_line + "---|---|\n";
  for (std::size_t r = 0; r < rb.size(); ++r) {
    const Rule& rule = rb.rules()[r];
    out += fmt::format("| {} | {} |", r, rule.consequent);
    for (std::size_t v = 0; v < rb.variables().size(); ++v) {
      const auto it = std::find_if(rule.antecedents.begin(), rule.antecedents.end(),
                                   [&](const Antecedent& a) { return a.variable == v; });
      out += fmt::format(" {} |", it == rule.antecedents.end() ? std::string_view("irrelevant")
                                                                : label_name(it->label));
    }
    const std::string ds = rb.scored() ? fmt::format("{:.2f}", rb.scores()[r].dominance) : "-";
    const std::string acc = r < report.size() && report[r].accuracy
                                ? fmt::format("{:.2f}", *report[r].accuracy)
                                : "-";
    out += fmt::format(" {} | {} |\n", ds, acc);
  }
  return out;
}

}  // namespace fuzzyembed

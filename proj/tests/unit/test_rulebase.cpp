#include <gtest/gtest.h>

#include <random>

#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/rulebase.hpp"
#include "instances.hpp"

using namespace fuzzyembed;
using testing_support::random_instance;

namespace {

LinguisticVariable unit_var(std::string name, FuzzyKind kind = FuzzyKind::T1) {
  return LinguisticVariable(std::move(name), kind, 0.0, 0.2, 0.5, 0.8, 1.0);
}

// One variable, rows chosen to hit known degrees of "x is low": 1, 0.5, 0.
FeatureMatrix tiny() {
  FeatureMatrix fm({"x"}, {"a", "b", "c", "d"}, {0.0, 0.35, 0.9, 0.1});
  fm.set_labels({0, 0, 1, 0});
  return fm;
}

}  // namespace

TEST(Firing, ProductOfDegrees) {
  const std::vector<LinguisticVariable> vars{unit_var("a"), unit_var("b")};
  // medium(0.35) = 0.5, medium(0.32) = 0.4
  const Rule r{{{0, Label::Medium}, {1, Label::Medium}}, 0};
  const std::vector<double> x{0.35, 0.32};
  const auto d = firing_strength(r, x, vars);
  EXPECT_NEAR(d.lower, 0.2, 1e-12);
  EXPECT_NEAR(d.upper, 0.2, 1e-12);
  const std::vector<double> zero{0.35, 1.0};
  EXPECT_EQ(firing_strength(r, zero, vars), (TruthDegree{0.0, 0.0}));
}

TEST(Firing, IntervalProductAndMidpoint) {
  const auto a = LinguisticVariable("a", FuzzyKind::IT2, 0.0, 0.2, 0.5, 0.8, 1.0, 0.8);
  const auto b = LinguisticVariable("b", FuzzyKind::IT2, 0.0, 0.2, 0.5, 0.8, 1.0, 0.8);
  const std::vector<LinguisticVariable> vars{a, b};
  // (0.4, 0.5) from medium at 0.35, (0.8, 1.0) from medium at its peak
  const Rule r{{{0, Label::Medium}, {1, Label::Medium}}, 1};
  const std::vector<double> x{0.35, 0.5};
  const auto d = firing_strength(r, x, vars);
  EXPECT_NEAR(d.lower, 0.32, 1e-12);
  EXPECT_NEAR(d.upper, 0.5, 1e-12);
  EXPECT_NEAR(scalar_strength(d), 0.41, 1e-12);
  EXPECT_DOUBLE_EQ(scalar_strength({0.2, 0.2}), 0.2);
  EXPECT_DOUBLE_EQ(scalar_strength({0.0, 0.0}), 0.0);
}

TEST(Scores, HandComputedSupportAndConfidence) {
  const FeatureMatrix fm = tiny();
  const auto data = bind_labels(fm, 2);
  const std::vector<LinguisticVariable> vars{unit_var("x")};
  // Class 0 samples at 0.0, 0.35, 0.1: low = 1, 0.5, 1 -> support 2.5 / 3
  RuleBase single({Rule{{{0, Label::Low}}, 0}}, vars, 2);
  EXPECT_NEAR(support(single, 0, data), 2.5 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(confidence(single, 0, data), 1.0);

  // Two identical rules split the mass evenly
  RuleBase twin({Rule{{{0, Label::Low}}, 0}, Rule{{{0, Label::Low}}, 0}}, vars, 2);
  EXPECT_DOUBLE_EQ(confidence(twin, 0, data), 0.5);
  twin.score(data);
  EXPECT_NEAR(twin.dominance(0), 2.5 / 3.0 * 0.5, 1e-12);

  // Never fires on its class: high(0.0 / 0.35 / 0.1) = 0
  RuleBase silent({Rule{{{0, Label::High}}, 0}}, vars, 2);
  EXPECT_DOUBLE_EQ(support(silent, 0, data), 0.0);
  EXPECT_DOUBLE_EQ(confidence(silent, 0, data), 0.0);
}

TEST(Scores, SupportOfThreeStrengths) {
  // low at 0.0, 0.35, 0.9 is 1, 0.5, 0: the class-1 samples give mean 0.5
  FeatureMatrix fm({"x"}, {"a", "b", "c", "d"}, {0.0, 0.35, 0.9, 0.6});
  fm.set_labels({1, 1, 1, 0});
  const std::vector<LinguisticVariable> vars{unit_var("x")};
  RuleBase rb({Rule{{{0, Label::Low}}, 1}}, vars, 2);
  EXPECT_NEAR(support(rb, 0, bind_labels(fm, 2)), 0.5, 1e-12);
}

TEST(Scores, MissingClassIsFlagged) {
  FeatureMatrix fm({"x"}, {"a", "b"}, {0.0, 1.0});
  fm.set_labels({0, 0});
  RuleBase rb({Rule{{{0, Label::Low}}, 1}}, {unit_var("x")}, 2);
  rb.score(bind_labels(fm, 2));
  EXPECT_TRUE(rb.scores()[0].consequent_absent);
  EXPECT_DOUBLE_EQ(rb.scores()[0].support, 0.0);
}

TEST(Association, NeedsScores) {
  RuleBase rb({Rule{{{0, Label::Low}}, 0}}, {unit_var("x")}, 2);
  const std::vector<double> x{0.0};
  EXPECT_THROW(association_degree(rb, 0, x), NotScored);
  rb.set_scores({RuleScore{1.0, 0.54, 0.54, false}}, 0);
  EXPECT_NEAR(association_degree(rb, 0, x), 0.54, 1e-15);
  rb.set_scores({RuleScore{0.5, 0.4, 0.2, false}}, 0);
  const std::vector<double> half{0.35};
  EXPECT_NEAR(association_degree(rb, 0, half), 0.1, 1e-15);
  const std::vector<double> none{1.0};
  EXPECT_DOUBLE_EQ(association_degree(rb, 0, none), 0.0);
}

TEST(Classify, TieGoesToLowerIndexAndFallback) {
  const std::vector<LinguisticVariable> vars{unit_var("x")};
  RuleBase rb({Rule{{{0, Label::Low}}, 1}, Rule{{{0, Label::Low}}, 0}}, vars, 2);
  rb.set_scores({RuleScore{1, 1, 0.3, false}, RuleScore{1, 1, 0.3, false}}, 0);
  const std::vector<double> x{0.0};
  const auto p = classify(rb, x);
  EXPECT_EQ(p.predicted, 1);
  EXPECT_EQ(p.winning_rule, 0u);
  EXPECT_TRUE(p.covered);
  const std::vector<double> far{1.0};
  const auto q = classify(rb, far);
  EXPECT_FALSE(q.covered);
  EXPECT_EQ(q.predicted, rb.default_class());
  EXPECT_FALSE(q.winning_rule.has_value());

  RuleBase empty({}, vars, 2);
  empty.set_scores({}, 0);
  EXPECT_THROW(classify(empty, x), EmptyRuleBase);
}

TEST(Classify, DefaultClassIsMajority) {
  const FeatureMatrix fm = tiny();
  RuleBase rb({Rule{{{0, Label::High}}, 1}}, {unit_var("x")}, 2);
  rb.score(bind_labels(fm, 2));
  EXPECT_EQ(rb.default_class(), 0);
}

TEST(Oracle, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto kind = t % 2 ? FuzzyKind::IT2 : FuzzyKind::T1;
    auto in = random_instance(rng, kind);
    RuleBase rb(in.rules, in.vars, in.classes);
    const auto data = bind_labels(in.features, in.classes);
    rb.score(data);
    const auto ref = oracle::score(in.orules, in.parts, in.X, in.labels);
    for (std::size_t r = 0; r < in.rules.size(); ++r) {
      EXPECT_NEAR(rb.scores()[r].support, ref.support[r], 1e-9);
      EXPECT_NEAR(rb.scores()[r].confidence, ref.confidence[r], 1e-9);
      EXPECT_NEAR(rb.scores()[r].dominance, ref.dominance[r], 1e-9);
      EXPECT_NEAR(dominance_score(rb, r, data), ref.dominance[r], 1e-9);
    }
    const int fallback = oracle::majority(in.labels, in.classes);
    for (std::size_t i = 0; i < in.X.size(); ++i) {
      const auto p = classify(rb, in.features.row(i));
      const auto q = oracle::classify(in.orules, ref.dominance, in.parts, in.X[i], fallback);
      EXPECT_EQ(p.predicted, q.cls);
      EXPECT_EQ(p.winning_rule ? static_cast<int>(*p.winning_rule) : -1, q.rule);
    }
  }
}

TEST(Prune, ThresholdAndRescore) {
  const std::vector<LinguisticVariable> vars{unit_var("x")};
  const FeatureMatrix fm = tiny();
  const auto data = bind_labels(fm, 2);
  RuleBase rb({Rule{{{0, Label::Low}}, 0}, Rule{{{0, Label::Medium}}, 1}}, vars, 2);
  rb.set_scores({RuleScore{1, 1, 0.1, false}, RuleScore{1, 1, 0.02, false}}, 0);
  const RuleBase kept = prune(rb, data, 0.05);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.rules()[0], rb.rules()[0]);
  EXPECT_THROW(prune(rb, data, 0.5), EmptyRuleBase);
}

TEST(Prune, ZeroThresholdIsIdentityAndRetainedPassThreshold) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 60; ++t) {
    auto in = random_instance(rng, t % 2 ? FuzzyKind::IT2 : FuzzyKind::T1);
    RuleBase rb(in.rules, in.vars, in.classes);
    const auto data = bind_labels(in.features, in.classes);
    rb.score(data);
    const RuleBase same = prune(rb, data, 0.0);
    EXPECT_EQ(same.rules(), rb.rules());
    EXPECT_EQ(same.scores(), rb.scores());

    const double h = 0.05;
    std::vector<oracle::OracleRule> survivors;
    for (std::size_t r = 0; r < rb.size(); ++r) {
      if (rb.dominance(r) >= h) survivors.push_back(in.orules[r]);
    }
    if (survivors.empty()) {
      EXPECT_THROW(prune(rb, data, h), EmptyRuleBase);
      continue;
    }
    const RuleBase kept = prune(rb, data, h);
    ASSERT_EQ(kept.size(), survivors.size());
    const auto ref = oracle::score(survivors, in.parts, in.X, in.labels);
    for (std::size_t r = 0; r < kept.size(); ++r) {
      EXPECT_NEAR(kept.dominance(r), ref.dominance[r], 1e-9);
    }
  }
}

TEST(Prune, HigherThresholdKeepsSubset) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    auto in = random_instance(rng, FuzzyKind::IT2);
    RuleBase rb(in.rules, in.vars, in.classes);
    const auto data = bind_labels(in.features, in.classes);
    rb.score(data);
    const RuleBase loose = prune(rb, data, 0.0);
    for (double h : {0.01, 0.05, 0.1, 0.2}) {
      bool any = false;
      for (std::size_t r = 0; r < rb.size(); ++r) any = any || rb.dominance(r) >= h;
      if (!any) break;
      const RuleBase tight = prune(rb, data, h);
      std::size_t j = 0;
      for (const Rule& r : tight.rules()) {
        while (j < loose.size() && !(loose.rules()[j] == r)) ++j;
        ASSERT_LT(j, loose.size());
        ++j;
      }
    }
  }
}

TEST(Report, WinsAndAccuracyMatchEnumeration) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    auto in = random_instance(rng, FuzzyKind::T1);
    RuleBase rb(in.rules, in.vars, in.classes);
    const auto data = bind_labels(in.features, in.classes);
    rb.score(data);
    const auto report = per_rule_report(rb, data);
    const auto ref = oracle::score(in.orules, in.parts, in.X, in.labels);
    const int fallback = oracle::majority(in.labels, in.classes);
    std::vector<int> wins(rb.size(), 0), right(rb.size(), 0);
    for (std::size_t i = 0; i < in.X.size(); ++i) {
      const auto q = oracle::classify(in.orules, ref.dominance, in.parts, in.X[i], fallback);
      if (q.rule < 0) continue;
      ++wins[q.rule];
      right[q.rule] += in.labels[i] == in.orules[q.rule].cls;
    }
    for (std::size_t r = 0; r < rb.size(); ++r) {
      EXPECT_EQ(report[r].fire_count, static_cast<std::size_t>(wins[r]));
      if (wins[r] == 0) {
        EXPECT_FALSE(report[r].accuracy.has_value());
      } else {
        EXPECT_DOUBLE_EQ(*report[r].accuracy, static_cast<double>(right[r]) / wins[r]);
      }
    }
  }
}

TEST(Report, EightOfTen) {
  // ten rows at 0 (low = 1), ten at 1 (low = 0); 8 of the zeros are class 0
  std::vector<std::string> ids;
  std::vector<double> xs;
  std::vector<int> ys;
  for (int i = 0; i < 20; ++i) {
    ids.push_back(std::to_string(i));
    xs.push_back(i < 10 ? 0.0 : 1.0);
    ys.push_back(i < 8 ? 0 : 1);
  }
  FeatureMatrix fm({"x"}, ids, xs);
  fm.set_labels(ys);
  const auto var = build_partition(fm.column(0), FuzzyKind::T1, "x");
  RuleBase rb({Rule{{{0, Label::Low}}, 0}, Rule{{{0, Label::Medium}}, 1}}, {var}, 2);
  rb.score(bind_labels(fm, 2));
  const auto report = per_rule_report(rb, bind_labels(fm, 2));
  EXPECT_EQ(report[0].fire_count, 10u);
  EXPECT_DOUBLE_EQ(*report[0].accuracy, 0.8);
  EXPECT_EQ(report[1].fire_count, 0u);
  EXPECT_FALSE(report[1].accuracy.has_value());
}

TEST(Serialization, JsonRoundTripAndValidation) {
  std::mt19937_64 rng(17);
  auto in = random_instance(rng, FuzzyKind::IT2);
  RuleBase rb(in.rules, in.vars, in.classes);
  const auto data = bind_labels(in.features, in.classes);
  rb.score(data);
  const auto report = per_rule_report(rb, data);
  const auto j = nlohmann::json::parse(to_json(rb, report).dump());
  const RuleBase back = rulebase_from_json(j);
  EXPECT_EQ(back.rules(), rb.rules());
  EXPECT_EQ(back.scores(), rb.scores());
  EXPECT_EQ(back.default_class(), rb.default_class());
  const auto rep = report_from_json(j);
  ASSERT_EQ(rep.size(), report.size());
  for (std::size_t i = 0; i < rep.size(); ++i) EXPECT_EQ(rep[i].fire_count, report[i].fire_count);
  for (std::size_t i = 0; i < in.X.size(); ++i) {
    EXPECT_EQ(classify(back, in.features.row(i)), classify(rb, in.features.row(i)));
  }
}

TEST(Validation, BadRulesRejected) {
  const std::vector<LinguisticVariable> vars{unit_var("a"), unit_var("b")};
  EXPECT_THROW(RuleBase({Rule{{}, 0}}, vars, 2), ConfigError);
  EXPECT_THROW(RuleBase({Rule{{{0, Label::Low}, {0, Label::High}}, 0}}, vars, 2), ConfigError);
  EXPECT_THROW(RuleBase({Rule{{{2, Label::Low}}, 0}}, vars, 2), ConfigError);
  EXPECT_THROW(RuleBase({Rule{{{0, Label::Low}}, 2}}, vars, 2), ConfigError);
}

TEST(Markdown, IrrelevantForUnusedVariables) {
  const std::vector<LinguisticVariable> vars{unit_var("positivity"), unit_var("polarity")};
  RuleBase rb({Rule{{{1, Label::High}}, 2}}, vars, 3);
  rb.set_scores({RuleScore{0.9, 0.6, 0.54, false}}, 0);
  const std::vector<RuleReport> report{{0, 0.54, 0.75, 4}};
  const std::string md = render_markdown(rb, report);
  EXPECT_NE(md.find("| Rule | Cluster | positivity | polarity | DS | Acc |"), std::string::npos);
  EXPECT_NE(md.find("| 0 | 2 | irrelevant | high | 0.54 | 0.75 |"), std::string::npos);
}

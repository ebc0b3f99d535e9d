#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fuzzyembed/dataset.hpp"
#include "fuzzyembed/fuzzy.hpp"
#include "fuzzyembed/rulebase.hpp"
#include "oracle.hpp"

namespace testing_support {

/// A random scoring problem held in both representations.
struct Instance {
  fuzzyembed::FeatureMatrix features;
  std::vector<int> labels;
  int classes = 0;
  std::vector<fuzzyembed::LinguisticVariable> vars;
  std::vector<fuzzyembed::Rule> rules;

  std::vector<std::vector<double>> X;
  std::vector<oracle::Partition> parts;
  std::vector<oracle::OracleRule> orules;
};

inline Instance random_instance(std::mt19937_64& rng, fuzzyembed::FuzzyKind kind,
                                std::size_t max_rules = 6, std::size_t max_vars = 4,
                                std::size_t max_samples = 30) {
  using namespace fuzzyembed;
  std::uniform_int_distribution<std::size_t> nv(1, max_vars), nr(1, max_rules),
      ns(8, max_samples);
  std::uniform_real_distribution<double> val(-2.0, 3.0);
  Instance in;
  const std::size_t vars = nv(rng), samples = ns(rng), rules = nr(rng);
  in.classes = std::uniform_int_distribution<int>(2, 3)(rng);

  std::vector<std::string> cols, ids;
  std::vector<double> values;
  for (std::size_t j = 0; j < vars; ++j) cols.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < samples; ++i) {
    ids.push_back("s" + std::to_string(i));
    std::vector<double> row;
    for (std::size_t j = 0; j < vars; ++j) row.push_back(val(rng));
    values.insert(values.end(), row.begin(), row.end());
    in.X.push_back(row);
    // every class present
    in.labels.push_back(i < static_cast<std::size_t>(in.classes)
                            ? static_cast<int>(i)
                            : std::uniform_int_distribution<int>(0, in.classes - 1)(rng));
  }
  in.features = FeatureMatrix(cols, ids, values);
  in.features.set_labels(in.labels);

  const double scale = kind == FuzzyKind::IT2 ? 0.8 : 1.0;
  for (std::size_t j = 0; j < vars; ++j) {
    const auto col = in.features.column(j);
    in.vars.push_back(build_partition(col, kind, cols[j]));
    in.parts.push_back(oracle::partition_of(col, scale));
  }

  for (std::size_t r = 0; r < rules; ++r) {
    std::vector<std::size_t> order(vars);
    for (std::size_t j = 0; j < vars; ++j) order[j] = j;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_ants = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, vars))(rng);
    Rule rule;
    oracle::OracleRule orule;
    for (std::size_t a = 0; a < n_ants; ++a) {
      const int lab = std::uniform_int_distribution<int>(0, 2)(rng);
      rule.antecedents.push_back({order[a], static_cast<Label>(lab)});
      orule.ants.push_back({static_cast<int>(order[a]), lab});
    }
    rule.consequent = std::uniform_int_distribution<int>(0, in.classes - 1)(rng);
    orule.cls = rule.consequent;
    in.rules.push_back(rule);
    in.orules.push_back(orule);
  }
  return in;
}

}  // namespace testing_support

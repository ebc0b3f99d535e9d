#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/fuzzy.hpp"
#include "oracle.hpp"

using namespace fuzzyembed;

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> five{5, 1, 4, 2, 3};
  EXPECT_DOUBLE_EQ(empirical_quantile(five, 0.5), 3.0);
  const std::vector<double> two{0, 10};
  EXPECT_DOUBLE_EQ(empirical_quantile(two, 0.2), 2.0);
  const std::vector<double> one{7};
  EXPECT_DOUBLE_EQ(empirical_quantile(one, 0.8), 7.0);
  EXPECT_THROW(empirical_quantile(std::vector<double>{}, 0.5), Error);
}

TEST(Partition, UniformSampleShape) {
  std::vector<double> v;
  for (int i = 0; i <= 1000; ++i) v.push_back(i / 1000.0);
  const auto var = build_partition(v, FuzzyKind::T1, "u");
  const auto q = var.quantiles();
  EXPECT_NEAR(q[0], 0.2, 1e-12);
  EXPECT_NEAR(q[1], 0.5, 1e-12);
  EXPECT_NEAR(q[2], 0.8, 1e-12);
  EXPECT_DOUBLE_EQ(var.membership(Label::Medium, q[1]).upper, 1.0);
}

TEST(Partition, EdgeValues) {
  const LinguisticVariable var("x", FuzzyKind::T1, 0.0, 2.0, 5.0, 8.0, 10.0);
  EXPECT_EQ(var.membership(Label::Low, 0.0), (TruthDegree{1.0, 1.0}));
  EXPECT_EQ(var.membership(Label::Medium, 8.0), (TruthDegree{0.0, 0.0}));
  const auto mid = var.membership(Label::Medium, 6.5);
  EXPECT_DOUBLE_EQ(mid.lower, 0.5);
  EXPECT_DOUBLE_EQ(mid.upper, 0.5);
}

TEST(Partition, It2LowerCapAtMedianPeak) {
  const LinguisticVariable var("x", FuzzyKind::IT2, 0.0, 2.0, 5.0, 8.0, 10.0);
  const auto d = var.membership(Label::Medium, 5.0);
  EXPECT_DOUBLE_EQ(d.lower, 0.8);
  EXPECT_DOUBLE_EQ(d.upper, 1.0);
}

TEST(Partition, ConstantColumnIsDegenerate) {
  const std::vector<double> v{3, 3, 3};
  EXPECT_THROW(build_partition(v, FuzzyKind::T1, "c"), DegeneratePartition);
}

TEST(Partition, RandomDatasetsProperties) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::normal_distribution<double> g(std::uniform_real_distribution<double>(-5, 5)(rng), 2.0);
    std::vector<double> v(std::uniform_int_distribution<int>(2, 200)(rng));
    for (double& x : v) x = g(rng);
    const auto t1 = build_partition(v, FuzzyKind::T1, "a");
    const auto it2 = build_partition(v, FuzzyKind::IT2, "a");
    const auto part = oracle::partition_of(v, 1.0);
    double prev_low = 2.0, prev_high = -1.0, max_lower = 0.0;
    for (int s = 0; s <= 400; ++s) {
      const double x = t1.domain_min() + (t1.domain_max() - t1.domain_min()) * s / 400.0;
      double sum = 0.0;
      for (Label l : kLabels) {
        const auto d = t1.membership(l, x);
        EXPECT_EQ(d.lower, d.upper);
        EXPECT_NEAR(d.upper, oracle::upper(part, static_cast<int>(l), x), 1e-12);
        sum += d.upper;
        const auto e = it2.membership(l, x);
        EXPECT_LE(e.lower, e.upper);
        EXPECT_NEAR(e.lower, 0.8 * e.upper, 1e-15);
        max_lower = std::max(max_lower, e.lower);
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      const double low = t1.membership(Label::Low, x).upper;
      const double high = t1.membership(Label::High, x).upper;
      EXPECT_LE(low, prev_low);
      EXPECT_GE(high, prev_high);
      prev_low = low;
      prev_high = high;
    }
    EXPECT_NEAR(max_lower, 0.8, 1e-9);
  }
}

TEST(Partition, ClampsOutsideDomain) {
  const LinguisticVariable var("x", FuzzyKind::IT2, -1.0, 0.0, 1.0, 2.0, 3.0);
  for (Label l : kLabels) {
    EXPECT_EQ(var.membership(l, -50.0), var.membership(l, -1.0));
    EXPECT_EQ(var.membership(l, 1e9), var.membership(l, 3.0));
  }
}

TEST(Partition, TiedQuantilesTakeLargerPiece) {
  // q20 == q50: low plateau and medium peak meet at one point
  const LinguisticVariable var("x", FuzzyKind::T1, 0.0, 1.0, 1.0, 4.0, 5.0);
  EXPECT_DOUBLE_EQ(var.membership(Label::Low, 1.0).upper, 1.0);
  EXPECT_DOUBLE_EQ(var.membership(Label::Medium, 1.0).upper, 1.0);
  EXPECT_DOUBLE_EQ(var.membership(Label::Medium, 2.5).upper, 0.5);
}

TEST(Partition, JsonRoundTripIsExact) {
  std::mt19937_64 rng(5);
  std::vector<double> v(37);
  for (double& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
  const auto var = build_partition(v, FuzzyKind::IT2, "pol");
  const auto back = variable_from_json(nlohmann::json::parse(to_json(var).dump()));
  EXPECT_EQ(back, var);
  for (double x : v) {
    for (Label l : kLabels) EXPECT_EQ(back.membership(l, x), var.membership(l, x));
  }
}

TEST(Labels, NamesRoundTrip) {
  for (Label l : kLabels) EXPECT_EQ(parse_label(label_name(l)), l);
  EXPECT_THROW(parse_label("huge"), ConfigError);
  EXPECT_EQ(parse_kind("it2"), FuzzyKind::IT2);
  EXPECT_THROW(parse_kind("t3"), ConfigError);
}

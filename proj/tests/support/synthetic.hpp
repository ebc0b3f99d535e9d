#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fuzzyembed/clustering.hpp"
#include "fuzzyembed/dataset.hpp"
#include "oracle.hpp"

namespace testing_support {

/// n rows of `features` uniform columns; the class is the bin of f0 cut at
/// the midpoints between its 20/50/80 % quantiles, so "f0 is low / medium /
/// high" classifies it almost exactly.
inline fuzzyembed::FeatureMatrix quantile_bin_dataset(std::size_t n, std::size_t features,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> cols, ids;
  for (std::size_t j = 0; j < features; ++j) cols.push_back("f" + std::to_string(j));
  std::vector<double> values;
  std::vector<double> f0;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < features; ++j) {
      const double v = u(rng);
      values.push_back(v);
      if (j == 0) f0.push_back(v);
    }
  }
  const double q20 = oracle::sorted_quantile(f0, 0.2), q50 = oracle::sorted_quantile(f0, 0.5),
               q80 = oracle::sorted_quantile(f0, 0.8);
  const double lo_cut = 0.5 * (q20 + q50), hi_cut = 0.5 * (q50 + q80);
  std::vector<int> labels;
  for (double v : f0) labels.push_back(v < lo_cut ? 0 : (v < hi_cut ? 1 : 2));
  fuzzyembed::FeatureMatrix fm(cols, ids, values);
  fm.set_labels(labels);
  return fm;
}

/// `per` points around each of `centers` well-separated means in d dims.
inline fuzzyembed::EmbeddingSet gaussian_blobs(std::size_t centers, std::size_t per, std::size_t d,
                                               double spread, std::uint64_t seed,
                                               std::vector<int>* truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> means(centers, std::vector<double>(d));
  for (auto& m : means) {
    for (double& v : m) v = 10.0 * g(rng);
  }
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t c = 0; c < centers; ++c) {
    for (std::size_t p = 0; p < per; ++p) {
      ids.push_back("b" + std::to_string(c) + "_" + std::to_string(p));
      for (std::size_t j = 0; j < d; ++j) values.push_back(means[c][j] + spread * g(rng));
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return fuzzyembed::EmbeddingSet(ids, d, values);
}

}  // namespace testing_support

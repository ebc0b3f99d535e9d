#pragma once

// Straightforward reference implementations used to cross-check the library.
// Nothing here calls into the code under test beyond reading plain data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

/// Piecewise-linear interpolation through (xs, ys), clamped at both ends.
inline double interp(double x, const std::vector<double>& xs, const std::vector<double>& ys) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (x >= xs[i] && x <= xs[i + 1] && xs[i + 1] > xs[i]) {
      const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
      return ys[i] + t * (ys[i + 1] - ys[i]);
    }
  }
  return ys.back();
}

struct Partition {
  double min, q20, q50, q80, max;
  double scale;  // lower / upper
};

inline double sorted_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Partition partition_of(const std::vector<double>& col, double scale) {
  return {*std::min_element(col.begin(), col.end()), sorted_quantile(col, 0.2),
          sorted_quantile(col, 0.5), sorted_quantile(col, 0.8),
          *std::max_element(col.begin(), col.end()), scale};
}

/// Upper membership of label 0/1/2 (low/medium/high).
inline double upper(const Partition& p, int label, double x) {
  switch (label) {
    case 0: return interp(x, {p.min, p.q20, p.q50, p.max}, {1, 1, 0, 0});
    case 1: return interp(x, {p.min, p.q20, p.q50, p.q80, p.max}, {0, 0, 1, 0, 0});
    default: return interp(x, {p.min, p.q50, p.q80, p.max}, {0, 0, 1, 1});
  }
}

struct Ant {
  int var;
  int label;
};

struct OracleRule {
  std::vector<Ant> ants;
  int cls;
};

struct Scores {
  std::vector<double> support, confidence, dominance;
};

/// Midpoint of the product-of-bounds interval.
inline double strength(const OracleRule& r, const std::vector<Partition>& ps,
                       const std::vector<double>& x) {
  double lo = 1.0, hi = 1.0;
  for (const auto& a : r.ants) {
    const double u = upper(ps[a.var], a.label, x[a.var]);
    hi *= u;
    lo *= ps[a.var].scale * u;
  }
  return 0.5 * (lo + hi);
}

inline Scores score(const std::vector<OracleRule>& rules, const std::vector<Partition>& ps,
                    const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
  Scores s;
  for (const auto& r : rules) {
    double own = 0.0, all = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (y[i] != r.cls) continue;
      ++count;
      own += strength(r, ps, X[i]);
      for (const auto& other : rules) all += strength(other, ps, X[i]);
    }
    const double sup = count ? own / count : 0.0;
    const double conf = all > 0 ? own / all : 0.0;
    s.support.push_back(sup);
    s.confidence.push_back(conf);
    s.dominance.push_back(sup * conf);
  }
  return s;
}

struct Prediction {
  int cls;
  int rule;  // -1 when nothing fired
};

inline Prediction classify(const std::vector<OracleRule>& rules, const std::vector<double>& ds,
                           const std::vector<Partition>& ps, const std::vector<double>& x,
                           int fallback) {
  std::vector<double> as;
  for (std::size_t r = 0; r < rules.size(); ++r) as.push_back(strength(rules[r], ps, x) * ds[r]);
  const double best = *std::max_element(as.begin(), as.end());
  if (best <= 0.0) return {fallback, -1};
  for (std::size_t r = 0; r < as.size(); ++r) {
    if (as[r] == best) return {rules[r].cls, static_cast<int>(r)};
  }
  return {fallback, -1};
}

inline int majority(const std::vector<int>& y, int classes) {
  std::vector<int> counts(static_cast<std::size_t>(classes), 0);
  for (int c : y) ++counts[static_cast<std::size_t>(c)];
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

/// MCC straight from the k×k confusion matrix (rows truth, columns prediction),
/// via covariances of the one-hot indicator encodings.
inline double mcc(const std::vector<int>& pred, const std::vector<int>& truth, int k) {
  const double n = static_cast<double>(pred.size());
  auto cov = [&](const std::vector<int>& a, const std::vector<int>& b) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      double ma = 0.0, mb = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i] == c;
        mb += b[i] == c;
      }
      ma /= n;
      mb /= n;
      for (std::size_t i = 0; i < a.size(); ++i) total += ((a[i] == c) - ma) * ((b[i] == c) - mb);
    }
    return total;
  };
  const double den = std::sqrt(cov(pred, pred) * cov(truth, truth));
  return den == 0.0 ? 0.0 : cov(pred, truth) / den;
}

inline double sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

/// Smallest within-cluster sum of squares over every 2-partition.
inline double best_two_partition(const std::vector<std::vector<double>>& X) {
  const std::size_t n = X.size(), d = X[0].size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 1; mask + 1 < (1UL << n); ++mask) {
    if (mask & 1UL) continue;  // each split once: row 0 always in group 0
    double total = 0.0;
    for (int g = 0; g < 2; ++g) {
      std::vector<double> c(d, 0.0);
      int cnt = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>((mask >> i) & 1UL) != g) continue;
        ++cnt;
        for (std::size_t j = 0; j < d; ++j) c[j] += X[i][j];
      }
      for (double& v : c) v /= cnt;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<int>((mask >> i) & 1UL) == g) total += sq(X[i], c);
      }
    }
    best = std::min(best, total);
  }
  return best;
}

inline double silhouette(const std::vector<std::vector<double>>& X, const std::vector<int>& labels) {
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  double sum = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<double> tot(static_cast<std::size_t>(k), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(k), 0);
    for (std::size_t j = 0; j < X.size(); ++j) {
      if (i == j) continue;
      tot[static_cast<std::size_t>(labels[j])] += std::sqrt(sq(X[i], X[j]));
      ++cnt[static_cast<std::size_t>(labels[j])];
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (cnt[own] == 0) continue;
    const double a = tot[own] / cnt[own];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < tot.size(); ++c) {
      if (c != own && cnt[c] > 0) b = std::min(b, tot[c] / cnt[c]);
    }
    sum += (b - a) / std::max(a, b);
  }
  return sum / static_cast<double>(X.size());
}

/// Ids of the m rows closest to the anchor: anchor first, then by
/// distance, then by id.
inline std::vector<std::string> nearest(const std::vector<std::string>& ids,
                                        const std::vector<std::vector<double>>& X,
                                        const std::string& anchor, std::size_t m) {
  const auto a = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), anchor) - ids.begin());
  std::vector<std::size_t> idx(ids.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
    if ((l == a) != (r == a)) return l == a;
    const double dl = sq(X[l], X[a]), dr = sq(X[r], X[a]);
    if (dl != dr) return dl < dr;
    return ids[l] < ids[r];
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(ids[idx[i]]);
  return out;
}

}  // namespace oracle

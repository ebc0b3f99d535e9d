#include "fuzzyembed/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <set>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"
#include "fuzzyembed/random.hpp"

namespace fuzzyembed {

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::size_t dim, std::vector<double> values)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw ConfigError("embeddings must have at least one dimension");
  if (values_.size() != ids_.size() * dim_) {
    throw ConfigError(fmt::format("embedding matrix: {} values for {} rows x {} dims",
                                  values_.size(), ids_.size(), dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ConfigError(fmt::format("embedding '{}' has a non-finite entry", ids_[i / dim_]));
    }
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw ConfigError(fmt::format("duplicate embedding id '{}'", id));
  }
}

std::size_t EmbeddingSet::index_of(const std::string& id) const {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw ConfigError(fmt::format("unknown embedding id '{}'", id));
  return static_cast<std::size_t>(it - ids_.begin());
}

EmbeddingSet EmbeddingSet::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  std::vector<double> values;
  values.reserve(rows.size() * dim_);
  for (std::size_t r : rows) {
    ids.push_back(ids_.at(r));
    const auto x = row(r);
    values.insert(values.end(), x.begin(), x.end());
  }
  return {std::move(ids), dim_, std::move(values)};
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

namespace {

using Centroids = std::vector<double>;

std::span<const double> centroid(const Centroids& c, std::size_t j, std::size_t dim) {
  return {c.data() + j * dim, dim};
}

Centroids plus_plus_seeds(const EmbeddingSet& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.size(), dim = x.dim();
  Centroids c;
  c.reserve(k * dim);
  const auto first = x.row(uniform_index(rng, n));
  c.insert(c.end(), first.begin(), first.end());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), first);
  for (std::size_t j = 1; j < k; ++j) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = uniform_real(rng) * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] <= 0.0) --pick;  // numerical tail: step back to a positive weight
    }
    const auto row = x.row(pick);
    c.insert(c.end(), row.begin(), row.end());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(x.row(i), row));
  }
  return c;
}

/// Nearest centroid per row (ties to the lower index); returns inertia.
double assign(const EmbeddingSet& x, const Centroids& c, std::size_t k, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double d = squared_distance(x.row(i), centroid(c, j, x.dim()));
      if (d < best) {
        best = d;
        arg = static_cast<int>(j);
      }
    }
    labels[i] = arg;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

/// Move the farthest point of a multi-member cluster into each empty one.
bool repair_empty(const EmbeddingSet& x, Centroids& c, std::size_t k, std::vector<int>& labels,
                  std::vector<double>& dist) {
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  bool changed = false;
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    std::size_t far = x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (far == x.size() || dist[i] > dist[far]) far = i;
    }
    if (far == x.size()) throw DegenerateData("kmeans: cannot fill an empty cluster");
    --counts[static_cast<std::size_t>(labels[far])];
    labels[far] = static_cast<int>(j);
    dist[far] = 0.0;
    counts[j] = 1;
    std::copy_n(x.row(far).begin(), x.dim(), c.begin() + static_cast<std::ptrdiff_t>(j * x.dim()));
    changed = true;
  }
  return changed;
}

Centroids means(const EmbeddingSet& x, std::size_t k, const std::vector<int>& labels) {
  const std::size_t dim = x.dim();
  Centroids c(k * dim, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto l = static_cast<std::size_t>(labels[i]);
    ++counts[l];
    const auto row = x.row(i);
    for (std::size_t t = 0; t < dim; ++t) c[l * dim + t] += row[t];
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t t = 0; t < dim; ++t) c[j * dim + t] /= static_cast<double>(counts[j]);
  }
  return c;
}

double labelled_inertia(const EmbeddingSet& x, const Centroids& c, const std::vector<int>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += squared_distance(x.row(i), centroid(c, static_cast<std::size_t>(labels[i]), x.dim()));
  }
  return s;
}

ClusterAssignment lloyd(const EmbeddingSet& x, std::size_t k, Rng& rng, const KMeansOptions& opt) {
  const std::size_t n = x.size();
  Centroids c = plus_plus_seeds(x, k, rng);
  std::vector<int> labels(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<double> trace;
  for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
    trace.push_back(assign(x, c, k, labels, dist));
    repair_empty(x, c, k, labels, dist);
    Centroids next = means(x, k, labels);
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      shift = std::max(shift, std::sqrt(squared_distance(centroid(c, j, x.dim()),
                                                         centroid(next, j, x.dim()))));
    }
    c = std::move(next);
    if (shift <= opt.tolerance) break;
  }
  assign(x, c, k, labels, dist);
  if (repair_empty(x, c, k, labels, dist)) c = means(x, k, labels);
  ClusterAssignment out;
  out.k = k;
  out.inertia = labelled_inertia(x, c, labels);
  out.labels = std::move(labels);
  out.centroids = std::move(c);
  out.inertia_trace = std::move(trace);
  return out;
}

std::size_t distinct_rows(const EmbeddingSet& x, std::size_t enough) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < x.size() && seen.size() < enough; ++i) {
    const auto r = x.row(i);
    seen.emplace(r.begin(), r.end());
  }
  return seen.size();
}

}  // namespace

ClusterAssignment kmeans(const EmbeddingSet& embeddings, std::size_t k, std::uint64_t seed,
                         const KMeansOptions& options) {
  if (options.metric != "euclidean") {
    throw ConfigError(fmt::format("distance metric '{}' is not supported", options.metric));
  }
  if (k < 2) throw ConfigError("kmeans: k must be >= 2");
  if (embeddings.size() < k) {
    throw ConfigError(fmt::format("kmeans: {} rows for k = {}", embeddings.size(), k));
  }
  if (distinct_rows(embeddings, k) < k) {
    throw DegenerateData(fmt::format("kmeans: fewer than {} distinct rows", k));
  }
  ClusterAssignment best;
  bool have = false;
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(split_seed(seed, r));
    ClusterAssignment a = lloyd(embeddings, k, rng, options);
    if (!have || a.inertia < best.inertia) {
      best = std::move(a);
      have = true;
    }
  }
  return best;
}

double silhouette(const EmbeddingSet& embeddings, std::span<const int> labels) {
  const std::size_t n = embeddings.size();
  if (labels.size() != n) throw ConfigError("silhouette: label count mismatch");
  if (n == 0) throw ConfigError("silhouette: no samples");
  if (*std::min_element(labels.begin(), labels.end()) < 0) {
    throw ConfigError("silhouette: negative cluster label");
  }
  const auto k = static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
    throw ConfigError("silhouette: needs at least two non-empty clusters");
  }

  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (counts[own] < 2) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(labels[j])] +=
          std::sqrt(squared_distance(embeddings.row(i), embeddings.row(j)));
    }
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

SweepResult sweep_k(const EmbeddingSet& embeddings, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = embeddings.size();
  if (k_min < 2 || k_max < k_min || n < 1 || k_max > n - 1) {
    throw ConfigError(fmt::format("k range {}..{} outside [2, {}]", k_min, k_max,
                                  n > 0 ? n - 1 : 0));
  }
  if (distinct_rows(embeddings, 2) < 2) {
    throw DegenerateData("sweep_k: all embeddings are identical");
  }
  SweepResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = k_min; k <= k_max; ++k) {
    ClusterAssignment a = kmeans(embeddings, k, seed, options);
    const double s = silhouette(embeddings, a.labels);
    out.rows.push_back({k, s});
    out.assignments.push_back(std::move(a));
    if (s > best) {
      best = s;
      out.best_k = k;
    }
  }
  return out;
}

std::vector<std::size_t> nearest_rows(const EmbeddingSet& embeddings, const std::string& anchor_id,
                                      std::size_t m) {
  const std::size_t anchor = embeddings.index_of(anchor_id);
  if (m < 1 || m > embeddings.size()) {
    throw ConfigError(fmt::format("local subset size {} outside [1, {}]", m, embeddings.size()));
  }
  std::vector<double> d(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    d[i] = squared_distance(embeddings.row(i), embeddings.row(anchor));
  }
  std::vector<std::size_t> order(embeddings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ids = embeddings.ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if ((a == anchor) != (b == anchor)) return a == anchor;
    if (d[a] != d[b]) return d[a] < d[b];
    if (ids[a] != ids[b]) return ids[a] < ids[b];
    return a < b;
  });
  order.resize(m);
  return order;
}

EmbeddingSet local_subset(const EmbeddingSet& embeddings, const std::string& anchor_id,
                          std::size_t m) {
  const auto rows = nearest_rows(embeddings, anchor_id, m);
  return embeddings.select_rows(rows);
}

}  // namespace fuzzyembed

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fuzzyembed {

/// n x d embedding rows keyed by document id.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws ConfigError on ragged, empty-dimension or non-finite input.
  EmbeddingSet(std::vector<std::string> ids, std::size_t dim, std::vector<double> values);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  /// Throws ConfigError when the id is absent.
  std::size_t index_of(const std::string& id) const;
  EmbeddingSet select_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> ids_;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<int> labels;
  std::vector<double> centroids;  // k x d, row-major
  double inertia = 0.0;
  /// Assignment-step inertia per Lloyd iteration of the winning restart.
  std::vector<double> inertia_trace;
};

struct KMeansOptions {
  std::size_t max_iter = 300;
  std::size_t restarts = 10;
  double tolerance = 1e-6;
  /// Only "euclidean" is implemented; other values are rejected.
  std::string metric = "euclidean";
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` by inertia.
/// Empty clusters are reseeded at the point farthest from its centroid.
/// Throws ConfigError when k < 2 or k > n, DegenerateData when fewer than k
/// distinct rows exist.
ClusterAssignment kmeans(const EmbeddingSet& embeddings, std::size_t k, std::uint64_t seed,
                         const KMeansOptions& options = {});

/// Mean silhouette over all samples (singletons contribute 0).
/// Throws ConfigError when fewer than two clusters are used.
double silhouette(const EmbeddingSet& embeddings, std::span<const int> labels);

struct SilhouetteRow {
  std::size_t k = 0;
  double silhouette = 0.0;
};

struct SweepResult {
  std::vector<SilhouetteRow> rows;  // ascending k
  std::size_t best_k = 0;
  std::vector<ClusterAssignment> assignments;  // parallel to rows
};

/// kmeans + silhouette for each k in [k_min, k_max]. Ties pick the smaller k.
/// Throws DegenerateData on a constant dataset and ConfigError on a range
/// outside [2, n - 1].
SweepResult sweep_k(const EmbeddingSet& embeddings, std::size_t k_min, std::size_t k_max,
                    std::uint64_t seed, const KMeansOptions& options = {});

/// Row indices of the m nearest rows to the anchor (anchor first, then by
/// distance, ties by id).
std::vector<std::size_t> nearest_rows(const EmbeddingSet& embeddings, const std::string& anchor_id,
                                      std::size_t m);
EmbeddingSet local_subset(const EmbeddingSet& embeddings, const std::string& anchor_id,
                          std::size_t m);

}  // namespace fuzzyembed

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fuzzyembed {

using ClassIndex = int;

/// Row-major table of interpretable feature values.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> columns, std::vector<std::string> ids,
                std::vector<double> values);

  std::size_t rows() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return columns_.size(); }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const noexcept { return values_[i * cols() + j]; }
  std::vector<double> column(std::size_t j) const;

  /// Index of the named column. Throws ConfigError if absent.
  std::size_t column_index(const std::string& name) const;

  void push_row(std::string id, std::span<const double> row);

  /// New matrix with the given rows in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// New matrix with columns reordered to `names`.
  FeatureMatrix select_columns(std::span<const std::string> names) const;

  const std::optional<std::vector<ClassIndex>>& labels() const noexcept { return labels_; }
  void set_labels(std::vector<ClassIndex> labels);

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::optional<std::vector<ClassIndex>> labels_;
};

/// Feature rows bound to ground-truth classes.
struct LabeledData {
  const FeatureMatrix* features = nullptr;
  std::span<const ClassIndex> labels;
  int class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> row(std::size_t i) const noexcept { return features->row(i); }
};

/// Binds a matrix to its labels. Throws ConfigError if labels are absent,
/// of the wrong length, or outside [0, class_count).
LabeledData bind_labels(const FeatureMatrix& features, int class_count);
/// Same, with class_count inferred as max label + 1.
LabeledData bind_labels(const FeatureMatrix& features);

}  // namespace fuzzyembed

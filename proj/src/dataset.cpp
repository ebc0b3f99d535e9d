#include "fuzzyembed/dataset.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"

namespace fuzzyembed {

FeatureMatrix::FeatureMatrix(std::vector<std::string> columns, std::vector<std::string> ids,
                             std::vector<double> values)
    : columns_(std::move(columns)), ids_(std::move(ids)), values_(std::move(values)) {
  if (values_.size() != ids_.size() * columns_.size()) {
    throw ConfigError(fmt::format("feature matrix: {} values for {} rows x {} columns",
                                  values_.size(), ids_.size(), columns_.size()));
  }
}

std::vector<double> FeatureMatrix::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows());
  for (std::size_t i = 0; i < rows(); ++i) out.push_back(at(i, j));
  return out;
}

std::size_t FeatureMatrix::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw ConfigError(fmt::format("feature column '{}' not found", name));
  return static_cast<std::size_t>(it - columns_.begin());
}

void FeatureMatrix::push_row(std::string id, std::span<const double> row) {
  if (row.size() != cols()) {
    throw ConfigError(fmt::format("row '{}' has {} values, expected {}", id, row.size(), cols()));
  }
  ids_.push_back(std::move(id));
  values_.insert(values_.end(), row.begin(), row.end());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(columns_, {}, {});
  std::vector<ClassIndex> labels;
  for (std::size_t r : rows) {
    out.push_row(ids_.at(r), row(r));
    if (labels_) labels.push_back(labels_->at(r));
  }
  if (labels_) out.labels_ = std::move(labels);
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(column_index(n));
  std::vector<double> values;
  values.reserve(rows() * idx.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j : idx) values.push_back(at(i, j));
  }
  FeatureMatrix out({names.begin(), names.end()}, ids_, std::move(values));
  out.labels_ = labels_;
  return out;
}

void FeatureMatrix::set_labels(std::vector<ClassIndex> labels) {
  if (labels.size() != rows()) {
    throw ConfigError(fmt::format("{} labels for {} rows", labels.size(), rows()));
  }
  labels_ = std::move(labels);
}

LabeledData bind_labels(const FeatureMatrix& features, int class_count) {
  if (!features.labels()) throw ConfigError("feature matrix has no labels");
  const auto& labels = *features.labels();
  for (ClassIndex c : labels) {
    if (c < 0 || c >= class_count) {
      throw ConfigError(fmt::format("label {} outside [0, {})", c, class_count));
    }
  }
  return {&features, labels, class_count};
}

LabeledData bind_labels(const FeatureMatrix& features) {
  if (!features.labels() || features.labels()->empty()) {
    throw ConfigError("feature matrix has no labels");
  }
  const auto& labels = *features.labels();
  return bind_labels(features, *std::max_element(labels.begin(), labels.end()) + 1);
}

}  // namespace fuzzyembed

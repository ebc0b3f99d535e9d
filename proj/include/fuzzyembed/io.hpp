#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fuzzyembed/clustering.hpp"
#include "fuzzyembed/dataset.hpp"

namespace fuzzyembed::io {

/// Comma-separated fields; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories. Throws IngestionError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Header `id,e0,...,e{d-1}`; d is taken from the header and must match
/// every row.
EmbeddingSet read_embeddings_csv(const std::filesystem::path& path);
void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingSet& embeddings);

/// Header `id,<column>...`.
FeatureMatrix read_features_csv(const std::filesystem::path& path);
std::string features_csv(const FeatureMatrix& features);

struct LabelTable {
  std::vector<std::string> ids;
  std::vector<int> labels;
};

/// Header `id,cluster`. Throws IngestionError on an empty table.
LabelTable read_labels_csv(const std::filesystem::path& path);
std::string labels_csv(std::span<const std::string> ids, std::span<const int> labels);

struct TextRecord {
  std::string id;
  std::string text;
};

/// JSON lines `{"id": ..., "text": ...}`; numeric ids are stringified.
std::vector<TextRecord> read_texts_jsonl(const std::filesystem::path& path);

}  // namespace fuzzyembed::io

#include "fuzzyembed/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fuzzyembed/errors.hpp"

namespace fuzzyembed::io {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t line) {
  if (cell.empty()) throw IngestionError(fmt::format("{}:{}: empty numeric cell", path.string(), line));
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw IngestionError(fmt::format("{}:{}: invalid number '{}'", path.string(), line, cell));
  }
  return v;
}

/// Yields non-empty lines with trailing CR removed; the first is the header.
template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line, lineno);
  }
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::exchange(cur, {}));
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string format_double(double v) { return fmt::format("{}", v); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IngestionError(fmt::format("cannot create '{}': {}", path.parent_path().string(),
                                       ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IngestionError(fmt::format("write failed for '{}'", path.string()));
}

EmbeddingSet read_embeddings_csv(const std::filesystem::path& path) {
  std::vector<std::string> ids;
  std::vector<double> values;
  std::size_t dim = 0;
  bool header = true;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    auto cells = split_csv_line(line);
    if (header) {
      if (cells.size() < 2 || cells[0] != "id") {
        throw IngestionError(fmt::format("{}: header must be id,e0,...", path.string()));
      }
      dim = cells.size() - 1;
      header = false;
      return;
    }
    if (cells.size() != dim + 1) {
      throw IngestionError(fmt::format("{}:{}: {} columns, header has {}", path.string(), lineno,
                                       cells.size(), dim + 1));
    }
    ids.push_back(std::move(cells[0]));
    for (std::size_t j = 1; j <= dim; ++j) values.push_back(parse_cell(cells[j], path, lineno));
  });
  if (header) throw IngestionError(fmt::format("{}: empty file", path.string()));
  try {
    return EmbeddingSet(std::move(ids), dim, std::move(values));
  } catch (const ConfigError& e) {
    throw IngestionError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_embeddings_csv(const std::filesystem::path& path, const EmbeddingSet& embeddings) {
  std::string out = "id";
  for (std::size_t j = 0; j < embeddings.dim(); ++j) out += fmt::format(",e{}", j);
  out += '\n';
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    out += csv_field(embeddings.ids()[i]);
    for (double v : embeddings.row(i)) out += "," + format_double(v);
    out += '\n';
  }
  write_text_file(path, out);
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<double> values;
  bool header = true;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    auto cells = split_csv_line(line);
    if (header) {
      if (cells.size() < 2 || cells[0] != "id") {
        throw IngestionError(fmt::format("{}: header must be id,<feature>...", path.string()));
      }
      columns.assign(cells.begin() + 1, cells.end());
      header = false;
      return;
    }
    if (cells.size() != columns.size() + 1) {
      throw IngestionError(fmt::format("{}:{}: {} columns, header has {}", path.string(), lineno,
                                       cells.size(), columns.size() + 1));
    }
    ids.push_back(std::move(cells[0]));
    for (std::size_t j = 1; j < cells.size(); ++j) values.push_back(parse_cell(cells[j], path, lineno));
  });
  if (header) throw IngestionError(fmt::format("{}: empty file", path.string()));
  return FeatureMatrix(std::move(columns), std::move(ids), std::move(values));
}

std::string features_csv(const FeatureMatrix& features) {
  std::string out = "id";
  for (const auto& c : features.columns()) out += "," + csv_field(c);
  out += '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out += csv_field(features.ids()[i]);
    for (double v : features.row(i)) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

LabelTable read_labels_csv(const std::filesystem::path& path) {
  LabelTable table;
  bool header = true;
  for_each_line(path, [&](const std::string& line, std::size_t lineno) {
    auto cells = split_csv_line(line);
    if (header) {
      if (cells.size() != 2 || cells[0] != "id") {
        throw IngestionError(fmt::format("{}: header must be id,cluster", path.string()));
      }
      header = false;
      return;
    }
    if (cells.size() != 2) {
      throw IngestionError(fmt::format("{}:{}: expected 2 columns", path.string(), lineno));
    }
    const double v = parse_cell(cells[1], path, lineno);
    if (v != static_cast<double>(static_cast<int>(v)) || v < 0) {
      throw IngestionError(fmt::format("{}:{}: cluster '{}' is not a non-negative integer",
                                       path.string(), lineno, cells[1]));
    }
    table.ids.push_back(std::move(cells[0]));
    table.labels.push_back(static_cast<int>(v));
  });
  if (table.ids.empty()) throw IngestionError(fmt::format("{}: no labels", path.string()));
  return table;
}

std::string labels_csv(std::span<const std::string> ids, std::span<const int> labels) {
  std::string out = "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += fmt::format("{},{}\n", csv_field(ids[i]), labels[i]);
  }
  return out;
}

std::vector<TextRecord> read_texts_jsonl(const std::filesystem::path& path) {
  std::vector<TextRecord> out;
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto& id = j.at("id");
      out.push_back({id.is_string() ? id.get<std::string>() : id.dump(),
                     j.at("text").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

}  // namespace fuzzyembed::io

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzyembed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feature column with fewer than two distinct values.
class DegeneratePartition : public Error {
 public:
  using Error::Error;
};

/// Inputs that admit no meaningful answer (constant embeddings, k > distinct rows).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

class NotScored : public Error {
 public:
  using Error::Error;
};

class EmptyRuleBase : public Error {
 public:
  using Error::Error;
};

/// Every individual of a generation produced an empty rule base.
class DegenerateSearch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input file.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Ids present in one input and missing from another.
class IngestionMismatch : public IngestionError {
 public:
  IngestionMismatch(const std::string& what, std::vector<std::string> ids)
      : IngestionError(what), offending_ids_(std::move(ids)) {}

  const std::vector<std::string>& offending_ids() const noexcept { return offending_ids_; }

 private:
  std::vector<std::string> offending_ids_;
};

}  // namespace fuzzyembed

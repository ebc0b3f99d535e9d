#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fuzzyembed/dataset.hpp"

namespace fuzzyembed {

struct LexiconEntry {
  double valence = 0.0;              // [-1, 1]
  double subjectivity_weight = 0.0;  // [0, 1]
};

class Lexicon {
 public:
  /// Negation reaches this many tokens back from a lexicon hit.
  static constexpr std::size_t kNegationWindow = 3;

  Lexicon() = default;

  /// Tokens are lowercased. Throws ConfigError on out-of-range values.
  void add_entry(std::string token, LexiconEntry entry);
  void add_negator(std::string token);
  void add_intensifier(std::string token, double multiplier);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const LexiconEntry* find(std::string_view token) const;
  bool is_negator(std::string_view token) const;
  /// 1.0 for tokens that are not intensifiers.
  double intensity(std::string_view token) const;

  /// Reads lexicon.tsv, negators.txt and intensifiers.tsv from `dir`
  /// (the latter two optional). Throws IngestionError.
  static Lexicon load(const std::filesystem::path& dir);

 private:
  std::unordered_map<std::string, LexiconEntry> entries_;
  std::unordered_set<std::string> negators_;
  std::unordered_map<std::string, double> intensifiers_;
};

struct SentimentFeatures {
  double positivity = 0.0;
  double negativity = 0.0;
  double subjectivity = 0.0;
  double polarity = 0.0;

  friend bool operator==(const SentimentFeatures&, const SentimentFeatures&) = default;
};

inline const std::array<std::string, 4> kSentimentColumns{"positivity", "negativity",
                                                          "subjectivity", "polarity"};

/// Lowercased word tokens with punctuation split off. Bytes >= 0x80 are
/// word characters, so any UTF-8 sequence stays inside its word. Clitics are
/// split Treebank-style: "don't" -> "do" "n't", "can't" -> "ca" "n't",
/// "won't" -> "wo" "n't", and 's 're 've 'll 'd 'm become their own tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Suffix-stripping lemmatizer with an irregular-form table. Identity for
/// tokens of three characters or fewer and for non-alphabetic tokens.
std::string lemmatize(std::string_view token);

/// Lexicon scorer. Over the word tokens of `text` (N of them):
///   - a hit is a token found in the lexicon as-is or after lemmatize();
///   - its valence is multiplied by the intensity of the preceding token,
///     clamped to [-1, 1], and sign-flipped when a negator occurs within
///     the previous kNegationWindow tokens;
///   - positivity = sum of positive adjusted valences / N,
///     negativity = sum of |negative adjusted valences| / N,
///     polarity = mean adjusted valence over hits,
///     subjectivity = mean subjectivity weight over hits.
/// All four are 0 when there are no hits. Throws ConfigError on an empty
/// lexicon.
SentimentFeatures extract_features(std::string_view text, const Lexicon& lexicon);

/// One row per text, columns kSentimentColumns.
FeatureMatrix batch_features(std::span<const std::string> ids, std::span<const std::string> texts,
                             const Lexicon& lexicon);

}  // namespace fuzzyembed

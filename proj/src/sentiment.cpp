#include "fuzzyembed/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <utility>

#include <fmt/format.h>

#include "fuzzyembed/errors.hpp"

namespace fuzzyembed {

namespace {

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(trim(line.substr(start, tab - start)));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

double parse_double(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IngestionError(fmt::format("{}:{}: invalid number '{}'", path.string(), line, s));
  }
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

/// Lowercase ASCII plus the Latin-1 capitals U+00C0..U+00DE (except U+00D7).
std::string fold_case(std::string_view w) {
  std::string out(w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      const auto d = static_cast<unsigned char>(out[i + 1]);
      if (d >= 0x80 && d <= 0x9E && d != 0x97) out[i + 1] = static_cast<char>(d + 0x20);
      ++i;
    }
  }
  return out;
}

void push_word(std::string word, std::vector<std::string>& out) {
  if (word.empty()) return;
  word = fold_case(word);
  if (word.size() > 3 && word.ends_with("n't")) {
    out.push_back(word.substr(0, word.size() - 3));
    out.emplace_back("n't");
    return;
  }
  const std::size_t apos = word.rfind('\'');
  if (apos != std::string::npos && apos > 0) {
    const std::string_view tail = std::string_view(word).substr(apos + 1);
    if (tail == "s" || tail == "re" || tail == "ve" || tail == "ll" || tail == "d" || tail == "m") {
      out.push_back(word.substr(0, apos));
      out.push_back(word.substr(apos));
      return;
    }
  }
  out.push_back(std::move(word));
}

bool is_word_token(std::string_view t) {
  return std::any_of(t.begin(), t.end(), [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool has_vowel(std::string_view s) { return std::any_of(s.begin(), s.end(), is_vowel); }

const std::unordered_map<std::string_view, std::string_view>& irregular_forms() {
  static const std::unordered_map<std::string_view, std::string_view> table{
      {"am", "be"},         {"is", "be"},          {"are", "be"},         {"was", "be"},
      {"were", "be"},       {"been", "be"},        {"has", "have"},       {"had", "have"},
      {"does", "do"},       {"did", "do"},         {"done", "do"},        {"ran", "run"},
      {"went", "go"},       {"gone", "go"},        {"saw", "see"},        {"seen", "see"},
      {"took", "take"},     {"taken", "take"},     {"made", "make"},      {"got", "get"},
      {"gotten", "get"},    {"gave", "give"},      {"given", "give"},     {"came", "come"},
      {"felt", "feel"},     {"thought", "think"},  {"bought", "buy"},     {"brought", "bring"},
      {"told", "tell"},     {"found", "find"},     {"left", "leave"},     {"kept", "keep"},
      {"began", "begin"},   {"begun", "begin"},    {"wrote", "write"},    {"written", "write"},
      {"ate", "eat"},       {"eaten", "eat"},      {"fell", "fall"},      {"fallen", "fall"},
      {"knew", "know"},     {"known", "know"},     {"said", "say"},       {"paid", "pay"},
      {"met", "meet"},      {"sat", "sit"},        {"stood", "stand"},    {"lost", "lose"},
      {"won", "win"},       {"held", "hold"},      {"spoke", "speak"},    {"spoken", "speak"},
      {"broke", "break"},   {"broken", "break"},   {"chose", "choose"},   {"chosen", "choose"},
      {"drove", "drive"},   {"driven", "drive"},   {"better", "good"},    {"best", "good"},
      {"worse", "bad"},     {"worst", "bad"},      {"children", "child"}, {"men", "man"},
      {"women", "woman"},   {"people", "person"},  {"feet", "foot"},      {"teeth", "tooth"},
      {"mice", "mouse"},    {"movies", "movie"},   {"cookies", "cookie"}, {"lies", "lie"},
      {"ties", "tie"},      {"dies", "die"},       {"pies", "pie"},       {"zombies", "zombie"},
      {"rookies", "rookie"}, {"series", "series"}, {"species", "species"}, {"news", "news"},
  };
  return table;
}

/// Repair a stem left after stripping -ing/-ed/-er/-est.
std::string restore_stem(std::string stem) {
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && stem[n - 1] != 'l' &&
      stem[n - 1] != 's' && stem[n - 1] != 'z') {
    stem.pop_back();
  } else if (stem.ends_with("i")) {
    stem.back() = 'y';
  } else if (stem.ends_with("at") || stem.ends_with("iz") || stem.ends_with("bl") ||
             stem.ends_with("v") || stem.ends_with("us") || stem.ends_with("c")) {
    stem.push_back('e');
  }
  return stem;
}

}  // namespace

void Lexicon::add_entry(std::string token, LexiconEntry entry) {
  if (!(entry.valence >= -1.0 && entry.valence <= 1.0)) {
    throw ConfigError(fmt::format("lexicon '{}': valence {} outside [-1, 1]", token, entry.valence));
  }
  if (!(entry.subjectivity_weight >= 0.0 && entry.subjectivity_weight <= 1.0)) {
    throw ConfigError(fmt::format("lexicon '{}': subjectivity {} outside [0, 1]", token,
                                  entry.subjectivity_weight));
  }
  entries_[lowercase_ascii(token)] = entry;
}

void Lexicon::add_negator(std::string token) { negators_.insert(lowercase_ascii(token)); }

void Lexicon::add_intensifier(std::string token, double multiplier) {
  if (!(multiplier >= 0.0) || !std::isfinite(multiplier)) {
    throw ConfigError(fmt::format("intensifier '{}': invalid multiplier {}", token, multiplier));
  }
  intensifiers_[lowercase_ascii(token)] = multiplier;
}

const LexiconEntry* Lexicon::find(std::string_view token) const {
  const auto it = entries_.find(std::string(token));
  return it == entries_.end() ? nullptr : &it->second;
}

bool Lexicon::is_negator(std::string_view token) const {
  return negators_.contains(std::string(token));
}

double Lexicon::intensity(std::string_view token) const {
  const auto it = intensifiers_.find(std::string(token));
  return it == intensifiers_.end() ? 1.0 : it->second;
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  Lexicon lex;
  const auto lexicon_path = dir / "lexicon.tsv";
  std::ifstream in(lexicon_path);
  if (!in) throw IngestionError(fmt::format("cannot open lexicon '{}'", lexicon_path.string()));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto cols = split_tabs(view);
    if (lineno == 1 && cols[0] == "token") continue;
    if (cols.size() != 3) {
      throw IngestionError(fmt::format("{}:{}: expected 3 tab-separated columns",
                                       lexicon_path.string(), lineno));
    }
    try {
      lex.add_entry(std::string(cols[0]), {parse_double(cols[1], lexicon_path, lineno),
                                           parse_double(cols[2], lexicon_path, lineno)});
    } catch (const ConfigError& e) {
      throw IngestionError(fmt::format("{}:{}: {}", lexicon_path.string(), lineno, e.what()));
    }
  }

  if (std::ifstream neg(dir / "negators.txt"); neg) {
    while (std::getline(neg, line)) {
      const std::string_view view = trim(line);
      if (!view.empty() && view.front() != '#') lex.add_negator(std::string(view));
    }
  }

  const auto int_path = dir / "intensifiers.tsv";
  if (std::ifstream ints(int_path); ints) {
    lineno = 0;
    while (std::getline(ints, line)) {
      ++lineno;
      const std::string_view view = trim(line);
      if (view.empty() || view.front() == '#') continue;
      const auto cols = split_tabs(view);
      if (lineno == 1 && cols[0] == "token") continue;
      if (cols.size() != 2) {
        throw IngestionError(fmt::format("{}:{}: expected 2 tab-separated columns",
                                         int_path.string(), lineno));
      }
      lex.add_intensifier(std::string(cols[0]), parse_double(cols[1], int_path, lineno));
    }
  }
  return lex;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string word;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    // U+2019 RIGHT SINGLE QUOTATION MARK is treated as an apostrophe.
    const bool curly = c == 0xE2 && i + 2 < n && static_cast<unsigned char>(text[i + 1]) == 0x80 &&
                       static_cast<unsigned char>(text[i + 2]) == 0x99;
    if (c == '\'' || curly) {
      const std::size_t next = i + (curly ? 3 : 1);
      const bool inside = !word.empty() && next < n &&
                          std::isalpha(static_cast<unsigned char>(text[next]));
      if (inside) {
        word.push_back('\'');
      } else {
        push_word(std::exchange(word, {}), out);
        out.emplace_back("'");
      }
      i = next - 1;
    } else if (is_word_byte(c)) {
      word.push_back(static_cast<char>(c));
    } else {
      push_word(std::exchange(word, {}), out);
      if (!is_space(c) && c != 0) out.emplace_back(1, static_cast<char>(c));
    }
  }
  push_word(std::move(word), out);
  return out;
}

std::string lemmatize(std::string_view token) {
  const auto& irregular = irregular_forms();
  if (const auto it = irregular.find(token); it != irregular.end()) return std::string(it->second);
  if (token.size() <= 3 ||
      !std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
    return std::string(token);
  }
  std::string w(token);
  auto strip = [&](std::size_t k) { return w.substr(0, w.size() - k); };

  if (w.ends_with("sses")) return strip(2);
  if (w.ends_with("ies") && w.size() > 4) return strip(3) + "y";
  if (w.ends_with("xes") || w.ends_with("ches") || w.ends_with("shes") || w.ends_with("zes")) {
    return strip(2);
  }
  if (w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) return w;
  if (w.ends_with("s")) return strip(1);

  for (const std::string_view suffix : {"ing", "est", "ed", "er"}) {
    if (!w.ends_with(suffix)) continue;
    std::string stem = strip(suffix.size());
    if (stem.size() >= 3 && has_vowel(stem)) return restore_stem(std::move(stem));
  }
  return w;
}

SentimentFeatures extract_features(std::string_view text, const Lexicon& lexicon) {
  if (lexicon.empty()) throw ConfigError("extract_features: empty lexicon");
  const std::vector<std::string> tokens = tokenize(text);
  std::size_t words = 0;
  std::size_t hits = 0;
  double pos = 0.0, neg = 0.0, signed_sum = 0.0, subj = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (!is_word_token(t)) continue;
    ++words;
    const LexiconEntry* e = lexicon.find(t);
    if (!e) e = lexicon.find(lemmatize(t));
    if (!e) continue;
    ++hits;
    double v = e->valence;
    if (i > 0) v *= lexicon.intensity(tokens[i - 1]);
    v = std::clamp(v, -1.0, 1.0);
    const std::size_t from = i >= Lexicon::kNegationWindow ? i - Lexicon::kNegationWindow : 0;
    for (std::size_t j = from; j < i; ++j) {
      if (lexicon.is_negator(tokens[j])) {
        v = -v;
        break;
      }
    }
    if (v > 0.0) pos += v;
    if (v < 0.0) neg -= v;
    signed_sum += v;
    subj += e->subjectivity_weight;
  }
  if (hits == 0) return {};
  const auto nw = static_cast<double>(words);
  const auto nh = static_cast<double>(hits);
  return {std::clamp(pos / nw, 0.0, 1.0), std::clamp(neg / nw, 0.0, 1.0),
          std::clamp(subj / nh, 0.0, 1.0), std::clamp(signed_sum / nh, -1.0, 1.0)};
}

FeatureMatrix batch_features(std::span<const std::string> ids, std::span<const std::string> texts,
                             const Lexicon& lexicon) {
  if (ids.size() != texts.size()) throw ConfigError("batch_features: ids and texts differ in length");
  FeatureMatrix out({kSentimentColumns.begin(), kSentimentColumns.end()}, {}, {});
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const SentimentFeatures f = extract_features(texts[i], lexicon);
    const std::array<double, 4> row{f.positivity, f.negativity, f.subjectivity, f.polarity};
    out.push_row(ids[i], row);
  }
  return out;
}

}  // namespace fuzzyembed

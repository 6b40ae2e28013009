// Copyright 2026 The lmpoll Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lmpoll/builtin_lexicons.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

/// Lowercased runs of ASCII letters and digits. Bytes >= 0x80 count as
/// word characters so UTF-8 words stay whole.
inline std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                (c >= '0' && c <= '9') || c >= 0x80;
    if (word) {
      cur.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                           : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// A named set of word patterns: literal words, or prefixes written "ador*".
class Lexicon {
 public:
  Lexicon(std::string name, const std::vector<std::string>& entries)
      : name_(std::move(name)) {
    for (const auto& raw : entries) add(raw);
    if (entries_.empty())
      throw ArgumentError("lexicon " + name_ + " has no entries");
  }

  const std::string& name() const { return name_; }
  const std::set<std::string>& entries() const { return entries_; }

  bool matches(std::string_view token) const {
    if (literals_.count(std::string(token))) return true;
    for (const auto& p : prefixes_)
      if (token.starts_with(p)) return true;
    return false;
  }

 private:
  void add(std::string_view raw) {
    if (raw.empty()) throw ArgumentError("lexicon " + name_ + ": empty entry");
    for (char c : raw)
      if (text::is_space(c))
        throw ArgumentError("lexicon " + name_ + ": entry contains whitespace");
    std::string e = text::to_lower(raw);
    auto star = e.find('*');
    if (star != std::string::npos && star + 1 != e.size())
      throw ArgumentError("lexicon " + name_ + ": '*' must end the entry: " + e);
    if (e == "*")
      throw ArgumentError("lexicon " + name_ + ": bare '*' matches everything");
    if (!entries_.insert(e).second) return;
    if (star == std::string::npos)
      literals_.insert(e);
    else
      prefixes_.push_back(e.substr(0, star));
  }

  std::string name_;
  std::set<std::string> entries_;
  std::unordered_set<std::string> literals_;
  std::vector<std::string> prefixes_;
};

/// One pattern per line; '#' starts a comment. Duplicates collapse.
inline Lexicon load_lexicon(const std::string& path, std::string name = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto t = text::trim(line);
    if (!t.empty()) entries.emplace_back(t);
  }
  if (entries.empty()) throw DataError("lexicon " + path + " has no entries");
  if (name.empty()) name = path;
  try {
    return Lexicon(std::move(name), entries);
  } catch (const ArgumentError& e) {
    throw DataError(e.what());
  }
}

enum class SentimentLabel { kPositive, kNegative };

inline std::string_view label_name(SentimentLabel l) {
  return l == SentimentLabel::kPositive ? "POSITIVE" : "NEGATIVE";
}

struct SentimentResult {
  SentimentLabel label = SentimentLabel::kPositive;
  std::size_t pos_hits = 0;
  std::size_t neg_hits = 0;
};

/// Text -> label. Implementations must be deterministic.
class SentimentClassifier {
 public:
  virtual ~SentimentClassifier() = default;
  virtual SentimentResult classify(std::string_view text) const = 0;
};

/// Counts tokens matching each lexicon. Ties, including 0/0, are POSITIVE.
inline SentimentResult classify(std::string_view text, const Lexicon& positive,
                                const Lexicon& negative) {
  SentimentResult r;
  for (const auto& tok : word_tokens(text)) {
    if (positive.matches(tok)) ++r.pos_hits;
    if (negative.matches(tok)) ++r.neg_hits;
  }
  r.label = r.pos_hits >= r.neg_hits ? SentimentLabel::kPositive
                                     : SentimentLabel::kNegative;
  return r;
}

class LexiconClassifier final : public SentimentClassifier {
 public:
  LexiconClassifier(Lexicon positive, Lexicon negative)
      : positive_(std::move(positive)), negative_(std::move(negative)) {}

  SentimentResult classify(std::string_view text) const override {
    return lmpoll::classify(text, positive_, negative_);
  }

  const Lexicon& positive() const { return positive_; }
  const Lexicon& negative() const { return negative_; }

 private:
  Lexicon positive_;
  Lexicon negative_;
};

inline Lexicon builtin_positive_lexicon() {
  auto e = builtin::positive_words();
  e.insert(e.end(), builtin::positive_patterns().begin(),
           builtin::positive_patterns().end());
  return Lexicon("PosEmo", e);
}

inline Lexicon builtin_negative_lexicon() {
  auto e = builtin::negative_words();
  e.insert(e.end(), builtin::negative_patterns().begin(),
           builtin::negative_patterns().end());
  return Lexicon("NegEmo", e);
}

inline LexiconClassifier builtin_classifier() {
  return LexiconClassifier(builtin_positive_lexicon(),
                           builtin_negative_lexicon());
}

/// 100 * matching tokens / total tokens per category, pooled over `texts`.
inline std::map<std::string, double> affect_percentages(
    const std::vector<std::string>& texts,
    const std::vector<Lexicon>& categories) {
  std::size_t total = 0;
  std::vector<std::size_t> hits(categories.size(), 0);
  for (const auto& t : texts) {
    for (const auto& tok : word_tokens(t)) {
      ++total;
      for (std::size_t c = 0; c < categories.size(); ++c)
        if (categories[c].matches(tok)) ++hits[c];
    }
  }
  if (total == 0) throw ArgumentError("affect_percentages: no tokens");
  std::map<std::string, double> out;
  for (std::size_t c = 0; c < categories.size(); ++c)
    out[categories[c].name()] =
        100.0 * static_cast<double>(hits[c]) / static_cast<double>(total);
  return out;
}

}  // namespace lmpoll

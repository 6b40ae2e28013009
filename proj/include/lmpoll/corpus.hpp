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

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lmpoll/error.hpp"
#include "lmpoll/review.hpp"
#include "lmpoll/rng.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

enum class CorpusFormat { kNumericRecords, kReviewStars };

inline std::string_view format_name(CorpusFormat f) {
  return f == CorpusFormat::kNumericRecords ? "numeric-records"
                                            : "review-stars";
}

inline CorpusFormat parse_format_name(std::string_view s) {
  if (s == "numeric-records" || s == "numeric" || s == "NUMERIC_RECORDS")
    return CorpusFormat::kNumericRecords;
  if (s == "review-stars" || s == "review" || s == "REVIEW_STARS")
    return CorpusFormat::kReviewStars;
  throw ArgumentError("unknown corpus format: " + std::string(s));
}

// Record delimiters.
inline constexpr std::string_view kReviewOpen = "review: ";
inline constexpr std::string_view kStarsDelim = ", stars: ";
inline constexpr std::string_view kTerminator = " --";

struct Corpus {
  CorpusFormat format = CorpusFormat::kReviewStars;
  std::vector<std::string> lines;
  std::string source;
};

/// Rewrites every " --" inside review text to " - -" so that the record
/// terminator cannot occur in the text field.
inline std::string sanitize_review_text(std::string_view raw) {
  std::string s(text::trim(text::collapse_newlines(raw)));
  std::size_t pos = 0;
  while ((pos = s.find(" --", pos)) != std::string::npos) {
    s.replace(pos, 3, " - -");
    pos += 1;
  }
  return s;
}

inline std::string render_stars(Stars s) { return std::to_string(s) + ".0"; }

inline std::string numeric_line(const Review& r) {
  std::string out = "stars = ";
  out += render_stars(r.stars);
  out += ", useful_votes = " + std::to_string(r.useful_votes);
  out += ", funny_votes = " + std::to_string(r.funny_votes);
  out += ", cool_votes = " + std::to_string(r.cool_votes);
  out += kTerminator;
  return out;
}

inline std::string review_line(std::string_view text, Stars stars) {
  std::string out(kReviewOpen);
  out += sanitize_review_text(text);
  out += kStarsDelim;
  out += render_stars(stars);
  out += kTerminator;
  return out;
}

inline std::string review_line(const Review& r) {
  return review_line(r.text, r.stars);
}

namespace detail {

inline std::vector<std::size_t> draw_lines(std::size_t available,
                                           std::size_t n_lines,
                                           std::uint64_t seed) {
  if (n_lines > available)
    throw ArgumentError("requested " + std::to_string(n_lines) +
                        " lines but the set has " + std::to_string(available));
  Rng rng(seed);
  return sample_indices(available, n_lines, rng);
}

inline std::string corpus_source(const ReviewSet& set, std::string_view kind,
                                 std::size_t n, std::uint64_t seed) {
  return std::string(kind) + " lines=" + std::to_string(n) +
         " seed=" + std::to_string(seed) + " from [" + set.provenance() + "]";
}

}  // namespace detail

/// `n_lines` reviews drawn without replacement, one numeric record each.
inline Corpus build_numeric_corpus(const ReviewSet& set, std::size_t n_lines,
                                   std::uint64_t seed) {
  Corpus c{CorpusFormat::kNumericRecords, {},
           detail::corpus_source(set, "numeric-records", n_lines, seed)};
  for (auto i : detail::draw_lines(set.size(), n_lines, seed))
    c.lines.push_back(numeric_line(set[i]));
  return c;
}

inline Corpus build_review_corpus(const ReviewSet& set, std::size_t n_lines,
                                  std::uint64_t seed) {
  Corpus c{CorpusFormat::kReviewStars, {},
           detail::corpus_source(set, "review-stars", n_lines, seed)};
  for (auto i : detail::draw_lines(set.size(), n_lines, seed))
    c.lines.push_back(review_line(set[i]));
  return c;
}

inline Corpus build_corpus(const ReviewSet& set, CorpusFormat format,
                           std::size_t n_lines, std::uint64_t seed) {
  return format == CorpusFormat::kNumericRecords
             ? build_numeric_corpus(set, n_lines, seed)
             : build_review_corpus(set, n_lines, seed);
}

/// Drops every review whose text contains `phrase` (case-insensitive).
inline ReviewSet mask(const ReviewSet& set, std::string_view phrase) {
  if (phrase.empty()) throw ArgumentError("mask phrase must not be empty");
  std::vector<Review> kept;
  for (const auto& r : set)
    if (!text::icontains(r.text, phrase)) kept.push_back(r);
  return ReviewSet(std::move(kept), set.provenance() + " | mask=\"" +
                                        std::string(phrase) + "\"");
}

/// `per_star` reviews of every star class, drawn without replacement, then
/// shuffled together.
inline ReviewSet balance_by_stars(const ReviewSet& set, std::size_t per_star,
                                  std::uint64_t seed) {
  if (per_star == 0) throw ArgumentError("per_star must be positive");
  std::array<std::vector<std::size_t>, 5> by_star;
  for (std::size_t i = 0; i < set.size(); ++i)
    by_star[set[i].stars - 1].push_back(i);
  for (int s = 0; s < 5; ++s) {
    if (by_star[s].size() < per_star)
      throw DataError("star " + std::to_string(s + 1) + ": need " +
                      std::to_string(per_star) + " have " +
                      std::to_string(by_star[s].size()));
  }
  Rng rng(seed);
  std::vector<Review> out;
  out.reserve(per_star * 5);
  for (int s = 0; s < 5; ++s) {
    for (auto k : sample_indices(by_star[s].size(), per_star, rng))
      out.push_back(set[by_star[s][k]]);
  }
  rng.shuffle(out);
  return ReviewSet(std::move(out), set.provenance() + " | balance per_star=" +
                                       std::to_string(per_star) +
                                       " seed=" + std::to_string(seed));
}

inline ReviewSet isolate_star(const ReviewSet& set, Stars star) {
  if (!valid_stars(star)) throw ArgumentError("star must be in 1..5");
  std::vector<Review> out;
  for (const auto& r : set)
    if (r.stars == star) out.push_back(r);
  return ReviewSet(std::move(out), set.provenance() + " | isolate star=" +
                                       std::to_string(star));
}

/// Seeded shuffle, then the first round(fraction * N) lines train.
inline std::pair<Corpus, Corpus> split(const Corpus& corpus,
                                       double train_fraction,
                                       std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0,1)");
  std::vector<std::size_t> order(corpus.lines.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(order.size())));
  Corpus train{corpus.format, {}, corpus.source + " | split train"};
  Corpus test{corpus.format, {}, corpus.source + " | split test"};
  for (std::size_t k = 0; k < order.size(); ++k)
    (k < n_train ? train : test).lines.push_back(corpus.lines[order[k]]);
  return {std::move(train), std::move(test)};
}

inline void write_corpus(const Corpus& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& line : c.lines) out << line << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline CorpusFormat detect_format(std::string_view first_line) {
  if (first_line.starts_with("stars = ")) return CorpusFormat::kNumericRecords;
  return CorpusFormat::kReviewStars;
}

/// Reads a corpus file. The final line must be newline-terminated.
inline Corpus read_corpus(const std::string& path,
                          std::optional<CorpusFormat> format = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  if (!data.empty() && data.back() != '\n')
    throw DataError(path + ": missing final newline");
  Corpus c;
  c.source = path;
  for (auto line : text::split_lines(data)) {
    if (line.empty()) continue;
    c.lines.emplace_back(line);
  }
  c.format = format ? *format
                    : (c.lines.empty() ? CorpusFormat::kReviewStars
                                       : detect_format(c.lines.front()));
  return c;
}

}  // namespace lmpoll

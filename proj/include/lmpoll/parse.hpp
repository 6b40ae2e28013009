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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lmpoll/corpus.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

enum class ParseStatus { kOk, kMalformed };

inline std::string_view status_name(ParseStatus s) {
  return s == ParseStatus::kOk ? "OK" : "MALFORMED";
}

/// One line of a generated stream, classified against its record grammar.
struct ParsedRecord {
  CorpusFormat kind = CorpusFormat::kReviewStars;
  std::string text;  // empty for numeric records
  Stars stars = 0;
  std::int64_t useful_votes = 0;
  std::int64_t funny_votes = 0;
  std::int64_t cool_votes = 0;
  std::string raw;
  ParseStatus status = ParseStatus::kMalformed;
  std::string reason;  // non-empty iff malformed

  bool ok() const { return status == ParseStatus::kOk; }
};

struct ParseReport {
  CorpusFormat format = CorpusFormat::kReviewStars;
  std::vector<ParsedRecord> records;
  std::size_t total = 0;
  std::size_t malformed = 0;

  double error_rate() const {
    return total == 0 ? 0.0
                      : static_cast<double>(malformed) /
                            static_cast<double>(total);
  }
  std::size_t ok_count() const { return total - malformed; }
};

namespace detail {

inline ParsedRecord malformed(CorpusFormat kind, std::string_view line,
                              std::string reason) {
  ParsedRecord r;
  r.kind = kind;
  r.raw = std::string(line);
  r.status = ParseStatus::kMalformed;
  r.reason = std::move(reason);
  return r;
}

// "<D>.0" with D in 1..5. Returns 0 for a malformed token, -1 for a
// well-formed value outside the range.
inline int parse_star_token(std::string_view s) {
  if (s.size() != 3 || s[1] != '.' || s[2] != '0') return 0;
  if (s[0] < '0' || s[0] > '9') return 0;
  int d = s[0] - '0';
  return (d >= 1 && d <= 5) ? d : -1;
}

// Consumes a base-10 count without leading zeros from the front of `s`.
inline bool consume_count(std::string_view& s, std::int64_t& out) {
  std::size_t n = 0;
  while (n < s.size() && s[n] >= '0' && s[n] <= '9') ++n;
  if (n == 0 || n > 18) return false;
  if (n > 1 && s[0] == '0') return false;
  out = 0;
  for (std::size_t i = 0; i < n; ++i) out = out * 10 + (s[i] - '0');
  s.remove_prefix(n);
  return true;
}

inline bool consume(std::string_view& s, std::string_view lit) {
  if (!s.starts_with(lit)) return false;
  s.remove_prefix(lit.size());
  return true;
}

}  // namespace detail

/// `review: <TEXT>, stars: <D>.0 --`. The text runs to the last ", stars: ".
inline ParsedRecord parse_review_line(std::string_view line) {
  constexpr auto kind = CorpusFormat::kReviewStars;
  if (!line.starts_with(kReviewOpen))
    return detail::malformed(kind, line, "missing review prefix");
  if (!line.ends_with(kTerminator) || line.size() < kReviewOpen.size() + 3)
    return detail::malformed(kind, line, "no terminator");
  std::string_view body = line.substr(
      kReviewOpen.size(),
      line.size() - kReviewOpen.size() - kTerminator.size());
  std::size_t delim = body.rfind(kStarsDelim);
  if (delim == std::string_view::npos)
    return detail::malformed(kind, line, "missing stars delimiter");
  std::string_view text_field = body.substr(0, delim);
  std::string_view star_field = body.substr(delim + kStarsDelim.size());
  int stars = detail::parse_star_token(star_field);
  if (stars == 0) return detail::malformed(kind, line, "bad stars value");
  if (stars < 0) return detail::malformed(kind, line, "stars out of range");
  if (text_field.empty()) return detail::malformed(kind, line, "empty text");
  if (text::is_space(text_field.back()))
    return detail::malformed(kind, line, "text ends with whitespace");
  ParsedRecord r;
  r.kind = kind;
  r.text = std::string(text_field);
  r.stars = stars;
  r.raw = std::string(line);
  r.status = ParseStatus::kOk;
  return r;
}

/// `stars = <D>.0, useful_votes = <N>, funny_votes = <N>, cool_votes = <N> --`
inline ParsedRecord parse_numeric_line(std::string_view line) {
  constexpr auto kind = CorpusFormat::kNumericRecords;
  std::string_view s = line;
  if (!detail::consume(s, "stars = "))
    return detail::malformed(kind, line, "missing stars field");
  if (s.size() < 3) return detail::malformed(kind, line, "bad stars value");
  int stars = detail::parse_star_token(s.substr(0, 3));
  if (stars == 0) return detail::malformed(kind, line, "bad stars value");
  if (stars < 0) return detail::malformed(kind, line, "stars out of range");
  s.remove_prefix(3);
  ParsedRecord r;
  r.kind = kind;
  r.stars = stars;
  struct Field {
    std::string_view label;
    std::int64_t* slot;
  };
  const Field fields[] = {{", useful_votes = ", &r.useful_votes},
                          {", funny_votes = ", &r.funny_votes},
                          {", cool_votes = ", &r.cool_votes}};
  for (const auto& f : fields) {
    if (!detail::consume(s, f.label))
      return detail::malformed(
          kind, line, "missing " + std::string(f.label.substr(2, f.label.size() - 5)));
    if (!detail::consume_count(s, *f.slot))
      return detail::malformed(
          kind, line, "bad " + std::string(f.label.substr(2, f.label.size() - 5)));
  }
  if (s.empty()) return detail::malformed(kind, line, "no terminator");
  if (s != kTerminator) return detail::malformed(kind, line, "trailing garbage");
  r.raw = std::string(line);
  r.status = ParseStatus::kOk;
  return r;
}

inline ParsedRecord parse_line(std::string_view line, CorpusFormat format) {
  return format == CorpusFormat::kNumericRecords ? parse_numeric_line(line)
                                                 : parse_review_line(line);
}

/// Classifies every non-blank line of `stream`. Never throws on content.
inline ParseReport parse_stream(std::string_view stream, CorpusFormat format) {
  ParseReport report;
  report.format = format;
  for (auto line : text::split_lines(stream)) {
    if (text::trim(line).empty()) continue;
    auto rec = parse_line(line, format);
    ++report.total;
    if (!rec.ok()) ++report.malformed;
    report.records.push_back(std::move(rec));
  }
  return report;
}

/// Pools two reports of the same format.
inline ParseReport merge(ParseReport a, const ParseReport& b) {
  if (a.format != b.format)
    throw ArgumentError("cannot merge reports of different formats");
  a.records.insert(a.records.end(), b.records.begin(), b.records.end());
  a.total += b.total;
  a.malformed += b.malformed;
  return a;
}

using TextStars = std::pair<std::string, Stars>;

/// (text, stars) of every OK review record, in stream order.
inline std::vector<TextStars> usable_pairs(const ParseReport& report) {
  if (report.format != CorpusFormat::kReviewStars)
    throw ArgumentError("usable_pairs requires a review-stars report");
  std::vector<TextStars> out;
  for (const auto& r : report.records)
    if (r.ok()) out.emplace_back(r.text, r.stars);
  return out;
}

inline std::string summary_line(const ParseReport& report) {
  return "total=" + std::to_string(report.total) +
         " ok=" + std::to_string(report.ok_count()) +
         " malformed=" + std::to_string(report.malformed) +
         " error=" + text::fixed(100.0 * report.error_rate(), 2) + "%";
}

}  // namespace lmpoll

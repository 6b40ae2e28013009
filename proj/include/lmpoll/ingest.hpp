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

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/review.hpp"
#include "lmpoll/rng.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

using BusinessCategories = std::map<std::string, std::set<std::string>>;

struct LoadOptions {
  // Count and skip schema violations instead of aborting.
  bool skip_bad_lines = false;
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t loaded = 0;
  std::size_t bad_lines = 0;
  std::size_t unknown_business = 0;
  std::size_t filtered_out = 0;
};

namespace detail {

template <typename Fn>
void for_each_record(const std::string& path, const LoadOptions& opts,
                     LoadStats& stats, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    ++stats.lines;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        throw DataError("malformed record");
      }
      if (!j.is_object()) throw DataError("malformed record");
      fn(j);
    } catch (const DataError& e) {
      if (!opts.skip_bad_lines)
        throw DataError("line " + std::to_string(lineno) + ": " + e.what());
      ++stats.bad_lines;
    } catch (const nlohmann::json::exception& e) {
      if (!opts.skip_bad_lines)
        throw DataError("line " + std::to_string(lineno) + ": " + e.what());
      ++stats.bad_lines;
    }
  }
  if (in.bad()) throw IoError("read failed: " + path);
}

inline std::int64_t vote_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return 0;
  if (!it->is_number_integer()) throw DataError(std::string("bad ") + key);
  auto v = it->get<std::int64_t>();
  if (v < 0) throw DataError(std::string(key) + " is negative");
  return v;
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing ") + key);
  if (!it->is_string()) throw DataError(std::string("bad ") + key);
  return it->get<std::string>();
}

}  // namespace detail

/// Parses "Restaurants, American (Traditional)" into its trimmed parts.
inline std::set<std::string> parse_categories(std::string_view s) {
  std::set<std::string> out;
  for (auto part : text::split(s, ',')) {
    auto t = text::trim(part);
    if (!t.empty()) out.emplace(t);
  }
  return out;
}

/// Loads a Yelp Open Dataset business file. A null categories value is an
/// empty set; an absent one is an error.
inline BusinessCategories load_businesses(const std::string& path,
                                          const LoadOptions& opts = {},
                                          LoadStats* stats_out = nullptr) {
  BusinessCategories out;
  LoadStats stats;
  detail::for_each_record(path, opts, stats, [&](const nlohmann::json& j) {
    auto id = detail::string_field(j, "business_id");
    auto it = j.find("categories");
    if (it == j.end()) throw DataError("missing categories");
    std::set<std::string> cats;
    if (it->is_string()) {
      cats = parse_categories(it->get<std::string>());
    } else if (!it->is_null()) {
      throw DataError("bad categories");
    }
    out[id] = std::move(cats);
    ++stats.loaded;
  });
  if (stats_out) *stats_out = stats;
  return out;
}

/// Loads reviews, keeping those whose business carries `category` exactly.
/// Reviews of businesses absent from `businesses` are counted, not loaded.
inline ReviewSet load_reviews(const std::string& path,
                              const BusinessCategories& businesses,
                              const std::optional<std::string>& category,
                              const LoadOptions& opts = {},
                              LoadStats* stats_out = nullptr) {
  std::vector<Review> reviews;
  std::set<std::string> seen_ids;
  LoadStats stats;
  detail::for_each_record(path, opts, stats, [&](const nlohmann::json& j) {
    Review r;
    r.review_id = detail::string_field(j, "review_id");
    r.business_id = detail::string_field(j, "business_id");
    auto sit = j.find("stars");
    if (sit == j.end()) throw DataError("missing stars");
    if (!sit->is_number()) throw DataError("bad stars");
    double s = sit->get<double>();
    if (s != std::floor(s) || !valid_stars(static_cast<std::int64_t>(s)))
      throw DataError("stars out of range");
    r.stars = static_cast<Stars>(s);
    r.useful_votes = detail::vote_field(j, "useful");
    r.funny_votes = detail::vote_field(j, "funny");
    r.cool_votes = detail::vote_field(j, "cool");
    r.text = std::string(
        text::trim(text::collapse_newlines(detail::string_field(j, "text"))));
    if (r.text.empty()) throw DataError("empty text");
    if (seen_ids.count(r.review_id)) throw DataError("duplicate review_id");

    auto biz = businesses.find(r.business_id);
    if (biz == businesses.end()) {
      ++stats.unknown_business;
      return;
    }
    if (category && !biz->second.count(*category)) {
      ++stats.filtered_out;
      return;
    }
    r.categories = biz->second;
    seen_ids.insert(r.review_id);
    reviews.push_back(std::move(r));
    ++stats.loaded;
  });
  if (stats_out) *stats_out = stats;
  std::string prov = path;
  if (category) prov += " category=" + *category;
  return ReviewSet(std::move(reviews), prov);
}

struct ReviewFilter {
  std::optional<std::set<Stars>> stars;
  std::optional<std::string> contains;
  std::optional<std::string> not_contains;
};

/// Conjunction of the supplied predicates; phrases match case-insensitively.
inline ReviewSet filter_reviews(const ReviewSet& set, const ReviewFilter& f) {
  if ((f.contains && f.contains->empty()) ||
      (f.not_contains && f.not_contains->empty()))
    throw ArgumentError("filter phrase must not be empty");
  std::vector<Review> out;
  for (const auto& r : set) {
    if (f.stars && !f.stars->count(r.stars)) continue;
    if (f.contains && !text::icontains(r.text, *f.contains)) continue;
    if (f.not_contains && text::icontains(r.text, *f.not_contains)) continue;
    out.push_back(r);
  }
  std::string prov = set.provenance() + " | filter";
  if (f.stars) {
    prov += " stars=";
    for (auto s : *f.stars) prov += std::to_string(s);
  }
  if (f.contains) prov += " contains=\"" + *f.contains + "\"";
  if (f.not_contains) prov += " not_contains=\"" + *f.not_contains + "\"";
  return ReviewSet(std::move(out), prov);
}

/// A phrase planted verbatim into a fraction of synthesized reviews.
struct PhraseTag {
  std::string phrase;
  double probability = 0.0;
};

/// Parameters of a synthetic review population.
struct SynthSpec {
  std::size_t n = 0;
  std::array<double, 5> star_weights{};
  // Probability that a content token comes from the positive lexicon.
  std::array<double, 5> positivity_by_star{};
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 24;
  std::uint64_t seed = 0;
  // Each vote count is geometric: P(v > k | v >= k) = vote_tail.
  double vote_tail = 0.1;
  // At most one tag is planted per review.
  std::vector<PhraseTag> phrases;
};

inline void validate(const SynthSpec& spec) {
  if (spec.n == 0) throw ArgumentError("synth: n must be positive");
  double total = 0.0;
  for (double w : spec.star_weights) {
    if (!(w >= 0.0)) throw ArgumentError("synth: star weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw ArgumentError("synth: star weights all zero");
  for (std::size_t i = 0; i < 5; ++i) {
    double p = spec.positivity_by_star[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw ArgumentError("synth: positivity must lie in [0,1]");
    if (i > 0 && p < spec.positivity_by_star[i - 1])
      throw ArgumentError("synth: positivity must be non-decreasing in stars");
  }
  if (spec.min_tokens == 0 || spec.min_tokens > spec.max_tokens)
    throw ArgumentError("synth: bad tokens_per_review range");
  if (!(spec.vote_tail >= 0.0 && spec.vote_tail < 1.0))
    throw ArgumentError("synth: vote_tail must lie in [0,1)");
  double phrase_mass = 0.0;
  for (const auto& t : spec.phrases) {
    if (text::trim(t.phrase).empty())
      throw ArgumentError("synth: empty phrase tag");
    if (!(t.probability >= 0.0))
      throw ArgumentError("synth: phrase probability must be >= 0");
    phrase_mass += t.probability;
  }
  if (phrase_mass > 1.0)
    throw ArgumentError("synth: phrase probabilities sum above 1");
}

inline constexpr double kFillerProbability = 0.5;

/// Deterministic synthetic population. Review i is drawn from its own
/// generator seeded by child_seed(spec.seed, i), in this order: stars,
/// length, content tokens, votes, phrase tag.
inline ReviewSet synthesize_population(
    const SynthSpec& spec, const std::vector<std::string>& positive,
    const std::vector<std::string>& negative,
    const std::vector<std::string>& filler) {
  validate(spec);
  if (positive.empty() || negative.empty() || filler.empty())
    throw ArgumentError("synth: lexicons must be non-empty");
  {
    std::set<std::string> p(positive.begin(), positive.end());
    std::set<std::string> n(negative.begin(), negative.end());
    std::set<std::string> f(filler.begin(), filler.end());
    for (const auto& w : n)
      if (p.count(w)) throw ArgumentError("synth: lexicons overlap on " + w);
    for (const auto& w : f)
      if (p.count(w) || n.count(w))
        throw ArgumentError("synth: lexicons overlap on " + w);
  }

  std::vector<double> phrase_weights;
  double phrase_mass = 0.0;
  for (const auto& t : spec.phrases) {
    phrase_weights.push_back(t.probability);
    phrase_mass += t.probability;
  }

  auto geometric = [&](Rng& rng) {
    std::int64_t v = 0;
    while (rng.bernoulli(spec.vote_tail)) ++v;
    return v;
  };

  std::vector<Review> reviews;
  reviews.reserve(spec.n);
  const int width = 8;
  for (std::size_t i = 0; i < spec.n; ++i) {
    Rng rng(child_seed(spec.seed, i));
    Review r;
    std::string idx = std::to_string(i);
    if (idx.size() < width) idx.insert(0, width - idx.size(), '0');
    r.review_id = "syn-" + idx;
    r.business_id = "syn-business";
    r.stars = static_cast<Stars>(rng.categorical(spec.star_weights) + 1);
    const double pos_p = spec.positivity_by_star[r.stars - 1];
    auto len = static_cast<std::size_t>(rng.between(
        static_cast<std::int64_t>(spec.min_tokens),
        static_cast<std::int64_t>(spec.max_tokens)));
    std::vector<std::string> tokens;
    tokens.reserve(len + 4);
    for (std::size_t t = 0; t < len; ++t) {
      const auto& lex = rng.bernoulli(pos_p) ? positive : negative;
      const std::string* word = &lex[rng.below(lex.size())];
      if (rng.bernoulli(kFillerProbability))
        word = &filler[rng.below(filler.size())];
      tokens.push_back(*word);
    }
    r.useful_votes = geometric(rng);
    r.funny_votes = geometric(rng);
    r.cool_votes = geometric(rng);
    if (phrase_mass > 0.0 && rng.uniform() < phrase_mass) {
      std::size_t which = rng.categorical(phrase_weights);
      std::size_t at = rng.below(tokens.size() + 1);
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at),
                    spec.phrases[which].phrase);
    }
    r.text = text::join(tokens, " ");
    reviews.push_back(std::move(r));
  }

  std::string prov = "synth n=" + std::to_string(spec.n) +
                     " seed=" + std::to_string(spec.seed);
  return ReviewSet(std::move(reviews), prov);
}

}  // namespace lmpoll

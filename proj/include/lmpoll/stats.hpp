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
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lmpoll/analyze.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/parallel.hpp"
#include "lmpoll/parse.hpp"
#include "lmpoll/rng.hpp"

namespace lmpoll {

struct StarHistogram {
  std::array<std::uint64_t, 5> counts{};

  void add(Stars s) {
    if (!valid_stars(s))
      throw ArgumentError("star out of range: " + std::to_string(s));
    ++counts[static_cast<std::size_t>(s - 1)];
  }

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  std::array<double, 5> percentages() const {
    std::array<double, 5> p{};
    const auto t = total();
    if (t == 0) return p;
    for (std::size_t i = 0; i < 5; ++i)
      p[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(t);
    return p;
  }

  std::vector<double> as_vector() const {
    return {counts.begin(), counts.end()};
  }

  friend bool operator==(const StarHistogram&, const StarHistogram&) = default;
};

inline StarHistogram star_histogram(std::span<const TextStars> records) {
  StarHistogram h;
  for (const auto& [text, stars] : records) h.add(stars);
  return h;
}

inline StarHistogram star_histogram(std::span<const Stars> stars) {
  StarHistogram h;
  for (auto s : stars) h.add(s);
  return h;
}

inline StarHistogram star_histogram(const ReviewSet& set) {
  StarHistogram h;
  for (const auto& r : set) h.add(r.stars);
  return h;
}

/// Product-moment correlation, computed from centered sums.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ArgumentError("pearson: vectors differ in length");
  if (x.size() < 2) throw ArgumentError("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ArgumentError("pearson: correlation undefined for a constant vector");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson(const StarHistogram& a, const StarHistogram& b) {
  auto x = a.as_vector(), y = b.as_vector();
  return pearson(x, y);
}

/// 100 * |a - b| / |b|: relative to the second (ground-truth) argument.
inline double pct_difference(double a, double b) {
  if (b == 0.0) throw ArgumentError("pct_difference: reference is zero");
  return 100.0 * std::fabs(a - b) / std::fabs(b);
}

/// Mean stars per label; a label with no members is absent.
inline std::map<SentimentLabel, double> avg_stars_by_sentiment(
    std::span<const TextStars> pairs, const SentimentClassifier& classifier) {
  std::map<SentimentLabel, std::pair<double, std::size_t>> acc;
  for (const auto& [text, stars] : pairs) {
    auto& a = acc[classifier.classify(text).label];
    a.first += stars;
    ++a.second;
  }
  std::map<SentimentLabel, double> out;
  for (const auto& [label, a] : acc)
    out[label] = a.first / static_cast<double>(a.second);
  return out;
}

struct SentimentSplit {
  double pos_pct = 0.0;
  double neg_pct = 0.0;
};

inline SentimentSplit split_from_counts(std::size_t positives,
                                        std::size_t total) {
  if (total == 0) throw ArgumentError("sentiment split of an empty set");
  if (positives > total) throw ArgumentError("more positives than items");
  const double pos = 100.0 * static_cast<double>(positives) /
                     static_cast<double>(total);
  return {pos, 100.0 - pos};
}

inline SentimentSplit sentiment_split(std::span<const SentimentLabel> labels) {
  std::size_t pos = 0;
  for (auto l : labels) pos += l == SentimentLabel::kPositive;
  return split_from_counts(pos, labels.size());
}

inline std::vector<SentimentLabel> label_all(
    std::span<const std::string> texts, const SentimentClassifier& classifier) {
  std::vector<SentimentLabel> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(classifier.classify(t).label);
  return out;
}

inline SentimentSplit sentiment_split(std::span<const std::string> texts,
                                      const SentimentClassifier& classifier) {
  if (texts.empty()) throw ArgumentError("sentiment split of an empty set");
  auto labels = label_all(texts, classifier);
  return sentiment_split(labels);
}

inline SentimentSplit sentiment_split(std::span<const TextStars> records,
                                      const SentimentClassifier& classifier) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(r.first);
  return sentiment_split(texts, classifier);
}

/// Euclidean distance between two splits, in percentage points.
inline double l2_distance(const SentimentSplit& a, const SentimentSplit& b) {
  const double dp = a.pos_pct - b.pos_pct, dn = a.neg_pct - b.neg_pct;
  return std::sqrt(dp * dp + dn * dn);
}

struct BaselineReport {
  std::size_t sample_size = 0;
  std::size_t repeats = 0;
  SentimentSplit mean_split;
  double l2_error = 0.0;   // mean over repeats of each draw's distance
  double l2_stddev = 0.0;  // spread of the per-draw distances
  std::uint64_t seed = 0;
};

/// Mean distance between the split of `sample_size` random items and
/// `reference`, over `repeats` draws. Draw r uses child_seed(seed, r).
inline BaselineReport l2_resample_error(
    std::span<const SentimentLabel> population, const SentimentSplit& reference,
    std::size_t sample_size, std::size_t repeats, bool without_replacement,
    std::uint64_t seed, std::size_t threads = 1) {
  if (repeats < 1) throw ArgumentError("l2: repeats must be >= 1");
  if (sample_size < 1) throw ArgumentError("l2: sample size must be >= 1");
  if (population.empty()) throw ArgumentError("l2: empty population");
  if (without_replacement && sample_size > population.size())
    throw ArgumentError("l2: sample size " + std::to_string(sample_size) +
                        " exceeds population " +
                        std::to_string(population.size()));
  std::vector<double> dist(repeats), pos(repeats);
  parallel_for(repeats, threads, [&](std::size_t r) {
    Rng rng(child_seed(seed, r));
    std::size_t positives = 0;
    if (without_replacement) {
      for (auto i : sample_indices(population.size(), sample_size, rng))
        positives += population[i] == SentimentLabel::kPositive;
    } else {
      for (std::size_t k = 0; k < sample_size; ++k)
        positives += population[rng.below(population.size())] ==
                     SentimentLabel::kPositive;
    }
    auto s = split_from_counts(positives, sample_size);
    dist[r] = l2_distance(s, reference);
    pos[r] = s.pos_pct;
  });
  BaselineReport rep;
  rep.sample_size = sample_size;
  rep.repeats = repeats;
  rep.seed = seed;
  double sum_d = 0, sum_p = 0;
  for (std::size_t r = 0; r < repeats; ++r) {
    sum_d += dist[r];
    sum_p += pos[r];
  }
  const double n = static_cast<double>(repeats);
  rep.l2_error = sum_d / n;
  rep.mean_split.pos_pct = sum_p / n;
  rep.mean_split.neg_pct = 100.0 - rep.mean_split.pos_pct;
  double ss = 0;
  for (double d : dist) ss += (d - rep.l2_error) * (d - rep.l2_error);
  rep.l2_stddev = repeats > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return rep;
}

/// A population of `positives` POSITIVE labels followed by NEGATIVE ones.
inline std::vector<SentimentLabel> label_population(std::size_t positives,
                                                    std::size_t total) {
  if (positives > total) throw ArgumentError("more positives than items");
  std::vector<SentimentLabel> out(total, SentimentLabel::kNegative);
  for (std::size_t i = 0; i < positives; ++i) out[i] = SentimentLabel::kPositive;
  return out;
}

}  // namespace lmpoll

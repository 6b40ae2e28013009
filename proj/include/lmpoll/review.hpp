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

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

using Stars = int;

inline bool valid_stars(std::int64_t s) { return s >= 1 && s <= 5; }

/// One ground-truth review.
struct Review {
  std::string review_id;
  std::string business_id;
  std::string text;
  Stars stars = 0;
  std::int64_t useful_votes = 0;
  std::int64_t funny_votes = 0;
  std::int64_t cool_votes = 0;
  std::set<std::string> categories;

  friend bool operator==(const Review&, const Review&) = default;
};

/// Returns an empty string when `r` satisfies every Review invariant,
/// otherwise a short description of the first violation.
inline std::string review_violation(const Review& r) {
  if (!valid_stars(r.stars)) return "stars out of range";
  if (r.useful_votes < 0 || r.funny_votes < 0 || r.cool_votes < 0)
    return "negative vote count";
  if (text::trim(r.text).empty()) return "empty text";
  return {};
}

/// Ordered, immutable collection of reviews with unique ids.
class ReviewSet {
 public:
  ReviewSet() = default;
  ReviewSet(std::vector<Review> reviews, std::string provenance)
      : reviews_(std::move(reviews)), provenance_(std::move(provenance)) {
    std::unordered_set<std::string> seen;
    seen.reserve(reviews_.size());
    for (const auto& r : reviews_) {
      if (auto why = review_violation(r); !why.empty())
        throw DataError("review " + r.review_id + ": " + why);
      if (!seen.insert(r.review_id).second)
        throw DataError("duplicate review_id " + r.review_id);
    }
  }

  const std::vector<Review>& reviews() const { return reviews_; }
  const std::string& provenance() const { return provenance_; }
  std::size_t size() const { return reviews_.size(); }
  bool empty() const { return reviews_.empty(); }
  const Review& operator[](std::size_t i) const { return reviews_[i]; }
  auto begin() const { return reviews_.begin(); }
  auto end() const { return reviews_.end(); }

 private:
  std::vector<Review> reviews_;
  std::string provenance_;
};

/// One review as a line of the ReviewSet file format. Field order is fixed
/// with the text last.
inline std::string serialize_review(const Review& r) {
  nlohmann::ordered_json j;
  j["review_id"] = r.review_id;
  j["business_id"] = r.business_id;
  j["stars"] = r.stars;
  j["useful"] = r.useful_votes;
  j["funny"] = r.funny_votes;
  j["cool"] = r.cool_votes;
  j["text"] = r.text;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline void write_review_set(const ReviewSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& r : set) out << serialize_review(r) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline ReviewSet read_review_set(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Review> reviews;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      Review r;
      r.review_id = j.at("review_id").get<std::string>();
      r.business_id = j.at("business_id").get<std::string>();
      r.stars = j.at("stars").get<int>();
      r.useful_votes = j.at("useful").get<std::int64_t>();
      r.funny_votes = j.at("funny").get<std::int64_t>();
      r.cool_votes = j.at("cool").get<std::int64_t>();
      r.text = j.at("text").get<std::string>();
      if (auto why = review_violation(r); !why.empty())
        throw DataError(where + why);
      reviews.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    }
  }
  return ReviewSet(std::move(reviews), path);
}

}  // namespace lmpoll

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

#include <string>
#include <vector>

// Small demonstration word lists. The positive and negative lists double as
// the sentiment lexicons and as the content vocabulary of synthesized
// populations; the filler list is sentiment-neutral.
namespace lmpoll::builtin {

inline const std::vector<std::string>& positive_words() {
  static const std::vector<std::string> words = {
      "good",      "great",     "happy",      "pretty",     "excellent",
      "amazing",   "delicious", "friendly",   "fresh",      "perfect",
      "wonderful", "tasty",     "awesome",    "fantastic",  "love",
      "loved",     "lovely",    "nice",       "best",       "favorite",
      "helpful",   "clean",     "cozy",       "enjoyed",    "recommend",
      "superb",    "yummy",     "outstanding","attentive",  "generous",
      "pleasant",  "welcoming", "flavorful",  "crispy",     "impressed",
      "adorable",  "charming",  "delightful", "gorgeous",   "glad",
      "reasonable","quick",     "polite",     "beautiful",  "satisfied",
      "incredible","brilliant", "worth",      "warm",       "fun"};
  return words;
}

inline const std::vector<std::string>& negative_words() {
  static const std::vector<std::string> words = {
      "bad",       "terrible",  "awful",      "horrible",   "worst",
      "hate",      "worthless", "enemy",      "rude",       "dirty",
      "cold",      "bland",     "stale",      "slow",       "overpriced",
      "disgusting","gross",     "greasy",     "soggy",      "burnt",
      "mediocre",  "disappointing","disappointed","poor",   "sick",
      "angry",     "annoyed",   "ignored",    "waited",     "never",
      "avoid",     "nasty",     "unfriendly", "careless",   "inedible",
      "raw",       "smelly",    "noisy",      "crowded",    "expensive",
      "lukewarm",  "tasteless", "sloppy",     "unprofessional","dreadful",
      "broken",    "sticky",    "wrong",      "refused",    "complain"};
  return words;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the",      "a",         "and",       "we",        "i",
      "food",     "place",     "service",   "staff",     "menu",
      "options",  "table",     "dinner",    "lunch",     "burger",
      "fries",    "chicken",   "steak",     "salad",     "sandwich",
      "server",   "waiter",    "bar",       "drinks",    "beer",
      "coffee",   "dessert",   "order",     "ordered",   "came",
      "was",      "were",      "is",        "it",        "this",
      "our",      "with",      "for",       "at",        "to",
      "time",     "night",     "restaurant","kitchen",   "portion",
      "price",    "downtown",  "weekend",   "family",    "friends"};
  return words;
}

// Extra prefix patterns layered on top of positive_words()/negative_words()
// by the default sentiment lexicons.
inline const std::vector<std::string>& positive_patterns() {
  static const std::vector<std::string> p = {"ador*", "delici*", "recommend*",
                                             "enjoy*"};
  return p;
}

inline const std::vector<std::string>& negative_patterns() {
  static const std::vector<std::string> p = {"disgust*", "disappoint*",
                                             "horribl*", "rude*"};
  return p;
}

}  // namespace lmpoll::builtin

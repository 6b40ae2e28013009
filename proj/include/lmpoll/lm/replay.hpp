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
#include <string_view>
#include <vector>

#include "lmpoll/corpus.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/lm/backend.hpp"
#include "lmpoll/review.hpp"
#include "lmpoll/rng.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

/// The phrase a prompt asks about: the prompt with any leading "review:"
/// wrapper removed and trimmed. Empty for "" and "review:".
inline std::string prompt_phrase(std::string_view prompt) {
  auto p = text::trim(prompt);
  constexpr std::string_view open = "review:";
  if (p.starts_with(open)) p = text::trim(p.substr(open.size()));
  return std::string(p);
}

/// A pseudo-model that emits ground-truth reviews as REVIEW_STARS lines.
/// A prompt carrying a phrase restricts draws to reviews containing it.
class ReplayBackend final : public GenerationBackend {
 public:
  enum class Mode {
    kSample,     // completion i: uniform draw (with replacement)
    kEnumerate,  // completion i: matching review i mod |pool|, in set order
  };

  explicit ReplayBackend(ReviewSet set, Mode mode = Mode::kSample)
      : set_(std::move(set)), mode_(mode) {
    if (set_.empty()) throw ArgumentError("replay: review set is empty");
  }

  std::vector<std::string> generate(
      const GenerationRequest& request) const override {
    validate(request);
    const std::string phrase = prompt_phrase(request.prompt);
    std::vector<const Review*> pool;
    for (const auto& r : set_)
      if (phrase.empty() || text::icontains(r.text, phrase)) pool.push_back(&r);
    if (pool.empty()) throw BackendError("replay: no matching reviews");
    std::vector<std::string> out;
    out.reserve(request.n);
    for (std::size_t i = 0; i < request.n; ++i) {
      std::size_t pick = i % pool.size();
      if (mode_ == Mode::kSample) {
        Rng rng(child_seed(request.seed, i));
        pick = rng.below(pool.size());
      }
      out.push_back(review_line(*pool[pick]));
    }
    return out;
  }

  std::string name() const override {
    return mode_ == Mode::kSample ? "replay" : "replay(enumerate)";
  }
  CompletionMode mode() const override { return CompletionMode::kFullRecord; }

 private:
  ReviewSet set_;
  Mode mode_;
};

}  // namespace lmpoll

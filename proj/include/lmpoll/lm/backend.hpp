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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lmpoll/error.hpp"

namespace lmpoll {

inline constexpr std::size_t kDefaultMaxTokens = 256;
inline constexpr double kDefaultTemperature = 1.0;

struct GenerationRequest {
  std::string prompt;
  std::size_t n = 1;
  std::size_t max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;
  std::uint64_t seed = 0;
};

inline void validate(const GenerationRequest& r) {
  if (r.n < 1) throw ArgumentError("generation: n must be >= 1");
  if (r.max_tokens < 1) throw ArgumentError("generation: max_tokens must be >= 1");
  if (!(r.temperature >= 0.0) || !std::isfinite(r.temperature))
    throw ArgumentError("generation: temperature must be >= 0");
}

/// What a backend's strings contain relative to the prompt.
enum class CompletionMode {
  kContinuation,  // text following the prompt
  kFullRecord,    // a complete record; the prompt is not repeated
};

/// Every text generator satisfies this: exactly `n` strings or an exception,
/// deterministic for a fixed request and backend state.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::vector<std::string> generate(
      const GenerationRequest& request) const = 0;
  virtual std::string name() const = 0;
  virtual CompletionMode mode() const { return CompletionMode::kContinuation; }
};

}  // namespace lmpoll

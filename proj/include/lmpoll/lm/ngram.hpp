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
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lmpoll/corpus.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/lm/backend.hpp"
#include "lmpoll/parallel.hpp"
#include "lmpoll/rng.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

using TokenId = std::uint32_t;

/// Word n-gram model over whitespace tokens with additive smoothing and
/// backoff to the longest context seen in training.
///
/// Each training line is padded with order-1 <BOS> tokens and closed with
/// <EOL>. Counts are kept for every context length 0..order-1, so a context
/// unseen at full length falls back to its longest seen suffix, down to the
/// unigram table. At the chosen context the next-token distribution is
///
///   p(t | ctx) = (count(ctx, t) + alpha) / (total(ctx) + alpha * |V|)
///
/// where V is every token except <BOS>. The model is immutable once built.
class NgramModel {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr TokenId kEol = 1;
  static constexpr TokenId kUnknown = 0xFFFFFFFFu;
  static constexpr int kMaxOrder = 8;
  static constexpr double kBackoffMultiplier = 0.4;

  /// Successor counts of one context.
  struct Row {
    std::span<const TokenId> tokens;  // ascending ids
    std::span<const std::uint32_t> counts;
    std::uint64_t total = 0;
    int context_length = 0;
  };

  static NgramModel train(const std::vector<std::string>& lines, int order,
                          double alpha, std::string source = {}) {
    if (lines.empty()) throw ArgumentError("train_ngram: corpus is empty");
    check_params(order, alpha);
    NgramModel m(order, alpha, std::move(source));
    std::vector<Gram> grams;
    for (const auto& line : lines) {
      std::vector<TokenId> seq(static_cast<std::size_t>(order - 1), kBos);
      for (auto tok : text::split_whitespace(line)) seq.push_back(m.intern(tok));
      seq.push_back(kEol);
      for (std::size_t p = static_cast<std::size_t>(order - 1); p < seq.size();
           ++p) {
        Gram g{};
        for (int k = 0; k < order; ++k)
          g.ids[k] = seq[p + 1 - static_cast<std::size_t>(order - k)];
        g.count = 1;
        grams.push_back(g);
      }
    }
    m.build(std::move(grams));
    return m;
  }

  static NgramModel train(const Corpus& corpus, int order, double alpha) {
    return train(corpus.lines, order, alpha, corpus.source);
  }

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  const std::string& source() const { return source_; }

  /// Number of tokens including <BOS>.
  std::size_t vocabulary_size() const { return tokens_.size(); }
  /// |V| of the smoothing formula: every token except <BOS>.
  std::size_t support_size() const { return tokens_.size() - 1; }

  const std::string& token(TokenId id) const { return tokens_.at(id); }

  TokenId lookup(std::string_view tok) const {
    auto it = ids_.find(std::string(tok));
    return it == ids_.end() ? kUnknown : it->second;
  }

  /// Counts for exactly this context, or a row with total 0 if unseen.
  Row row(std::span<const TokenId> context) const {
    const auto len = context.size();
    if (len >= levels_.size()) return {};
    const Level& lv = levels_[len];
    std::size_t lo = 0, hi = lv.totals.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto c = lv.context(mid);
      if (std::lexicographical_compare(c.begin(), c.end(), context.begin(),
                                       context.end()))
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo == lv.totals.size()) return {};
    auto c = lv.context(lo);
    if (!std::equal(c.begin(), c.end(), context.begin(), context.end()))
      return {};
    Row r;
    const auto b = lv.offsets[lo], e = lv.offsets[lo + 1];
    r.tokens = std::span<const TokenId>(lv.succ_tokens).subspan(b, e - b);
    r.counts = std::span<const std::uint32_t>(lv.succ_counts).subspan(b, e - b);
    r.total = lv.totals[lo];
    r.context_length = static_cast<int>(len);
    return r;
  }

  /// Row of the longest suffix of `history` (at most order-1 tokens) that
  /// was seen in training.
  Row backoff_row(std::span<const TokenId> history) const {
    std::size_t len = std::min<std::size_t>(history.size(),
                                            static_cast<std::size_t>(order_ - 1));
    for (;; --len) {
      Row r = row(history.subspan(history.size() - len));
      if (r.total > 0) return r;
      if (len == 0) break;
    }
    return row({});
  }

  std::uint64_t count(std::span<const TokenId> context, TokenId t) const {
    Row r = row(context);
    return count_in(r, t);
  }

  /// Smoothed probability of `t` at the backoff context of `history`.
  double probability(TokenId t, std::span<const TokenId> history) const {
    if (t == kBos || t >= tokens_.size()) return 0.0;
    Row r = backoff_row(history);
    return (static_cast<double>(count_in(r, t)) + alpha_) /
           (static_cast<double>(r.total) +
            alpha_ * static_cast<double>(support_size()));
  }

  /// Stupid-backoff score: the smoothed probability at the chosen context,
  /// scaled by 0.4 for each order dropped below the full context length.
  /// Sampling normalizes over a single context, where the factor cancels.
  double score(TokenId t, std::span<const TokenId> history) const {
    Row r = backoff_row(history);
    const int full = static_cast<int>(std::min<std::size_t>(
        history.size(), static_cast<std::size_t>(order_ - 1)));
    return std::pow(kBackoffMultiplier, full - r.context_length) *
           probability(t, history);
  }

  /// p(. | history) indexed by token id; entry kBos is 0.
  std::vector<double> distribution(std::span<const TokenId> history) const {
    std::vector<double> p(tokens_.size(), 0.0);
    for (TokenId t = 1; t < tokens_.size(); ++t) p[t] = probability(t, history);
    return p;
  }

  /// Context for generation: order-1 <BOS> followed by the prompt tokens.
  std::vector<TokenId> prompt_history(std::string_view prompt) const {
    std::vector<TokenId> h(static_cast<std::size_t>(order_ - 1), kBos);
    for (auto tok : text::split_whitespace(prompt)) h.push_back(lookup(tok));
    return h;
  }

  /// Draws the next token after `history`. temperature 0 is argmax with ties
  /// going to the lexicographically smallest token.
  TokenId next_token(std::span<const TokenId> history, double temperature,
                     Rng& rng) const {
    Row r = backoff_row(history);
    const std::size_t k = r.tokens.size();
    const std::size_t unseen = support_size() - k;

    if (temperature == 0.0) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < k; ++i) {
        if (r.counts[i] > r.counts[best] ||
            (r.counts[i] == r.counts[best] &&
             tokens_[r.tokens[i]] < tokens_[r.tokens[best]]))
          best = i;
      }
      return r.tokens[best];
    }

    std::vector<double> w(k);
    double unseen_w = 0.0;
    if (temperature == 1.0) {
      for (std::size_t i = 0; i < k; ++i) w[i] = r.counts[i] + alpha_;
      unseen_w = alpha_;
    } else {
      // Reweight p^(1/T) in log space relative to the largest weight.
      std::uint32_t cmax = *std::max_element(r.counts.begin(), r.counts.end());
      const double top = std::log(cmax + alpha_);
      for (std::size_t i = 0; i < k; ++i)
        w[i] = std::exp((std::log(r.counts[i] + alpha_) - top) / temperature);
      unseen_w = alpha_ > 0.0 ? std::exp((std::log(alpha_) - top) / temperature)
                              : 0.0;
    }
    double total = unseen_w * static_cast<double>(unseen);
    for (double x : w) total += x;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i < k; ++i) {
      if (u < w[i]) return r.tokens[i];
      u -= w[i];
    }
    if (unseen == 0) return r.tokens[k - 1];
    // The r-th token id (skipping <BOS>) absent from this row.
    TokenId cand = 1 + static_cast<TokenId>(rng.below(unseen));
    for (TokenId seen : r.tokens) {
      if (seen <= cand)
        ++cand;
      else
        break;
    }
    return cand;
  }

  /// One completion: generated tokens joined with a leading space each,
  /// stopping at <EOL> (not emitted) or after max_tokens tokens.
  std::string complete(std::string_view prompt, std::size_t max_tokens,
                       double temperature, Rng& rng) const {
    auto history = prompt_history(prompt);
    std::string out;
    for (std::size_t step = 0; step < max_tokens; ++step) {
      TokenId t = next_token(history, temperature, rng);
      if (t == kEol) break;
      out += ' ';
      out += tokens_[t];
      history.push_back(t);
    }
    return out;
  }

  /// Completion i is drawn from its own generator seeded with
  /// child_seed(request.seed, i), so output does not depend on `threads`.
  std::vector<std::string> sample(const GenerationRequest& request,
                                  std::size_t threads = 1) const {
    validate(request);
    std::vector<std::string> out(request.n);
    parallel_for(request.n, threads, [&](std::size_t i) {
      Rng rng(child_seed(request.seed, i));
      out[i] = complete(request.prompt, request.max_tokens,
                        request.temperature, rng);
    });
    return out;
  }

  void save(std::ostream& os) const {
    os << "lmpoll-ngram 1\n";
    os << "order " << order_ << '\n';
    os << "alpha " << text::exact(alpha_) << '\n';
    os << "source " << text::collapse_newlines(source_) << '\n';
    os << "vocab " << tokens_.size() << '\n';
    for (const auto& t : tokens_) os << t << '\n';
    const Level& top = levels_.back();
    os << "grams " << top.succ_tokens.size() << '\n';
    for (std::size_t c = 0; c < top.totals.size(); ++c) {
      auto ctx = top.context(c);
      for (std::uint32_t i = top.offsets[c]; i < top.offsets[c + 1]; ++i) {
        for (auto id : ctx) os << id << ' ';
        os << top.succ_tokens[i] << ' ' << top.succ_counts[i] << '\n';
      }
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    save(out);
    if (!out) throw IoError("write failed: " + path);
  }

  static NgramModel load(std::istream& is, const std::string& what = "model") {
    try {
      return load_unchecked(is, what);
    } catch (const std::logic_error&) {
      throw DataError(what + ": malformed model file");
    }
  }

  static NgramModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return load(in, path);
  }

 private:
  static NgramModel load_unchecked(std::istream& is, const std::string& what) {
    auto fail = [&](const std::string& why) -> DataError {
      return DataError(what + ": " + why);
    };
    std::string line;
    if (!std::getline(is, line) || line != "lmpoll-ngram 1")
      throw fail("not an n-gram model file");
    auto field = [&](std::string_view key) {
      if (!std::getline(is, line) || !line.starts_with(std::string(key) + " "))
        throw fail("expected " + std::string(key));
      return line.substr(key.size() + 1);
    };
    const int order = std::stoi(field("order"));
    const double alpha = std::stod(field("alpha"));
    std::string source = field("source");
    try {
      check_params(order, alpha);
    } catch (const ArgumentError& e) {
      throw fail(e.what());
    }
    NgramModel m(order, alpha, std::move(source));
    std::size_t vocab = std::stoull(field("vocab"));
    if (vocab < 2) throw fail("vocabulary too small");
    m.tokens_.clear();
    m.ids_.clear();
    for (std::size_t i = 0; i < vocab; ++i) {
      if (!std::getline(is, line)) throw fail("truncated vocabulary");
      m.tokens_.push_back(line);
      if (i >= 2) m.ids_.emplace(line, static_cast<TokenId>(i));
    }
    std::size_t n = std::stoull(field("grams"));
    std::vector<Gram> grams(n);
    for (auto& g : grams) {
      for (int k = 0; k < order; ++k) {
        if (!(is >> g.ids[k]) || g.ids[k] >= vocab) throw fail("bad gram");
      }
      if (!(is >> g.count) || g.count == 0) throw fail("bad gram count");
    }
    if (grams.empty()) throw fail("no grams");
    m.build(std::move(grams));
    return m;
  }

  struct Gram {
    std::array<TokenId, kMaxOrder> ids{};  // context..., target
    std::uint32_t count = 0;
  };

  struct Level {
    std::size_t len = 0;
    std::vector<TokenId> ctx_ids;  // len ids per context, sorted
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint64_t> totals;
    std::vector<TokenId> succ_tokens;
    std::vector<std::uint32_t> succ_counts;

    std::span<const TokenId> context(std::size_t c) const {
      return std::span<const TokenId>(ctx_ids).subspan(c * len, len);
    }
  };

  NgramModel(int order, double alpha, std::string source)
      : order_(order), alpha_(alpha), source_(std::move(source)) {
    tokens_ = {"<BOS>", "<EOL>"};
  }

  static void check_params(int order, double alpha) {
    if (order < 2 || order > kMaxOrder)
      throw ArgumentError("n-gram order must lie in 2.." +
                          std::to_string(kMaxOrder));
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw ArgumentError("smoothing alpha must be >= 0");
  }

  static std::uint64_t count_in(const Row& r, TokenId t) {
    auto it = std::lower_bound(r.tokens.begin(), r.tokens.end(), t);
    if (it == r.tokens.end() || *it != t) return 0;
    return r.counts[static_cast<std::size_t>(it - r.tokens.begin())];
  }

  TokenId intern(std::string_view tok) {
    auto [it, inserted] =
        ids_.try_emplace(std::string(tok), static_cast<TokenId>(tokens_.size()));
    if (inserted) tokens_.emplace_back(tok);
    return it->second;
  }

  // Builds every context level from full-order grams.
  void build(std::vector<Gram> grams) {
    levels_.assign(static_cast<std::size_t>(order_), Level{});
    const auto ord = static_cast<std::size_t>(order_);
    for (std::size_t len = 0; len < ord; ++len) {
      // Project onto the last `len` context ids plus the target.
      std::vector<Gram> proj(grams.size());
      for (std::size_t i = 0; i < grams.size(); ++i) {
        Gram p{};
        for (std::size_t k = 0; k <= len; ++k)
          p.ids[k] = grams[i].ids[ord - 1 - len + k];
        p.count = grams[i].count;
        proj[i] = p;
      }
      std::sort(proj.begin(), proj.end(), [&](const Gram& a, const Gram& b) {
        return std::lexicographical_compare(a.ids.begin(),
                                            a.ids.begin() + len + 1,
                                            b.ids.begin(),
                                            b.ids.begin() + len + 1);
      });
      Level& lv = levels_[len];
      lv.len = len;
      for (std::size_t i = 0; i < proj.size();) {
        // One context group.
        std::size_t j = i;
        std::uint64_t total = 0;
        while (j < proj.size() &&
               std::equal(proj[i].ids.begin(), proj[i].ids.begin() + len,
                          proj[j].ids.begin())) {
          // One successor within the group.
          std::size_t k = j;
          std::uint64_t c = 0;
          while (k < proj.size() &&
                 std::equal(proj[j].ids.begin(), proj[j].ids.begin() + len + 1,
                            proj[k].ids.begin())) {
            c += proj[k].count;
            ++k;
          }
          if (c > 0xFFFFFFFFu) throw DataError("n-gram count overflow");
          lv.succ_tokens.push_back(proj[j].ids[len]);
          lv.succ_counts.push_back(static_cast<std::uint32_t>(c));
          total += c;
          j = k;
        }
        lv.ctx_ids.insert(lv.ctx_ids.end(), proj[i].ids.begin(),
                          proj[i].ids.begin() + len);
        lv.totals.push_back(total);
        lv.offsets.push_back(static_cast<std::uint32_t>(lv.succ_tokens.size()));
        i = j;
      }
    }
  }

  int order_;
  double alpha_;
  std::string source_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<Level> levels_;
};

/// GenerationBackend over a trained n-gram model.
class NgramBackend final : public GenerationBackend {
 public:
  explicit NgramBackend(std::shared_ptr<const NgramModel> model,
                        std::size_t threads = 1)
      : model_(std::move(model)), threads_(threads) {
    if (!model_) throw ArgumentError("NgramBackend: null model");
  }

  std::vector<std::string> generate(
      const GenerationRequest& request) const override {
    return model_->sample(request, threads_);
  }

  std::string name() const override {
    return "ngram(order=" + std::to_string(model_->order()) +
           ",alpha=" + text::exact(model_->alpha()) + ")";
  }

  const NgramModel& model() const { return *model_; }

 private:
  std::shared_ptr<const NgramModel> model_;
  std::size_t threads_;
};

}  // namespace lmpoll

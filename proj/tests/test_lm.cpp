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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "lmpoll/lm/ngram.hpp"
#include "lmpoll/lm/replay.hpp"
#include "lmpoll/stats.hpp"
#include "oracles.hpp"

using namespace lmpoll;

namespace {

using Ids = std::vector<TokenId>;

GenerationRequest req(std::string prompt, std::size_t n, double t, std::uint64_t seed,
                      std::size_t max_tokens = kDefaultMaxTokens) {
  GenerationRequest r;
  r.prompt = std::move(prompt);
  r.n = n;
  r.temperature = t;
  r.seed = seed;
  r.max_tokens = max_tokens;
  return r;
}

NgramModel abc_model(double alpha = 0.0) {
  return NgramModel::train({"a b", "a b", "a b", "a c"}, 2, alpha);
}

}  // namespace

TEST(Ngram, CountsSingleLine) {
  auto m = NgramModel::train({"a b"}, 2, 0.0);
  const TokenId a = m.lookup("a"), b = m.lookup("b");
  EXPECT_EQ(m.count(Ids{NgramModel::kBos}, a), 1u);
  EXPECT_EQ(m.count(Ids{a}, b), 1u);
  EXPECT_EQ(m.count(Ids{b}, NgramModel::kEol), 1u);
  EXPECT_EQ(m.count(Ids{a}, a), 0u);
  auto twice = NgramModel::train({"a b", "a b"}, 2, 0.0);
  EXPECT_EQ(twice.count(Ids{twice.lookup("a")}, twice.lookup("b")), 2u);
  EXPECT_EQ(twice.count(Ids{twice.lookup("b")}, NgramModel::kEol), 2u);
}

TEST(Ngram, TokensAreWhitespaceChunks) {
  auto m = NgramModel::train({"review: ok, stars: 5.0 --"}, 3, 0.0);
  EXPECT_NE(m.lookup("ok,"), NgramModel::kUnknown);
  EXPECT_NE(m.lookup("--"), NgramModel::kUnknown);
  EXPECT_EQ(m.lookup("ok"), NgramModel::kUnknown);
  EXPECT_EQ(m.vocabulary_size(), 2u + 5u);
}

TEST(Ngram, ArgmaxOnSinglePath) {
  auto m = NgramModel::train({"review: ok, stars: 5.0 --"}, 5, 0.001);
  NgramBackend be(std::make_shared<const NgramModel>(m));
  auto out = be.generate(req("review:", 2, 0.0, 1));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], " ok, stars: 5.0 --");
  EXPECT_EQ(out[1], out[0]);
  EXPECT_EQ(be.mode(), CompletionMode::kContinuation);
}

TEST(Ngram, ArgmaxTieGoesToSmallestToken) {
  auto m = NgramModel::train({"a z", "a y"}, 2, 0.0);
  Rng rng(1);
  EXPECT_EQ(m.token(m.next_token(m.prompt_history("a"), 0.0, rng)), "y");
}

TEST(Ngram, SampledFrequencyMatchesCounts) {
  auto m = abc_model();
  auto out = m.sample(req("a", 100000, 1.0, 42, 1));
  std::vector<std::string> v(out.begin(), out.end());
  auto f = oracle::frequencies(v);
  EXPECT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[" b"] / 100000.0, 0.75, 0.01);
}

TEST(Ngram, TemperatureReweights) {
  auto m = abc_model();
  auto out = m.sample(req("a", 100000, 2.0, 43, 1));
  std::size_t b = std::count(out.begin(), out.end(), " b");
  const double expect = std::sqrt(3.0) / (1.0 + std::sqrt(3.0));
  EXPECT_NEAR(b / 100000.0, expect, 0.01);
  auto cold = m.sample(req("a", 20000, 0.25, 44, 1));
  std::size_t bc = std::count(cold.begin(), cold.end(), " b");
  EXPECT_NEAR(bc / 20000.0, 81.0 / 82.0, 0.01);
}

TEST(Ngram, SmallTemperatureConvergesToArgmax) {
  auto m = NgramModel::train({"x y z w", "x y z w", "x q"}, 3, 0.0);
  auto argmax = m.sample(req("x", 5, 0.0, 1));
  auto tiny = m.sample(req("x", 5, 1e-6, 99));
  EXPECT_EQ(argmax, tiny);
  EXPECT_EQ(argmax[0], " y z w");
}

TEST(Ngram, RowsNormalize) {
  auto m = NgramModel::train({"a b c", "a c b a", "b b", "c a b c d"}, 3, 0.01);
  const TokenId a = m.lookup("a"), b = m.lookup("b"), d = m.lookup("d");
  for (const Ids& h : {Ids{}, Ids{NgramModel::kBos, NgramModel::kBos}, Ids{a},
                       Ids{a, b}, Ids{d, d}, Ids{NgramModel::kUnknown, a}, Ids{b, a, b}}) {
    auto p = m.distribution(h);
    EXPECT_EQ(p[NgramModel::kBos], 0.0);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
  }
  auto z = abc_model(0.0).distribution(Ids{});
  EXPECT_NEAR(std::accumulate(z.begin(), z.end(), 0.0), 1.0, 1e-9);
}

TEST(Ngram, SmoothingFormula) {
  auto m = abc_model(0.5);
  const TokenId a = m.lookup("a"), b = m.lookup("b"), c = m.lookup("c");
  const double V = 4;  // a b c <EOL>
  EXPECT_EQ(m.support_size(), 4u);
  EXPECT_DOUBLE_EQ(m.probability(b, Ids{a}), (3 + 0.5) / (4 + 0.5 * V));
  EXPECT_DOUBLE_EQ(m.probability(c, Ids{a}), (1 + 0.5) / (4 + 0.5 * V));
  EXPECT_DOUBLE_EQ(m.probability(a, Ids{a}), 0.5 / (4 + 0.5 * V));
}

TEST(Ngram, BacksOffToLongestSeenSuffix) {
  auto m = NgramModel::train({"p q r", "s q t"}, 3, 0.0);
  const TokenId q = m.lookup("q"), r = m.lookup("r"), t = m.lookup("t");
  // (unknown, q) is unseen; the suffix (q) has r and t once each.
  Ids h{NgramModel::kUnknown, q};
  EXPECT_EQ(m.backoff_row(h).context_length, 1);
  EXPECT_DOUBLE_EQ(m.probability(r, h), 0.5);
  EXPECT_DOUBLE_EQ(m.probability(t, h), 0.5);
  EXPECT_DOUBLE_EQ(m.score(r, h), 0.4 * 0.5);
  EXPECT_DOUBLE_EQ(m.score(r, Ids{m.lookup("p"), q}), 1.0);
  auto out = m.sample(req("zzz q", 200, 1.0, 5, 1));
  for (const auto& s : out) EXPECT_TRUE(s == " r" || s == " t") << s;
}

TEST(Ngram, UnseenTokensDrawnWithSmoothing) {
  auto m = NgramModel::train({"a b", "c d"}, 2, 1.0);
  // After "a": b has count 1, the other 4 supported tokens count 0.
  auto out = m.sample(req("a", 60000, 1.0, 8, 1));
  std::vector<std::string> v(out.begin(), out.end());
  auto f = oracle::frequencies(v);
  EXPECT_NEAR(f[" b"] / 60000.0, 2.0 / 6.0, 0.01);
  EXPECT_NEAR(f[""] / 60000.0, 1.0 / 6.0, 0.01);  // <EOL>
  EXPECT_NEAR(f[" a"] / 60000.0, 1.0 / 6.0, 0.01);
  EXPECT_EQ(f.count(" <BOS>"), 0u);
}

TEST(Ngram, MemorizesShortLines) {
  const std::vector<std::string> lines{"alpha beta gamma", "delta beta", "eps",
                                       "zeta gamma beta", "eta eta eta"};
  auto m = NgramModel::train(lines, 4, 0.001);
  for (const auto& l : lines) {
    const auto first = std::string(text::split_whitespace(l)[0]);
    auto out = m.sample(req(first, 1, 0.0, 3));
    EXPECT_EQ(first + out[0], l);
  }
}

TEST(Ngram, MaxTokensTruncates) {
  auto m = NgramModel::train({"a a a a a a a a a a"}, 2, 0.0);
  auto out = m.sample(req("", 3, 1.0, 1, 4));
  for (const auto& s : out) EXPECT_EQ(text::split_whitespace(s).size(), 4u);
}

TEST(Ngram, DeterministicAcrossThreads) {
  auto m = NgramModel::train({"a b c", "a c b", "b a", "c c c a"}, 3, 0.1);
  auto r = req("a", 500, 1.0, 77, 10);
  EXPECT_EQ(m.sample(r, 1), m.sample(r, 4));
  EXPECT_EQ(m.sample(r, 1), m.sample(r, 1));
  auto r2 = r;
  r2.seed = 78;
  EXPECT_NE(m.sample(r, 1), m.sample(r2, 1));
}

TEST(Ngram, CompletionUsesChildSeed) {
  auto m = NgramModel::train({"a b c", "a c b", "b a", "c c c a"}, 3, 0.1);
  auto all = m.sample(req("a", 10, 1.0, 5, 10));
  for (std::size_t i = 0; i < all.size(); ++i) {
    Rng rng(child_seed(5, i));
    EXPECT_EQ(all[i], m.complete("a", 10, 1.0, rng));
  }
}

TEST(Ngram, RejectsBadInput) {
  EXPECT_THROW(NgramModel::train(std::vector<std::string>{}, 2, 0.0), ArgumentError);
  EXPECT_THROW(NgramModel::train({"a"}, 1, 0.0), ArgumentError);
  EXPECT_THROW(NgramModel::train({"a"}, 2, -1.0), ArgumentError);
  auto m = abc_model();
  EXPECT_THROW(m.sample(req("a", 0, 1.0, 1)), ArgumentError);
  EXPECT_THROW(m.sample(req("a", 1, -0.5, 1)), ArgumentError);
  EXPECT_THROW(m.sample(req("a", 1, 1.0, 1, 0)), ArgumentError);
}

TEST(Ngram, SaveLoadRoundTrip) {
  auto m = NgramModel::train({"review: ok, stars: 5.0 --", "review: bad, stars: 1.0 --",
                              "x y"},
                             4, 0.002, "unit fixture");
  std::stringstream ss;
  m.save(ss);
  auto back = NgramModel::load(ss);
  EXPECT_EQ(back.order(), 4);
  EXPECT_EQ(back.alpha(), 0.002);
  EXPECT_EQ(back.source(), "unit fixture");
  auto r = req("review:", 200, 1.0, 3, 20);
  EXPECT_EQ(m.sample(r), back.sample(r));
  std::stringstream again;
  back.save(again);
  std::stringstream orig;
  m.save(orig);
  EXPECT_EQ(again.str(), orig.str());
}

TEST(Ngram, LoadRejectsGarbage) {
  for (const char* bad : {"", "hello\n", "lmpoll-ngram 1\norder x\n",
                          "lmpoll-ngram 1\norder 2\nalpha 0\nsource s\nvocab 3\n<BOS>\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(NgramModel::load(ss), DataError) << bad;
  }
}

// ------------------------------------------------------------------ replay

namespace {

ReviewSet replay_set() {
  std::vector<Review> v;
  const char* texts[] = {"no vegetarian options at all", "great steak", "Some Vegetarian options",
                         "bad service", "fine"};
  for (int i = 0; i < 5; ++i) {
    Review r;
    r.review_id = std::to_string(i);
    r.business_id = "b";
    r.text = texts[i];
    r.stars = i + 1;
    v.push_back(r);
  }
  return ReviewSet(v, "replay fixture");
}

}  // namespace

TEST(Replay, EmitsWellFormedRecords) {
  ReplayBackend be(replay_set());
  auto out = be.generate(req("review:", 100, 1.0, 1));
  ASSERT_EQ(out.size(), 100u);
  std::string stream;
  for (const auto& s : out) stream += s + "\n";
  EXPECT_EQ(parse_stream(stream, CorpusFormat::kReviewStars).malformed, 0u);
  EXPECT_EQ(be.mode(), CompletionMode::kFullRecord);
  EXPECT_EQ(be.generate(req("", 100, 1.0, 1)), out);
}

TEST(Replay, PhrasePromptRestrictsPool) {
  ReplayBackend be(replay_set());
  for (const auto& s : be.generate(req("no vegetarian options", 50, 1.0, 2)))
    EXPECT_EQ(s, "review: no vegetarian options at all, stars: 1.0 --");
  for (const auto& s : be.generate(req("review: vegetarian options", 50, 1.0, 2)))
    EXPECT_TRUE(text::icontains(s, "vegetarian options"));
  EXPECT_THROW(be.generate(req("many vegetarian options", 1, 1.0, 2)), BackendError);
  try {
    be.generate(req("tofu", 1, 1.0, 2));
  } catch (const BackendError& e) {
    EXPECT_NE(std::string(e.what()).find("no matching reviews"), std::string::npos);
  }
}

TEST(Replay, EnumerateReproducesSource) {
  auto set = replay_set();
  ReplayBackend be(set, ReplayBackend::Mode::kEnumerate);
  auto out = be.generate(req("", set.size(), 1.0, 0));
  std::string stream;
  for (const auto& s : out) stream += s + "\n";
  auto h = star_histogram(usable_pairs(parse_stream(stream, CorpusFormat::kReviewStars)));
  EXPECT_EQ(h.counts, star_histogram(set).counts);
}

TEST(Replay, SampledHistogramConverges) {
  std::vector<Review> v;
  const int per[] = {10, 5, 8, 20, 40};
  for (int s = 0; s < 5; ++s)
    for (int i = 0; i < per[s]; ++i) {
      Review r;
      r.review_id = std::to_string(v.size());
      r.business_id = "b";
      r.text = "t";
      r.stars = s + 1;
      v.push_back(r);
    }
  ReviewSet set(v, "p");
  ReplayBackend be(set);
  auto out = be.generate(req("", 10000, 1.0, 9));
  std::string stream;
  for (const auto& s : out) stream += s + "\n";
  auto h = star_histogram(usable_pairs(parse_stream(stream, CorpusFormat::kReviewStars)));
  EXPECT_GE(oracle::pearson(h.as_vector(), star_histogram(set).as_vector()), 0.999);
}

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

#include "lmpoll/builtin_lexicons.hpp"
#include "lmpoll/experiment.hpp"
#include "lmpoll/ingest.hpp"
#include "lmpoll/lm/ngram.hpp"
#include "lmpoll/lm/replay.hpp"
#include "test_util.hpp"

using namespace lmpoll;
using testutil::TempDir;

namespace {

const std::vector<std::string> kVegProbes{"no vegetarian options", "some vegetarian options",
                                          "several vegetarian options",
                                          "many vegetarian options"};

ReviewSet population(std::size_t n, std::uint64_t seed) {
  SynthSpec s;
  s.n = n;
  s.star_weights = {0.15, 0.1, 0.12, 0.23, 0.4};
  s.positivity_by_star = {0.1, 0.3, 0.5, 0.7, 0.9};
  s.seed = seed;
  for (const auto& p : kVegProbes) s.phrases.push_back({p, 0.02});
  return synthesize_population(s, builtin::positive_words(), builtin::negative_words(),
                               builtin::filler_words());
}

// Fails on the probe with the given ordinal.
class FailingBackend final : public GenerationBackend {
 public:
  FailingBackend(const GenerationBackend& inner, std::string bad_prompt)
      : inner_(inner), bad_(std::move(bad_prompt)) {}
  std::vector<std::string> generate(const GenerationRequest& r) const override {
    if (r.prompt == bad_) throw BackendUnavailable(503, "down");
    return inner_.generate(r);
  }
  std::string name() const override { return "failing"; }
  CompletionMode mode() const override { return inner_.mode(); }

 private:
  const GenerationBackend& inner_;
  std::string bad_;
};

}  // namespace

TEST(Store, IdsAreZeroPaddedAndMonotonic) {
  TempDir d;
  StoreWriter w{Store(d.path())};
  auto a = w.create("first", "m", {"review:"}, 1, {}, "2020-01-01T00:00:00Z");
  auto b = w.create("second", "m", {}, 2, {{"k", "v"}}, "2020-01-01T00:00:00Z");
  EXPECT_EQ(a.id, "000001");
  EXPECT_EQ(b.id, "000002");
  auto all = w.store().experiments();
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].hyperparams.at("k"), "v");
  EXPECT_EQ(all[0].status, kStatusCreated);
  EXPECT_TRUE(testutil::read_file((d.path() / "experiments.jsonl").string())
                  .starts_with(R"({"id":"000001","created_at":"2020-01-01T00:00:00Z",)"
                               R"("description":"first","model_name":"m","probes":["review:"],)"));
}

TEST(Store, FourProbeSuiteRecord) {
  TempDir d;
  StoreWriter w{Store(d.path())};
  auto e = w.create("extrapolation", "gpt2", kVegProbes, 11, {});
  EXPECT_EQ(w.store().experiment(e.id).probes, kVegProbes);
  EXPECT_THROW(w.store().experiment("999999"), DataError);
}

TEST(Store, SingleWriterLock) {
  TempDir d;
  {
    StoreWriter w{Store(d.path())};
    EXPECT_THROW(StoreWriter{Store(d.path())}, BusyError);
    EXPECT_NO_THROW(Store(d.path()).experiments());
  }
  EXPECT_NO_THROW(StoreWriter{Store(d.path())});
}

TEST(Store, RowsMustReferenceExperiment) {
  TempDir d;
  StoreWriter w{Store(d.path())};
  auto e = w.create("x", "m", {"a"}, 1, {});
  GenerationRow r;
  r.experiment_id = "000009";
  EXPECT_THROW(w.append_rows(e, {r}), ArgumentError);
  r.experiment_id = e.id;
  r.probe_ordinal = 1;
  EXPECT_THROW(w.append_rows(e, {r}), ArgumentError);
}

TEST(Timestamp, HonoursSourceDateEpoch) {
  ::setenv("SOURCE_DATE_EPOCH", "1600000000", 1);
  EXPECT_EQ(utc_timestamp(), "2020-09-13T12:26:40Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(utc_timestamp().size(), 20u);
}

TEST(Suite, ReplayProbeIsClean) {
  TempDir d;
  auto pop = population(500, 3);
  ReplayBackend be(pop);
  auto clf = builtin_classifier();
  StoreWriter w{Store(d.path())};
  auto e = w.create("replay", be.name(), {""}, 5, reference_hyperparams(pop, clf));
  SuiteOptions o;
  o.per_probe_n = 100;
  auto s = run_probe_suite(w, e.id, be, clf, o);
  ASSERT_EQ(s.probes.size(), 1u);
  EXPECT_EQ(s.probes[0].total, 100u);
  EXPECT_EQ(s.probes[0].error_rate, 0.0);
  auto rows = w.store().rows(e.id);
  ASSERT_EQ(rows.size(), 100u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.parse_status, ParseStatus::kOk);
    ASSERT_TRUE(r.stars.has_value());
    ASSERT_TRUE(r.sentiment_label.has_value());
  }
  EXPECT_EQ(w.store().experiment(e.id).status, kStatusComplete);
}

TEST(Suite, UndertrainedNgramHasErrors) {
  TempDir d;
  auto pop = population(2000, 4);
  auto corpus = build_review_corpus(pop, 100, 1);
  NgramBackend be(std::make_shared<const NgramModel>(NgramModel::train(corpus, 5, 0.05)));
  auto clf = builtin_classifier();
  StoreWriter w{Store(d.path())};
  auto e = w.create("tiny", be.name(), {"review:"}, 6, {});
  SuiteOptions o;
  o.per_probe_n = 500;
  auto s = run_probe_suite(w, e.id, be, clf, o);
  EXPECT_GT(s.probes[0].error_rate, 0.0);
  EXPECT_EQ(s.probes[0].malformed, 489u);
}

TEST(Suite, EmptyProbesRejectedAtRunTime) {
  TempDir d;
  ReplayBackend be(population(50, 1));
  StoreWriter w{Store(d.path())};
  auto e = w.create("empty", "m", {}, 1, {});
  EXPECT_THROW(run_probe_suite(w, e.id, be, builtin_classifier(), {}), ArgumentError);
}

TEST(Suite, ProbeSeedsAreChildren) {
  TempDir d;
  auto pop = population(300, 2);
  ReplayBackend be(pop);
  StoreWriter w{Store(d.path())};
  auto e = w.create("seeds", "m", {"", "review:"}, 42, {});
  SuiteOptions o;
  o.per_probe_n = 7;
  run_probe_suite(w, e.id, be, builtin_classifier(), o);
  auto rows = w.store().rows(e.id);
  GenerationRequest r{"review:", 7, kDefaultMaxTokens, kDefaultTemperature,
                      child_seed(42, 1)};
  auto expect = be.generate(r);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(rows[7 + i].raw, expect[i]);
}

TEST(Suite, BackendFailureLeavesPartialRows) {
  TempDir d;
  auto pop = population(1000, 7);
  ReplayBackend inner(pop);
  FailingBackend be(inner, "review: several vegetarian options");
  StoreWriter w{Store(d.path())};
  auto e = w.create("fail", "m", kVegProbes, 1, {});
  SuiteOptions o;
  o.per_probe_n = 10;
  EXPECT_THROW(run_probe_suite(w, e.id, be, builtin_classifier(), o), BackendUnavailable);
  EXPECT_EQ(w.store().experiment(e.id).status, kStatusPartial);
  EXPECT_EQ(w.store().rows(e.id).size(), 20u);
  EXPECT_THROW(report(w.store(), {e.id}, ReportKind::kHist), DataError);
  ReportOptions ro;
  ro.include_partial = true;
  EXPECT_NO_THROW(report(w.store(), {e.id}, ReportKind::kHist, ro));
}

TEST(Suite, RecordAssembly) {
  EXPECT_EQ(wrap_probe("", CorpusFormat::kReviewStars), "review:");
  EXPECT_EQ(wrap_probe("no vegetarian options", CorpusFormat::kReviewStars),
            "review: no vegetarian options");
  EXPECT_EQ(wrap_probe("review: x", CorpusFormat::kReviewStars), "review: x");
  EXPECT_EQ(wrap_probe("stars =", CorpusFormat::kNumericRecords), "stars =");
  EXPECT_EQ(record_text("review:", " ok, stars: 5.0 --\nmore", CompletionMode::kContinuation),
            "review: ok, stars: 5.0 --");
  EXPECT_EQ(record_text("ignored", "review: a, stars: 1.0 --", CompletionMode::kFullRecord),
            "review: a, stars: 1.0 --");
  EXPECT_EQ(record_text("", " stars = 1.0", CompletionMode::kContinuation), "stars = 1.0");
}

TEST(Suite, RerunIntoFreshStoreIsIdentical) {
  auto pop = population(3000, 8);
  auto corpus = build_review_corpus(pop, 2000, 2);
  NgramBackend be(std::make_shared<const NgramModel>(NgramModel::train(corpus, 4, 0.0)), 4);
  auto clf = builtin_classifier();
  std::string first;
  for (int round = 0; round < 2; ++round) {
    TempDir d;
    StoreWriter w{Store(d.path())};
    auto e = w.create("det", be.name(), kVegProbes, 99, reference_hyperparams(pop, clf),
                      "2021-01-01T00:00:00Z");
    SuiteOptions o;
    o.per_probe_n = 50;
    run_probe_suite(w, e.id, be, clf, o);
    auto bytes = testutil::read_file(w.store().rows_path(e.id).string()) +
                 testutil::read_file(w.store().experiments_path().string());
    for (auto k : {ReportKind::kT1, ReportKind::kT2, ReportKind::kT7, ReportKind::kHist})
      bytes += report(w.store(), {}, k).to_csv();
    if (round == 0)
      first = bytes;
    else
      EXPECT_EQ(bytes, first);
  }
}

TEST(Report, HistOfEnumeratedReplayEqualsSource) {
  TempDir d;
  auto pop = population(400, 9);
  auto clf = builtin_classifier();
  ReplayBackend be(pop, ReplayBackend::Mode::kEnumerate);
  StoreWriter w{Store(d.path())};
  auto e = w.create("hist", be.name(), {""}, 1, reference_hyperparams(pop, clf));
  SuiteOptions o;
  o.per_probe_n = pop.size();
  run_probe_suite(w, e.id, be, clf, o);
  auto t = report(w.store(), {e.id}, ReportKind::kHist);
  ASSERT_EQ(t.rows.size(), 5u);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row[1], row[3]);
    EXPECT_EQ(row[2], row[4]);
  }
  auto t1 = report(w.store(), {e.id}, ReportKind::kT1);
  EXPECT_EQ(t1.rows[0][2], "0.00%");
  EXPECT_EQ(t1.rows[0][3], "100.00%");
  auto t2 = report(w.store(), {e.id}, ReportKind::kT2);
  EXPECT_EQ(t2.rows[0][4], "0.00%");
  EXPECT_EQ(t2.rows[1][4], "0.00%");
  auto t7 = report(w.store(), {e.id}, ReportKind::kT7);
  EXPECT_EQ(t7.rows[0][1], t7.rows[1][1]);
  EXPECT_EQ(t7.rows[1][3], "0.00%");
}

TEST(Report, T7Layout) {
  TempDir d;
  auto pop = population(800, 10);
  auto clf = builtin_classifier();
  ReplayBackend be(pop);
  StoreWriter w{Store(d.path())};
  auto hp = reference_hyperparams(pop, clf);
  hp["reference_pos"] = "39";
  hp["reference_total"] = "97";
  hp["label"] = "GPT(no veg)";
  auto e = w.create("t7", be.name(), kVegProbes, 3, hp);
  SuiteOptions o;
  o.per_probe_n = 25;
  run_probe_suite(w, e.id, be, clf, o);
  auto t = report(w.store(), {}, ReportKind::kT7);
  EXPECT_EQ(t.header, (std::vector<std::string>{"Name", "Pos %", "Neg %", "Error l2"}));
  ASSERT_EQ(t.rows.size(), 5u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"Ground Truth", "40.21%", "59.79%", "-"}));
  EXPECT_EQ(t.rows[1][0], "GPT(no veg)");
  EXPECT_EQ(t.rows[2][0], "baseline(26)");
  EXPECT_EQ(t.rows[4][0], "baseline(8)");
  auto text = t.to_text();
  EXPECT_NE(text.find("Ground Truth vs. Extrapolation vs. Baseline"), std::string::npos);
}

TEST(Report, MissingStatisticIsNamed) {
  TempDir d;
  ReplayBackend be(population(100, 11));
  StoreWriter w{Store(d.path())};
  auto e = w.create("noref", be.name(), {""}, 1, {});
  SuiteOptions o;
  o.per_probe_n = 10;
  run_probe_suite(w, e.id, be, builtin_classifier(), o);
  for (auto [kind, stat] : {std::pair{ReportKind::kT1, "reference_hist"},
                            std::pair{ReportKind::kT2, "reference_avg_positive"},
                            std::pair{ReportKind::kT7, "reference_pos"}}) {
    try {
      report(w.store(), {e.id}, kind);
      ADD_FAILURE() << stat;
    } catch (const DataError& err) {
      EXPECT_NE(std::string(err.what()).find("missing statistic " + std::string(stat)),
                std::string::npos)
          << err.what();
    }
  }
  EXPECT_NO_THROW(report(w.store(), {e.id}, ReportKind::kHist));
  EXPECT_THROW(parse_report_kind("T9"), ArgumentError);
  EXPECT_EQ(parse_report_kind("hist"), ReportKind::kHist);
}

TEST(Table, CsvAndText) {
  Table t{"Title", {"Name", "Value"}, {{"a,b", "1"}, {"q\"x", "22"}}, {"note"}};
  EXPECT_EQ(t.to_csv(), "Name,Value\n\"a,b\",1\n\"q\"\"x\",22\n");
  EXPECT_EQ(t.to_text(), "Title\nName  Value\n-----------\na,b       1\nq\"x      22\n# note\n");
}

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

// Masks a phrase out of a synthetic population, trains an n-gram model on the
// rest and polls it with four probes.

#include <iostream>

#include "lmpoll/builtin_lexicons.hpp"
#include "lmpoll/corpus.hpp"
#include "lmpoll/experiment.hpp"
#include "lmpoll/ingest.hpp"
#include "lmpoll/lm/ngram.hpp"

int main(int argc, char** argv) {
  using namespace lmpoll;
  const std::filesystem::path store_dir =
      argc > 1 ? argv[1] : std::filesystem::temp_directory_path() / "lmpoll-demo";
  const std::vector<std::string> probes{"no vegetarian options", "some vegetarian options",
                                        "several vegetarian options",
                                        "many vegetarian options"};
  SynthSpec spec;
  spec.n = 20000;
  spec.seed = 1;
  spec.star_weights = {0.15, 0.1, 0.12, 0.23, 0.4};
  spec.positivity_by_star = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (const auto& p : probes) spec.phrases.push_back({p, 0.01});
  auto pop = synthesize_population(spec, builtin::positive_words(), builtin::negative_words(),
                                   builtin::filler_words());

  auto clf = builtin_classifier();
  auto target = filter_reviews(pop, ReviewFilter{std::nullopt, probes[0], std::nullopt});
  auto masked = mask(pop, probes[0]);
  auto corpus = build_review_corpus(masked, 10000, 2);
  NgramBackend backend(std::make_shared<const NgramModel>(NgramModel::train(corpus, 5, 0.0)));

  std::filesystem::remove_all(store_dir);
  StoreWriter w{Store(store_dir)};
  auto hp = reference_hyperparams(target, clf);
  hp["label"] = "ngram(masked)";
  auto e = w.create("masking demo", backend.name(), probes, 3, hp);
  SuiteOptions opts;
  opts.per_probe_n = 100;
  auto summary = run_probe_suite(w, e.id, backend, clf, opts);
  for (const auto& p : summary.probes)
    std::cout << p.probe << ": " << p.total << " records, " << p.malformed << " malformed\n";
  std::cout << '\n' << report(w.store(), {e.id}, ReportKind::kT7).to_text();
}

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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmpoll/analyze.hpp"
#include "lmpoll/corpus.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/lm/backend.hpp"
#include "lmpoll/parse.hpp"
#include "lmpoll/rng.hpp"
#include "lmpoll/stats.hpp"
#include "lmpoll/table.hpp"
#include "lmpoll/text.hpp"

namespace lmpoll {

namespace fs = std::filesystem;

/// Experiment status values stored alongside the record.
inline constexpr const char* kStatusCreated = "created";
inline constexpr const char* kStatusComplete = "complete";
inline constexpr const char* kStatusPartial = "partial";

struct ExperimentRecord {
  std::string id;
  std::string created_at;
  std::string description;
  std::string model_name;
  std::vector<std::string> probes;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> hyperparams;
  std::string status = kStatusCreated;

  std::optional<std::string> param(const std::string& key) const {
    auto it = hyperparams.find(key);
    if (it == hyperparams.end()) return std::nullopt;
    return it->second;
  }
};

struct GenerationRow {
  std::string experiment_id;
  std::size_t probe_ordinal = 0;
  std::string raw;
  ParseStatus parse_status = ParseStatus::kMalformed;
  std::optional<Stars> stars;
  std::optional<SentimentLabel> sentiment_label;
  std::size_t pos_hits = 0;
  std::size_t neg_hits = 0;
};

/// ISO-8601 UTC timestamp. SOURCE_DATE_EPOCH, when set, replaces the clock.
inline std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e)
    t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::string dump_line(const nlohmann::ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline nlohmann::ordered_json to_json(const ExperimentRecord& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["created_at"] = e.created_at;
  j["description"] = e.description;
  j["model_name"] = e.model_name;
  j["probes"] = e.probes;
  j["seed"] = e.seed;
  nlohmann::ordered_json hp = nlohmann::ordered_json::object();
  for (const auto& [k, v] : e.hyperparams) hp[k] = v;
  j["hyperparams"] = hp;
  j["status"] = e.status;
  return j;
}

inline ExperimentRecord experiment_from_json(const nlohmann::json& j) {
  ExperimentRecord e;
  e.id = j.at("id").get<std::string>();
  e.created_at = j.at("created_at").get<std::string>();
  e.description = j.at("description").get<std::string>();
  e.model_name = j.at("model_name").get<std::string>();
  e.probes = j.at("probes").get<std::vector<std::string>>();
  e.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("hyperparams").items())
    e.hyperparams[k] = v.get<std::string>();
  e.status = j.value("status", std::string(kStatusCreated));
  return e;
}

inline nlohmann::ordered_json to_json(const GenerationRow& r) {
  nlohmann::ordered_json j;
  j["experiment_id"] = r.experiment_id;
  j["probe_ordinal"] = r.probe_ordinal;
  j["raw"] = r.raw;
  j["parse_status"] = std::string(status_name(r.parse_status));
  j["stars"] = r.stars ? nlohmann::ordered_json(*r.stars) : nullptr;
  j["sentiment_label"] =
      r.sentiment_label
          ? nlohmann::ordered_json(std::string(label_name(*r.sentiment_label)))
          : nullptr;
  j["pos_hits"] = r.pos_hits;
  j["neg_hits"] = r.neg_hits;
  return j;
}

inline GenerationRow row_from_json(const nlohmann::json& j) {
  GenerationRow r;
  r.experiment_id = j.at("experiment_id").get<std::string>();
  r.probe_ordinal = j.at("probe_ordinal").get<std::size_t>();
  r.raw = j.at("raw").get<std::string>();
  const auto st = j.at("parse_status").get<std::string>();
  if (st == "OK")
    r.parse_status = ParseStatus::kOk;
  else if (st == "MALFORMED")
    r.parse_status = ParseStatus::kMalformed;
  else
    throw DataError("bad parse_status " + st);
  if (!j.at("stars").is_null()) r.stars = j.at("stars").get<int>();
  if (!j.at("sentiment_label").is_null()) {
    const auto l = j.at("sentiment_label").get<std::string>();
    if (l == "POSITIVE")
      r.sentiment_label = SentimentLabel::kPositive;
    else if (l == "NEGATIVE")
      r.sentiment_label = SentimentLabel::kNegative;
    else
      throw DataError("bad sentiment_label " + l);
  }
  r.pos_hits = j.at("pos_hits").get<std::size_t>();
  r.neg_hits = j.at("neg_hits").get<std::size_t>();
  return r;
}

template <typename Fn>
void read_jsonl(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " +
                      e.what());
    }
  }
}

}  // namespace detail

/// Directory store: experiments.jsonl plus rows/<id>.jsonl. Readers need no
/// lock; every mutation goes through a StoreWriter holding `.lock`.
class Store {
 public:
  explicit Store(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }
  fs::path experiments_path() const { return dir_ / "experiments.jsonl"; }
  fs::path rows_path(const std::string& id) const {
    return dir_ / "rows" / (id + ".jsonl");
  }
  fs::path lock_path() const { return dir_ / ".lock"; }

  std::vector<ExperimentRecord> experiments() const {
    std::vector<ExperimentRecord> out;
    detail::read_jsonl(experiments_path(), [&](const nlohmann::json& j) {
      out.push_back(detail::experiment_from_json(j));
    });
    return out;
  }

  ExperimentRecord experiment(const std::string& id) const {
    for (auto& e : experiments())
      if (e.id == id) return e;
    throw DataError("no experiment " + id + " in " + dir_.string());
  }

  std::vector<GenerationRow> rows(const std::string& id) const {
    std::vector<GenerationRow> out;
    detail::read_jsonl(rows_path(id), [&](const nlohmann::json& j) {
      out.push_back(detail::row_from_json(j));
    });
    return out;
  }

 private:
  fs::path dir_;
};

/// Exclusive writer. Construction takes the lock file or throws BusyError.
class StoreWriter {
 public:
  explicit StoreWriter(Store store) : store_(std::move(store)) {
    std::error_code ec;
    fs::create_directories(store_.dir() / "rows", ec);
    if (ec)
      throw IoError("cannot create store " + store_.dir().string() + ": " +
                    ec.message());
    const auto lock = store_.lock_path().string();
    fd_ = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST)
        throw BusyError("store " + store_.dir().string() +
                        " is locked by another writer (" + lock + ")");
      throw IoError("cannot create lock " + lock);
    }
  }
  StoreWriter(const StoreWriter&) = delete;
  StoreWriter& operator=(const StoreWriter&) = delete;
  ~StoreWriter() {
    if (fd_ >= 0) {
      ::close(fd_);
      std::error_code ec;
      fs::remove(store_.lock_path(), ec);
    }
  }

  const Store& store() const { return store_; }

  /// Persists a new record; the id is the next zero-padded integer.
  ExperimentRecord create(std::string description, std::string model_name,
                          std::vector<std::string> probes, std::uint64_t seed,
                          std::map<std::string, std::string> hyperparams,
                          std::string created_at = utc_timestamp()) {
    auto all = store_.experiments();
    unsigned long long next = 1;
    for (const auto& e : all) next = std::max(next, std::stoull(e.id) + 1);
    std::string id = std::to_string(next);
    if (id.size() < 6) id.insert(0, 6 - id.size(), '0');
    ExperimentRecord rec{id,    std::move(created_at), std::move(description),
                         std::move(model_name), std::move(probes),
                         seed,  std::move(hyperparams), kStatusCreated};
    std::ofstream out(store_.experiments_path(),
                      std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to " + store_.experiments_path().string());
    out << detail::dump_line(detail::to_json(rec)) << '\n';
    if (!out) throw IoError("write failed: " + store_.experiments_path().string());
    return rec;
  }

  /// Replaces the stored record with the same id.
  void update(const ExperimentRecord& rec) {
    auto all = store_.experiments();
    bool found = false;
    for (auto& e : all) {
      if (e.id == rec.id) {
        e = rec;
        found = true;
      }
    }
    if (!found) throw DataError("no experiment " + rec.id);
    const fs::path tmp = store_.experiments_path().string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + tmp.string());
      for (const auto& e : all) out << detail::dump_line(detail::to_json(e)) << '\n';
      if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, store_.experiments_path());
  }

  void clear_rows(const std::string& id) {
    std::ofstream out(store_.rows_path(id), std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + store_.rows_path(id).string());
  }

  /// Appends rows after checking they reference `exp` and its probes.
  void append_rows(const ExperimentRecord& exp,
                   const std::vector<GenerationRow>& rows) {
    for (const auto& r : rows) {
      if (r.experiment_id != exp.id)
        throw ArgumentError("row references experiment " + r.experiment_id +
                            ", expected " + exp.id);
      if (r.probe_ordinal >= exp.probes.size())
        throw ArgumentError("row probe ordinal out of range");
    }
    std::ofstream out(store_.rows_path(exp.id),
                      std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot append to " + store_.rows_path(exp.id).string());
    for (const auto& r : rows) out << detail::dump_line(detail::to_json(r)) << '\n';
    if (!out) throw IoError("write failed: " + store_.rows_path(exp.id).string());
  }

 private:
  Store store_;
  int fd_ = -1;
};

/// Ground-truth statistics recorded into an experiment's hyperparams so
/// reports can be computed from the store alone.
inline std::map<std::string, std::string> reference_hyperparams(
    const ReviewSet& reference, const SentimentClassifier& classifier) {
  std::map<std::string, std::string> hp;
  auto hist = star_histogram(reference);
  std::vector<std::string> counts;
  for (auto c : hist.counts) counts.push_back(std::to_string(c));
  hp["reference_hist"] = text::join(counts, ",");
  std::vector<TextStars> pairs;
  for (const auto& r : reference) pairs.emplace_back(r.text, r.stars);
  std::size_t pos = 0;
  for (const auto& p : pairs)
    pos += classifier.classify(p.first).label == SentimentLabel::kPositive;
  hp["reference_pos"] = std::to_string(pos);
  hp["reference_total"] = std::to_string(pairs.size());
  for (const auto& [label, mean] : avg_stars_by_sentiment(pairs, classifier)) {
    hp[label == SentimentLabel::kPositive ? "reference_avg_positive"
                                          : "reference_avg_negative"] =
        text::exact(mean);
  }
  hp["reference_source"] = reference.provenance();
  return hp;
}

/// Prompt sent to the backend for a probe.
inline std::string wrap_probe(const std::string& probe, CorpusFormat format) {
  if (format == CorpusFormat::kNumericRecords) return probe;
  auto p = text::trim(probe);
  if (p.empty()) return "review:";
  if (p.starts_with("review:")) return std::string(p);
  return "review: " + std::string(p);
}

/// The record a completion stands for: full-record backends return it
/// directly, continuation backends need the prompt in front. Only the first
/// line counts.
inline std::string record_text(const std::string& prompt,
                               const std::string& completion,
                               CompletionMode mode) {
  std::string joined =
      mode == CompletionMode::kFullRecord ? completion : prompt + completion;
  auto nl = joined.find('\n');
  if (nl != std::string::npos) joined.resize(nl);
  if (!joined.empty() && joined.back() == '\r') joined.pop_back();
  return std::string(text::ltrim(joined));
}

struct SuiteOptions {
  std::size_t per_probe_n = 100;
  std::size_t max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;
  CorpusFormat format = CorpusFormat::kReviewStars;
};

struct ProbeSummary {
  std::string probe;
  std::size_t total = 0;
  std::size_t malformed = 0;
  double error_rate = 0.0;
  std::optional<SentimentSplit> split;  // absent when nothing parsed
};

struct SuiteSummary {
  std::string experiment_id;
  std::vector<ProbeSummary> probes;
};

/// Runs every probe of `exp_id` against `backend`, storing one row per
/// completion. Probe i uses seed child_seed(exp.seed, i). If the backend
/// fails, completed probes stay stored and the experiment is marked partial.
inline SuiteSummary run_probe_suite(StoreWriter& writer,
                                    const std::string& exp_id,
                                    const GenerationBackend& backend,
                                    const SentimentClassifier& classifier,
                                    const SuiteOptions& opts) {
  ExperimentRecord exp = writer.store().experiment(exp_id);
  if (exp.probes.empty())
    throw ArgumentError("experiment " + exp_id + " has no probes");
  if (opts.per_probe_n == 0) throw ArgumentError("per-probe n must be >= 1");
  exp.hyperparams["backend"] = backend.name();
  exp.hyperparams["format"] = std::string(format_name(opts.format));
  exp.hyperparams["max_tokens"] = std::to_string(opts.max_tokens);
  exp.hyperparams["per_probe_n"] = std::to_string(opts.per_probe_n);
  exp.hyperparams["temperature"] = text::exact(opts.temperature);
  exp.status = kStatusPartial;
  writer.update(exp);
  writer.clear_rows(exp.id);

  SuiteSummary summary{exp.id, {}};
  try {
    for (std::size_t i = 0; i < exp.probes.size(); ++i) {
      GenerationRequest req;
      req.prompt = wrap_probe(exp.probes[i], opts.format);
      req.n = opts.per_probe_n;
      req.max_tokens = opts.max_tokens;
      req.temperature = opts.temperature;
      req.seed = child_seed(exp.seed, i);
      auto texts = backend.generate(req);
      if (texts.size() != req.n)
        throw BackendError(backend.name() + " returned " +
                           std::to_string(texts.size()) + " completions, expected " +
                           std::to_string(req.n));

      std::vector<GenerationRow> rows;
      ProbeSummary ps{exp.probes[i], 0, 0, 0.0, std::nullopt};
      std::size_t positives = 0, labeled = 0;
      for (const auto& t : texts) {
        GenerationRow row;
        row.experiment_id = exp.id;
        row.probe_ordinal = i;
        row.raw = record_text(req.prompt, t, backend.mode());
        auto rec = parse_line(row.raw, opts.format);
        row.parse_status = rec.status;
        if (rec.ok()) {
          row.stars = rec.stars;
          if (opts.format == CorpusFormat::kReviewStars) {
            auto s = classifier.classify(rec.text);
            row.sentiment_label = s.label;
            row.pos_hits = s.pos_hits;
            row.neg_hits = s.neg_hits;
            ++labeled;
            positives += s.label == SentimentLabel::kPositive;
          }
        } else {
          ++ps.malformed;
        }
        ++ps.total;
        rows.push_back(std::move(row));
      }
      ps.error_rate = static_cast<double>(ps.malformed) /
                      static_cast<double>(ps.total);
      if (labeled > 0) ps.split = split_from_counts(positives, labeled);
      writer.append_rows(exp, rows);
      summary.probes.push_back(std::move(ps));
    }
  } catch (...) {
    exp.status = kStatusPartial;
    writer.update(exp);
    throw;
  }
  exp.status = kStatusComplete;
  writer.update(exp);
  return summary;
}

enum class ReportKind { kT1, kT2, kT7, kHist };

inline ReportKind parse_report_kind(std::string_view s) {
  const auto u = text::to_lower(s);
  if (u == "t1") return ReportKind::kT1;
  if (u == "t2") return ReportKind::kT2;
  if (u == "t7") return ReportKind::kT7;
  if (u == "hist") return ReportKind::kHist;
  throw ArgumentError("unknown report table: " + std::string(s) +
                      " (expected T1, T2, T7 or HIST)");
}

struct ReportOptions {
  bool include_partial = false;
  std::vector<std::size_t> baseline_sizes{26, 18, 8};
  std::size_t baseline_repeats = 1000;
  std::size_t max_pool_sample = 1000;
  std::size_t threads = 1;
};

namespace detail {

inline std::string pct(double v) { return text::fixed(v, 2) + "%"; }

inline std::string experiment_label(const ExperimentRecord& e) {
  if (auto l = e.param("label")) return *l;
  if (!e.description.empty()) return e.description;
  return e.id;
}

inline std::string require(const ExperimentRecord& e, const std::string& key) {
  auto v = e.param(key);
  if (!v)
    throw DataError("experiment " + e.id + ": missing statistic " + key);
  return *v;
}

inline std::size_t require_count(const ExperimentRecord& e,
                                 const std::string& key) {
  const auto v = require(e, key);
  try {
    std::size_t pos = 0;
    auto n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw DataError("experiment " + e.id + ": bad " + key + " value " + v);
  }
}

inline double require_real(const ExperimentRecord& e, const std::string& key) {
  const auto v = require(e, key);
  try {
    return std::stod(v);
  } catch (const std::logic_error&) {
    throw DataError("experiment " + e.id + ": bad " + key + " value " + v);
  }
}

inline StarHistogram reference_histogram(const ExperimentRecord& e) {
  const std::string raw = require(e, "reference_hist");
  const auto parts = text::split(raw, ',');
  if (parts.size() != 5)
    throw DataError("experiment " + e.id + ": reference_hist needs 5 counts");
  StarHistogram h;
  for (std::size_t i = 0; i < 5; ++i) {
    try {
      h.counts[i] = std::stoull(std::string(parts[i]));
    } catch (const std::logic_error&) {
      throw DataError("experiment " + e.id + ": bad reference_hist");
    }
  }
  return h;
}

inline StarHistogram generated_histogram(const std::vector<GenerationRow>& rows) {
  StarHistogram h;
  for (const auto& r : rows)
    if (r.parse_status == ParseStatus::kOk && r.stars) h.add(*r.stars);
  return h;
}

inline std::vector<SentimentLabel> generated_labels(
    const std::vector<GenerationRow>& rows) {
  std::vector<SentimentLabel> out;
  for (const auto& r : rows)
    if (r.parse_status == ParseStatus::kOk && r.sentiment_label)
      out.push_back(*r.sentiment_label);
  return out;
}

}  // namespace detail

inline std::optional<StarHistogram> first_reference(
    const std::vector<ExperimentRecord>& exps) {
  for (const auto& e : exps)
    if (e.param("reference_hist")) return detail::reference_histogram(e);
  return std::nullopt;
}

/// Builds one of the report tables from stored experiments. An empty
/// id list selects every experiment in the store. Partial experiments are
/// skipped unless requested.
inline Table report(const Store& store, const std::vector<std::string>& ids,
                    ReportKind kind, const ReportOptions& opts = {}) {
  std::vector<ExperimentRecord> chosen;
  std::vector<std::string> skipped;
  auto consider = [&](const ExperimentRecord& e) {
    if (e.status == kStatusComplete ||
        (opts.include_partial && e.status == kStatusPartial))
      chosen.push_back(e);
    else
      skipped.push_back(e.id);
  };
  if (ids.empty()) {
    for (const auto& e : store.experiments()) consider(e);
  } else {
    for (const auto& id : ids) consider(store.experiment(id));
  }
  if (chosen.empty())
    throw DataError("no completed experiments to report (skipped: " +
                    text::join(skipped, ",") + ")");

  Table t;
  if (!skipped.empty())
    t.notes.push_back("skipped incomplete experiments: " +
                      text::join(skipped, ","));

  switch (kind) {
    case ReportKind::kT1: {
      t.title = "Memorization Error & Correlation";
      t.header = {"Model", "lines", "error %", "correlation %"};
      for (const auto& e : chosen) {
        const auto rows = store.rows(e.id);
        if (rows.empty())
          throw DataError("experiment " + e.id + ": missing statistic rows");
        std::size_t bad = 0;
        for (const auto& r : rows) bad += r.parse_status != ParseStatus::kOk;
        const auto gen = detail::generated_histogram(rows);
        const auto ref = detail::reference_histogram(e);
        std::string corr = "n/a";
        try {
          corr = detail::pct(100.0 * pearson(gen, ref));
        } catch (const ArgumentError&) {
        }
        t.rows.push_back(
            {detail::experiment_label(e), e.param("corpus_lines").value_or("-"),
             detail::pct(100.0 * static_cast<double>(bad) /
                         static_cast<double>(rows.size())),
             corr});
      }
      t.notes.push_back(
          "correlation is Pearson r (x100) between generated and reference "
          "star histograms");
      break;
    }
    case ReportKind::kT2: {
      t.title = "Star ratings for Sentiment";
      t.header = {"Model", "Sentiment", "Generated", "Ground truth",
                  "% difference"};
      for (const auto& e : chosen) {
        std::map<SentimentLabel, std::pair<double, std::size_t>> acc;
        for (const auto& r : store.rows(e.id)) {
          if (r.parse_status != ParseStatus::kOk || !r.sentiment_label ||
              !r.stars)
            continue;
          auto& a = acc[*r.sentiment_label];
          a.first += *r.stars;
          ++a.second;
        }
        for (auto label : {SentimentLabel::kPositive, SentimentLabel::kNegative}) {
          const std::string key = label == SentimentLabel::kPositive
                                      ? "reference_avg_positive"
                                      : "reference_avg_negative";
          const double gt = detail::require_real(e, key);
          auto it = acc.find(label);
          if (it == acc.end())
            throw DataError("experiment " + e.id +
                            ": missing statistic generated mean for " +
                            std::string(label_name(label)));
          const double gen = it->second.first /
                             static_cast<double>(it->second.second);
          t.rows.push_back({detail::experiment_label(e),
                            std::string(label_name(label)), text::fixed(gen, 2),
                            text::fixed(gt, 2),
                            detail::pct(pct_difference(gen, gt))});
        }
      }
      t.notes.push_back("% difference = 100*|generated - truth|/truth");
      break;
    }
    case ReportKind::kT7: {
      t.title = "Ground Truth vs. Extrapolation vs. Baseline";
      t.header = {"Name", "Pos %", "Neg %", "Error l2"};
      const auto& first = chosen.front();
      const std::size_t ref_pos = detail::require_count(first, "reference_pos");
      const std::size_t ref_total =
          detail::require_count(first, "reference_total");
      const auto reference = split_from_counts(ref_pos, ref_total);
      t.rows.push_back({"Ground Truth", detail::pct(reference.pos_pct),
                        detail::pct(reference.neg_pct), "-"});
      for (const auto& e : chosen) {
        const auto labels = detail::generated_labels(store.rows(e.id));
        if (labels.empty())
          throw DataError("experiment " + e.id +
                          ": missing statistic sentiment labels");
        const auto split = sentiment_split(labels);
        const std::size_t k = std::min(opts.max_pool_sample, labels.size());
        const auto rep = l2_resample_error(labels, reference, k,
                                           opts.baseline_repeats, true, e.seed,
                                           opts.threads);
        t.rows.push_back({detail::experiment_label(e), detail::pct(split.pos_pct),
                          detail::pct(split.neg_pct), detail::pct(rep.l2_error)});
      }
      const auto population = label_population(ref_pos, ref_total);
      for (auto size : opts.baseline_sizes) {
        if (size > ref_total) {
          t.notes.push_back("baseline(" + std::to_string(size) +
                            ") skipped: reference has " +
                            std::to_string(ref_total) + " items");
          continue;
        }
        const auto rep = l2_resample_error(population, reference, size,
                                           opts.baseline_repeats, true,
                                           child_seed(first.seed, size),
                                           opts.threads);
        t.rows.push_back({"baseline(" + std::to_string(size) + ")",
                          detail::pct(rep.mean_split.pos_pct),
                          detail::pct(rep.mean_split.neg_pct),
                          detail::pct(rep.l2_error)});
      }
      t.notes.push_back("baselines resample the reference without replacement, " +
                        std::to_string(opts.baseline_repeats) + " repeats");
      break;
    }
    case ReportKind::kHist: {
      t.title = "Star distribution";
      t.header = {"Stars"};
      std::vector<StarHistogram> hists;
      bool with_ref = false;
      StarHistogram ref;
      if (auto h = first_reference(chosen)) {
        ref = *h;
        with_ref = true;
        t.header.push_back("Ground truth");
        t.header.push_back("GT %");
      }
      for (const auto& e : chosen) {
        hists.push_back(detail::generated_histogram(store.rows(e.id)));
        t.header.push_back(detail::experiment_label(e));
        t.header.push_back(detail::experiment_label(e) + " %");
      }
      for (std::size_t s = 0; s < 5; ++s) {
        std::vector<std::string> row{std::to_string(s + 1)};
        if (with_ref) {
          row.push_back(std::to_string(ref.counts[s]));
          row.push_back(detail::pct(ref.percentages()[s]));
        }
        for (const auto& h : hists) {
          row.push_back(std::to_string(h.counts[s]));
          row.push_back(detail::pct(h.percentages()[s]));
        }
        t.rows.push_back(std::move(row));
      }
      break;
    }
  }
  return t;
}

}  // namespace lmpoll

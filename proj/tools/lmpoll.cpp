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

// lmpoll: command-line front end for the polling pipeline.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lmpoll/analyze.hpp"
#include "lmpoll/builtin_lexicons.hpp"
#include "lmpoll/corpus.hpp"
#include "lmpoll/error.hpp"
#include "lmpoll/experiment.hpp"
#include "lmpoll/ingest.hpp"
#include "lmpoll/lm/ngram.hpp"
#include "lmpoll/lm/remote.hpp"
#include "lmpoll/lm/replay.hpp"
#include "lmpoll/parse.hpp"
#include "lmpoll/stats.hpp"
#include "lmpoll/table.hpp"

namespace {

using namespace lmpoll;

std::size_t g_threads = 1;

enum class OutFormat { kTable, kCsv, kLines };

OutFormat parse_out_format(const std::string& s) {
  if (s == "table") return OutFormat::kTable;
  if (s == "csv") return OutFormat::kCsv;
  if (s == "lines") return OutFormat::kLines;
  throw ArgumentError("unknown --format " + s + " (expected table, csv, lines)");
}

// Opens `path` for writing, or returns stdout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open " + path + " for writing");
      os_ = &file_;
    }
  }
  std::ostream& os() { return *os_; }
  void close(const std::string& what) {
    os_->flush();
    if (!*os_) throw IoError("write failed: " + what);
  }

 private:
  std::ofstream file_;
  std::ostream* os_ = &std::cout;
};

std::string slurp(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin),
            std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit_table(const Table& t, OutFormat f, const std::string& out_path) {
  Output out(out_path);
  if (f == OutFormat::kTable) {
    out.os() << t.to_text();
  } else if (f == OutFormat::kCsv) {
    out.os() << t.to_csv();
  } else {
    for (const auto& r : t.rows) out.os() << text::join(r, "\t") << '\n';
  }
  out.close(out_path);
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::vector<std::string> out;
  const std::string data = slurp(path);
  for (auto line : text::split_lines(data)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  if (out.empty()) throw DataError(path + ": no words");
  return out;
}

struct LexiconFlags {
  std::string positive, negative;

  void add(CLI::App* cmd) {
    cmd->add_option("--positive-lexicon", positive,
                    "Positive lexicon file (default: built-in)");
    cmd->add_option("--negative-lexicon", negative,
                    "Negative lexicon file (default: built-in)");
  }
  LexiconClassifier classifier() const {
    return LexiconClassifier(
        positive.empty() ? builtin_positive_lexicon()
                         : load_lexicon(positive, "PosEmo"),
        negative.empty() ? builtin_negative_lexicon()
                         : load_lexicon(negative, "NegEmo"));
  }
};

// ngram:PATH, replay:PATH, replay-enumerate:PATH or remote:URL.
std::unique_ptr<GenerationBackend> make_backend(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ArgumentError("backend must be ngram:PATH, replay:PATH, "
                        "replay-enumerate:PATH or remote:URL");
  const auto kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  if (arg.empty()) throw ArgumentError("backend " + kind + " needs an argument");
  if (kind == "ngram") {
    return std::make_unique<NgramBackend>(
        std::make_shared<const NgramModel>(NgramModel::load(arg)), g_threads);
  }
  if (kind == "replay")
    return std::make_unique<ReplayBackend>(read_review_set(arg));
  if (kind == "replay-enumerate")
    return std::make_unique<ReplayBackend>(read_review_set(arg),
                                           ReplayBackend::Mode::kEnumerate);
  if (kind == "remote") return std::make_unique<RemoteBackend>(arg);
  throw ArgumentError("unknown backend kind " + kind);
}

std::size_t corpus_lines_of(const std::string& source) {
  auto p = source.find("lines=");
  if (p == std::string::npos) return 0;
  return std::strtoull(source.c_str() + p + 6, nullptr, 10);
}

std::string format_arg_help() { return "numeric-records or review-stars"; }

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
  cmd->add_option("--seed", seed, "Random seed")->required();
}

std::vector<Stars> parse_stars_list(const std::string& s) {
  std::vector<Stars> out;
  for (auto part : text::split(s, ',')) {
    auto t = std::string(text::trim(part));
    if (t.empty()) continue;
    int v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoi(t, &pos);
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::logic_error&) {
      throw ArgumentError("bad star value " + t);
    }
    if (!valid_stars(v)) throw ArgumentError("star must be in 1..5: " + t);
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (auto part : text::split(s, ',')) {
    auto t = std::string(text::trim(part));
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::logic_error&) {
      throw ArgumentError("bad number " + t);
    }
  }
  return out;
}

std::array<double, 5> five_reals(const std::string& s, const char* what) {
  auto v = parse_reals(s);
  if (v.size() != 5)
    throw ArgumentError(std::string(what) + " needs 5 comma-separated values");
  return {v[0], v[1], v[2], v[3], v[4]};
}

// -------------------------------------------------------------- ingest

void setup_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "Load Yelp review and business files");
  struct Opts {
    std::string reviews, business, category, out;
    bool skip_bad = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--reviews", o->reviews, "Review file")->required();
  cmd->add_option("--business", o->business, "Business file")->required();
  cmd->add_option("--category", o->category, "Keep businesses in this category");
  cmd->add_option("--out", o->out, "ReviewSet output")->required();
  cmd->add_flag("--skip-bad-lines", o->skip_bad,
                "Count and skip malformed lines instead of failing");
  cmd->callback([o] {
    LoadOptions lo{o->skip_bad};
    LoadStats bs, rs;
    auto biz = load_businesses(o->business, lo, &bs);
    std::optional<std::string> cat;
    if (!o->category.empty()) cat = o->category;
    auto set = load_reviews(o->reviews, biz, cat, lo, &rs);
    write_review_set(set, o->out);
    std::cout << "businesses=" << biz.size() << " reviews=" << rs.loaded
              << " unknown_business=" << rs.unknown_business
              << " filtered_out=" << rs.filtered_out
              << " bad_lines=" << (bs.bad_lines + rs.bad_lines) << '\n';
  });
}

void setup_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Synthesize a controlled review population");
  struct Opts {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string weights = "1,1,1,1,1", positivity = "0.1,0.3,0.5,0.7,0.9";
    std::size_t min_tokens = 8, max_tokens = 24;
    double vote_tail = 0.1;
    std::vector<std::string> phrases;
    std::string pos, neg, filler, out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--n", o->n, "Number of reviews")->required();
  add_seed(cmd, o->seed);
  cmd->add_option("--star-weights", o->weights, "Relative frequency of stars 1..5")
      ->capture_default_str();
  cmd->add_option("--positivity", o->positivity,
                  "Positive-token probability for stars 1..5")
      ->capture_default_str();
  cmd->add_option("--min-tokens", o->min_tokens, "Shortest review")->capture_default_str();
  cmd->add_option("--max-tokens", o->max_tokens, "Longest review")->capture_default_str();
  cmd->add_option("--vote-tail", o->vote_tail, "Geometric vote continuation probability")
      ->capture_default_str();
  cmd->add_option("--phrase", o->phrases,
                  "PHRASE=PROBABILITY planted into reviews (repeatable)");
  cmd->add_option("--positive-words", o->pos, "Positive word list (default: built-in)");
  cmd->add_option("--negative-words", o->neg, "Negative word list (default: built-in)");
  cmd->add_option("--filler-words", o->filler, "Filler word list (default: built-in)");
  cmd->add_option("--out", o->out, "ReviewSet output")->required();
  cmd->callback([o] {
    SynthSpec spec;
    spec.n = o->n;
    spec.seed = o->seed;
    spec.star_weights = five_reals(o->weights, "--star-weights");
    spec.positivity_by_star = five_reals(o->positivity, "--positivity");
    spec.min_tokens = o->min_tokens;
    spec.max_tokens = o->max_tokens;
    spec.vote_tail = o->vote_tail;
    for (const auto& p : o->phrases) {
      auto eq = p.rfind('=');
      if (eq == std::string::npos)
        throw ArgumentError("--phrase must be PHRASE=PROBABILITY");
      auto prob = parse_reals(p.substr(eq + 1));
      spec.phrases.push_back({p.substr(0, eq), prob.at(0)});
    }
    auto set = synthesize_population(
        spec, o->pos.empty() ? builtin::positive_words() : read_word_list(o->pos),
        o->neg.empty() ? builtin::negative_words() : read_word_list(o->neg),
        o->filler.empty() ? builtin::filler_words() : read_word_list(o->filler));
    write_review_set(set, o->out);
    auto h = star_histogram(set);
    std::cout << "reviews=" << set.size() << " stars=";
    for (std::size_t i = 0; i < 5; ++i) std::cout << (i ? "," : "") << h.counts[i];
    std::cout << '\n';
  });
}

void setup_filter(CLI::App& app) {
  auto* cmd = app.add_subcommand("filter", "Filter a ReviewSet");
  struct Opts {
    std::string in, out, stars, contains, not_contains;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--in", o->in, "Input ReviewSet")->required();
  cmd->add_option("--out", o->out, "Output ReviewSet")->required();
  cmd->add_option("--stars", o->stars, "Comma-separated star values to keep");
  auto* c = cmd->add_option("--contains", o->contains, "Keep texts containing phrase");
  auto* nc = cmd->add_option("--not-contains", o->not_contains,
                             "Drop texts containing phrase");
  cmd->callback([o, c, nc] {
    ReviewFilter f;
    if (!o->stars.empty()) {
      auto v = parse_stars_list(o->stars);
      f.stars = std::set<Stars>(v.begin(), v.end());
    }
    if (c->count()) f.contains = o->contains;
    if (nc->count()) f.not_contains = o->not_contains;
    auto set = filter_reviews(read_review_set(o->in), f);
    write_review_set(set, o->out);
    std::cout << "reviews=" << set.size() << '\n';
  });
}

// -------------------------------------------------------------- corpus

void setup_corpus(CLI::App& app) {
  auto* corpus = app.add_subcommand("corpus", "Build and transform corpora");
  corpus->require_subcommand(1);

  {
    auto* cmd = corpus->add_subcommand("build", "Meta-wrap reviews into a corpus");
    struct Opts {
      std::string format, in, out;
      std::size_t lines = 0;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--format", o->format, format_arg_help())->required();
    cmd->add_option("--lines", o->lines, "Number of lines")->required();
    add_seed(cmd, o->seed);
    cmd->add_option("--in", o->in, "Input ReviewSet")->required();
    cmd->add_option("--out", o->out, "Corpus output")->required();
    cmd->callback([o] {
      auto c = build_corpus(read_review_set(o->in), parse_format_name(o->format),
                            o->lines, o->seed);
      write_corpus(c, o->out);
      std::cout << "lines=" << c.lines.size() << " format=" << format_name(c.format)
                << '\n';
    });
  }
  {
    auto* cmd = corpus->add_subcommand("mask", "Drop reviews containing a phrase");
    struct Opts {
      std::string in, out, phrase;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Input ReviewSet")->required();
    cmd->add_option("--out", o->out, "Output ReviewSet")->required();
    cmd->add_option("--phrase", o->phrase, "Phrase to mask")->required();
    cmd->callback([o] {
      auto in = read_review_set(o->in);
      auto set = mask(in, o->phrase);
      write_review_set(set, o->out);
      std::cout << "kept=" << set.size() << " removed=" << (in.size() - set.size())
                << '\n';
    });
  }
  {
    auto* cmd = corpus->add_subcommand("balance", "Equal reviews per star");
    struct Opts {
      std::string in, out;
      std::size_t per_star = 0;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Input ReviewSet")->required();
    cmd->add_option("--out", o->out, "Output ReviewSet")->required();
    cmd->add_option("--per-star", o->per_star, "Reviews per star")->required();
    add_seed(cmd, o->seed);
    cmd->callback([o] {
      auto set = balance_by_stars(read_review_set(o->in), o->per_star, o->seed);
      write_review_set(set, o->out);
      std::cout << "reviews=" << set.size() << '\n';
    });
  }
  {
    auto* cmd = corpus->add_subcommand("isolate", "Keep a single star rating");
    struct Opts {
      std::string in, out;
      int star = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Input ReviewSet")->required();
    cmd->add_option("--out", o->out, "Output ReviewSet")->required();
    cmd->add_option("--star", o->star, "Star rating 1..5")->required();
    cmd->callback([o] {
      auto set = isolate_star(read_review_set(o->in), o->star);
      write_review_set(set, o->out);
      std::cout << "reviews=" << set.size() << '\n';
    });
  }
  {
    auto* cmd = corpus->add_subcommand("split", "Train/test split of a corpus");
    struct Opts {
      std::string in, train, test;
      double fraction = 0.8;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Input corpus")->required();
    cmd->add_option("--train-out", o->train, "Training corpus output")->required();
    cmd->add_option("--test-out", o->test, "Test corpus output")->required();
    cmd->add_option("--fraction", o->fraction, "Training fraction")->capture_default_str();
    add_seed(cmd, o->seed);
    cmd->callback([o] {
      auto [train, test] = split(read_corpus(o->in), o->fraction, o->seed);
      write_corpus(train, o->train);
      write_corpus(test, o->test);
      std::cout << "train=" << train.lines.size() << " test=" << test.lines.size()
                << '\n';
    });
  }
}

// -------------------------------------------------------------- lm

void setup_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train-ngram", "Train the n-gram surrogate");
  struct Opts {
    std::string corpus, out;
    int order = 5;
    double alpha = 0.001;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--corpus", o->corpus, "Corpus file")->required();
  cmd->add_option("--order", o->order, "Model order")->capture_default_str();
  cmd->add_option("--alpha", o->alpha, "Additive smoothing")->capture_default_str();
  cmd->add_option("--out", o->out, "Model output")->required();
  cmd->callback([o] {
    auto c = read_corpus(o->corpus);
    c.source = std::string(format_name(c.format)) +
               " lines=" + std::to_string(c.lines.size()) + " file=" + o->corpus;
    auto m = NgramModel::train(c, o->order, o->alpha);
    m.save(o->out);
    std::cout << "order=" << m.order() << " vocabulary=" << m.vocabulary_size()
              << " lines=" << c.lines.size() << '\n';
  });
}

struct GenFlags {
  std::string backend;
  std::size_t n = 1;
  std::size_t max_tokens = kDefaultMaxTokens;
  double temperature = kDefaultTemperature;

  void add(CLI::App* cmd) {
    cmd->add_option("--backend", backend,
                    "ngram:MODEL, replay:REVIEWS, replay-enumerate:REVIEWS or "
                    "remote:URL")
        ->required();
    cmd->add_option("--n", n, "Completions per prompt")->capture_default_str();
    cmd->add_option("--max-tokens", max_tokens, "Token cap")->capture_default_str();
    cmd->add_option("--temperature", temperature, "Sampling temperature")
        ->capture_default_str();
  }
};

void setup_generate(CLI::App& app) {
  auto* cmd = app.add_subcommand("generate", "Generate records from a backend");
  struct Opts {
    GenFlags gen;
    std::string prompt = "review:", out;
    std::uint64_t seed = 0;
    bool completions = false;
  };
  auto o = std::make_shared<Opts>();
  o->gen.add(cmd);
  cmd->add_option("--prompt", o->prompt, "Prompt text")->capture_default_str();
  add_seed(cmd, o->seed);
  cmd->add_option("--out", o->out, "Output file (default stdout)");
  cmd->add_flag("--completions", o->completions,
                "Write bare completions instead of prompt+completion records");
  cmd->callback([o] {
    auto backend = make_backend(o->gen.backend);
    GenerationRequest req{o->prompt, o->gen.n, o->gen.max_tokens,
                          o->gen.temperature, o->seed};
    auto texts = backend->generate(req);
    Output out(o->out);
    for (const auto& t : texts) {
      if (o->completions)
        out.os() << text::collapse_newlines(t) << '\n';
      else
        out.os() << record_text(o->prompt, t, backend->mode()) << '\n';
    }
    out.close(o->out);
  });
}

void setup_health(CLI::App& app) {
  auto* cmd = app.add_subcommand("backend-health", "Query a remote backend");
  auto url = std::make_shared<std::string>();
  cmd->add_option("--url", *url, "Backend base URL")->required();
  cmd->callback([url] {
    RemoteBackend b(*url);
    std::cout << "status=ok model=" << b.health() << '\n';
  });
}

// -------------------------------------------------------------- parse / classify

void setup_parse(CLI::App& app) {
  auto* cmd = app.add_subcommand("parse", "Parse generated records");
  struct Opts {
    std::string in, corpus_format = "review-stars", format = "lines", out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--in", o->in, "Input stream (default stdin)");
  cmd->add_option("--corpus-format", o->corpus_format, format_arg_help())
      ->capture_default_str();
  cmd->add_option("--format", o->format, "Output: lines, csv or table")
      ->capture_default_str();
  cmd->add_option("--out", o->out, "Output file (default stdout)");
  cmd->callback([o] {
    const auto fmt = parse_out_format(o->format);
    const auto report = parse_stream(slurp(o->in), parse_format_name(o->corpus_format));
    Table t;
    t.header = {"status", "stars", "useful", "funny", "cool", "text", "reason"};
    for (const auto& r : report.records) {
      const bool num = r.kind == CorpusFormat::kNumericRecords;
      t.rows.push_back({std::string(status_name(r.status)),
                        r.ok() ? std::to_string(r.stars) : "",
                        r.ok() && num ? std::to_string(r.useful_votes) : "",
                        r.ok() && num ? std::to_string(r.funny_votes) : "",
                        r.ok() && num ? std::to_string(r.cool_votes) : "",
                        r.ok() ? r.text : r.raw, r.reason});
    }
    Output out(o->out);
    if (fmt == OutFormat::kCsv) {
      out.os() << t.to_csv();
    } else if (fmt == OutFormat::kTable) {
      out.os() << t.to_text();
    } else {
      for (const auto& r : t.rows) out.os() << text::join(r, "\t") << '\n';
    }
    out.os() << summary_line(report) << '\n';
    out.close(o->out);
  });
}

void setup_classify(CLI::App& app) {
  auto* cmd = app.add_subcommand("classify", "Lexicon sentiment of parsed records");
  struct Opts {
    LexiconFlags lex;
    std::string in, corpus_format = "review-stars", format = "lines", out;
    bool affect = false;
  };
  auto o = std::make_shared<Opts>();
  o->lex.add(cmd);
  cmd->add_option("--in", o->in, "Record stream (default stdin)");
  cmd->add_option("--corpus-format", o->corpus_format, "review-stars, or 'text' for bare lines")
      ->capture_default_str();
  cmd->add_option("--format", o->format, "Output: lines, csv or table")
      ->capture_default_str();
  cmd->add_option("--out", o->out, "Output file (default stdout)");
  cmd->add_flag("--affect", o->affect, "Also report lexicon affect percentages");
  cmd->callback([o] {
    const auto fmt = parse_out_format(o->format);
    const auto clf = o->lex.classifier();
    const auto data = slurp(o->in);
    std::vector<std::string> texts;
    if (o->corpus_format == "text") {
      for (auto l : text::split_lines(data))
        if (!text::trim(l).empty()) texts.emplace_back(l);
    } else {
      for (auto& p : usable_pairs(parse_stream(data, parse_format_name(o->corpus_format))))
        texts.push_back(std::move(p.first));
    }
    Table t;
    t.header = {"label", "pos_hits", "neg_hits", "text"};
    std::size_t pos = 0;
    for (const auto& s : texts) {
      auto r = clf.classify(s);
      pos += r.label == SentimentLabel::kPositive;
      t.rows.push_back({std::string(label_name(r.label)), std::to_string(r.pos_hits),
                        std::to_string(r.neg_hits), s});
    }
    Output out(o->out);
    if (fmt == OutFormat::kCsv) {
      out.os() << t.to_csv();
    } else if (fmt == OutFormat::kTable) {
      out.os() << t.to_text();
    } else {
      for (const auto& r : t.rows) out.os() << text::join(r, "\t") << '\n';
    }
    if (!texts.empty()) {
      auto sp = split_from_counts(pos, texts.size());
      out.os() << "total=" << texts.size() << " positive=" << text::fixed(sp.pos_pct, 2)
               << "% negative=" << text::fixed(sp.neg_pct, 2) << "%\n";
    } else {
      out.os() << "total=0\n";
    }
    if (o->affect) {
      for (const auto& [name, v] :
           affect_percentages(texts, {clf.positive(), clf.negative()}))
        out.os() << name << "=" << text::fixed(v, 2) << "%\n";
    }
    out.close(o->out);
  });
}

// -------------------------------------------------------------- stats

void setup_stats(CLI::App& app) {
  auto* stats = app.add_subcommand("stats", "Statistics over records");
  stats->require_subcommand(1);

  {
    auto* cmd = stats->add_subcommand("pearson", "Pearson correlation of two vectors");
    struct Opts {
      std::string x, y;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--x", o->x, "Comma-separated values")->required();
    cmd->add_option("--y", o->y, "Comma-separated values")->required();
    cmd->callback([o] {
      std::cout << text::exact(pearson(parse_reals(o->x), parse_reals(o->y))) << '\n';
    });
  }
  {
    auto* cmd = stats->add_subcommand(
        "hist", "Star histogram of a record stream, optionally against a ReviewSet");
    struct Opts {
      std::string in, reference, corpus_format = "review-stars", format = "table", out;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--in", o->in, "Record stream (default stdin)");
    cmd->add_option("--reference", o->reference, "Ground-truth ReviewSet");
    cmd->add_option("--corpus-format", o->corpus_format, format_arg_help())
        ->capture_default_str();
    cmd->add_option("--format", o->format, "Output: table, csv or lines")
        ->capture_default_str();
    cmd->add_option("--out", o->out, "Output file (default stdout)");
    cmd->callback([o] {
      const auto fmt = parse_out_format(o->format);
      auto report = parse_stream(slurp(o->in), parse_format_name(o->corpus_format));
      StarHistogram h;
      for (const auto& r : report.records)
        if (r.ok()) h.add(r.stars);
      Table t;
      t.title = "Star distribution";
      t.header = {"Stars", "count", "%"};
      std::optional<StarHistogram> ref;
      if (!o->reference.empty()) {
        ref = star_histogram(read_review_set(o->reference));
        t.header.insert(t.header.end(), {"reference", "reference %"});
      }
      for (std::size_t s = 0; s < 5; ++s) {
        std::vector<std::string> row{std::to_string(s + 1), std::to_string(h.counts[s]),
                                     text::fixed(h.percentages()[s], 2)};
        if (ref) {
          row.push_back(std::to_string(ref->counts[s]));
          row.push_back(text::fixed(ref->percentages()[s], 2));
        }
        t.rows.push_back(std::move(row));
      }
      t.notes.push_back(summary_line(report));
      if (ref) {
        try {
          t.notes.push_back("pearson=" + text::fixed(pearson(h, *ref), 6));
        } catch (const ArgumentError& e) {
          t.notes.push_back(std::string("pearson undefined: ") + e.what());
        }
      }
      emit_table(t, fmt, o->out);
    });
  }
  {
    auto* cmd = stats->add_subcommand("l2", "Resampled l2 error baseline");
    struct Opts {
      std::size_t positives = 0, total = 0, size = 0, repeats = 1000;
      double reference_pos = -1.0;
      bool with_replacement = false;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--positives", o->positives, "Positive items in population")
        ->required();
    cmd->add_option("--total", o->total, "Population size")->required();
    cmd->add_option("--size", o->size, "Sample size")->required();
    cmd->add_option("--repeats", o->repeats, "Resampling repeats")->capture_default_str();
    cmd->add_option("--reference-pos", o->reference_pos,
                    "Reference POS % (default: the population split)");
    cmd->add_flag("--with-replacement", o->with_replacement, "Sample with replacement");
    add_seed(cmd, o->seed);
    cmd->callback([o] {
      auto pop = label_population(o->positives, o->total);
      auto ref = split_from_counts(o->positives, o->total);
      if (o->reference_pos >= 0.0) ref = {o->reference_pos, 100.0 - o->reference_pos};
      auto rep = l2_resample_error(pop, ref, o->size, o->repeats, !o->with_replacement,
                                   o->seed, g_threads);
      std::cout << "size=" << rep.sample_size << " repeats=" << rep.repeats
                << " pos=" << text::fixed(rep.mean_split.pos_pct, 2)
                << "% neg=" << text::fixed(rep.mean_split.neg_pct, 2)
                << "% l2=" << text::fixed(rep.l2_error, 2) << "%\n";
    });
  }
  {
    auto* cmd = stats->add_subcommand("avg-stars", "Mean stars per sentiment label");
    struct Opts {
      LexiconFlags lex;
      std::string in, reference, format = "table", out;
    };
    auto o = std::make_shared<Opts>();
    o->lex.add(cmd);
    cmd->add_option("--in", o->in, "Review-stars record stream (default stdin)");
    cmd->add_option("--reference", o->reference, "Ground-truth ReviewSet");
    cmd->add_option("--format", o->format, "Output: table, csv or lines")
        ->capture_default_str();
    cmd->add_option("--out", o->out, "Output file (default stdout)");
    cmd->callback([o] {
      const auto fmt = parse_out_format(o->format);
      const auto clf = o->lex.classifier();
      auto pairs = usable_pairs(parse_stream(slurp(o->in), CorpusFormat::kReviewStars));
      auto gen = avg_stars_by_sentiment(pairs, clf);
      std::map<SentimentLabel, double> gt;
      if (!o->reference.empty()) {
        std::vector<TextStars> ref;
        for (const auto& r : read_review_set(o->reference)) ref.emplace_back(r.text, r.stars);
        gt = avg_stars_by_sentiment(ref, clf);
      }
      Table t;
      t.title = "Star ratings for Sentiment";
      t.header = {"Sentiment", "Generated"};
      if (!o->reference.empty())
        t.header.insert(t.header.end(), {"Ground truth", "% difference"});
      for (auto label : {SentimentLabel::kPositive, SentimentLabel::kNegative}) {
        std::vector<std::string> row{std::string(label_name(label))};
        auto g = gen.find(label);
        row.push_back(g == gen.end() ? "-" : text::fixed(g->second, 2));
        if (!o->reference.empty()) {
          auto r = gt.find(label);
          row.push_back(r == gt.end() ? "-" : text::fixed(r->second, 2));
          row.push_back(g == gen.end() || r == gt.end()
                            ? "-"
                            : text::fixed(pct_difference(g->second, r->second), 2) + "%");
        }
        t.rows.push_back(std::move(row));
      }
      emit_table(t, fmt, o->out);
    });
  }
}

// -------------------------------------------------------------- experiment

void setup_experiment(CLI::App& app) {
  auto* exp = app.add_subcommand("experiment", "Experiment store");
  exp->require_subcommand(1);

  struct CreateFlags {
    std::string description, model_name, reference, timestamp, label;
    std::vector<std::string> probes, params;
  };
  auto add_create = [](CLI::App* cmd, CreateFlags& f) {
    cmd->add_option("--description", f.description, "Free-form description");
    cmd->add_option("--model-name", f.model_name, "Model name");
    cmd->add_option("--probe", f.probes, "Probe prompt (repeatable)");
    cmd->add_option("--param", f.params, "KEY=VALUE hyperparameter (repeatable)");
    cmd->add_option("--reference", f.reference,
                    "Ground-truth ReviewSet whose statistics reports compare against");
    cmd->add_option("--label", f.label, "Short name used in report rows");
    cmd->add_option("--timestamp", f.timestamp,
                    "created_at override (default: SOURCE_DATE_EPOCH or now)");
  };
  auto hyper = [](const CreateFlags& f, const LexiconFlags& lex) {
    std::map<std::string, std::string> hp;
    for (const auto& p : f.params) {
      auto eq = p.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ArgumentError("--param must be KEY=VALUE: " + p);
      hp[p.substr(0, eq)] = p.substr(eq + 1);
    }
    if (!f.reference.empty()) {
      auto ref = reference_hyperparams(read_review_set(f.reference), lex.classifier());
      hp.insert(ref.begin(), ref.end());
    }
    if (!f.label.empty()) hp["label"] = f.label;
    return hp;
  };
  auto do_create = [hyper](StoreWriter& w, const CreateFlags& f, const LexiconFlags& lex,
                           std::uint64_t seed, const std::string& model_name) {
    return w.create(f.description, f.model_name.empty() ? model_name : f.model_name,
                    f.probes, seed, hyper(f, lex),
                    f.timestamp.empty() ? utc_timestamp() : f.timestamp);
  };

  {
    auto* cmd = exp->add_subcommand("create", "Record a new experiment");
    struct Opts {
      std::string store;
      CreateFlags create;
      LexiconFlags lex;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--store", o->store, "Store directory")->required();
    add_create(cmd, o->create);
    o->lex.add(cmd);
    add_seed(cmd, o->seed);
    cmd->callback([o, do_create] {
      StoreWriter w{Store(o->store)};
      auto rec = do_create(w, o->create, o->lex, o->seed, "");
      std::cout << rec.id << '\n';
    });
  }
  {
    auto* cmd = exp->add_subcommand(
        "run", "Run the probe suite of an experiment (creating it unless --id is given)");
    struct Opts {
      std::string store, id, corpus_format = "review-stars";
      CreateFlags create;
      LexiconFlags lex;
      GenFlags gen;
      std::uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--store", o->store, "Store directory")->required();
    auto* id_opt = cmd->add_option("--id", o->id, "Existing experiment id");
    add_create(cmd, o->create);
    o->lex.add(cmd);
    o->gen.add(cmd);
    cmd->add_option("--corpus-format", o->corpus_format, format_arg_help())
        ->capture_default_str();
    auto* seed_opt = cmd->add_option("--seed", o->seed, "Experiment seed (new experiments)");
    id_opt->excludes(seed_opt);
    cmd->callback([o, id_opt, seed_opt, do_create] {
      if (!id_opt->count() && !seed_opt->count())
        throw ArgumentError("experiment run needs --id or --seed");
      auto backend = make_backend(o->gen.backend);
      const auto clf = o->lex.classifier();
      StoreWriter w{Store(o->store)};
      ExperimentRecord rec;
      if (id_opt->count()) {
        rec = w.store().experiment(o->id);
      } else {
        rec = do_create(w, o->create, o->lex, o->seed, backend->name());
      }
      if (auto* ng = dynamic_cast<const NgramBackend*>(backend.get())) {
        rec.hyperparams["model_source"] = ng->model().source();
        if (auto n = corpus_lines_of(ng->model().source()))
          rec.hyperparams["corpus_lines"] = std::to_string(n);
        w.update(rec);
      }
      SuiteOptions so;
      so.per_probe_n = o->gen.n;
      so.max_tokens = o->gen.max_tokens;
      so.temperature = o->gen.temperature;
      so.format = parse_format_name(o->corpus_format);
      auto summary = run_probe_suite(w, rec.id, *backend, clf, so);
      std::cout << "experiment=" << summary.experiment_id << '\n';
      for (std::size_t i = 0; i < summary.probes.size(); ++i) {
        const auto& p = summary.probes[i];
        std::cout << "probe[" << i << "] \"" << p.probe << "\" total=" << p.total
                  << " malformed=" << p.malformed
                  << " error=" << text::fixed(100.0 * p.error_rate, 2) << "%";
        if (p.split)
          std::cout << " pos=" << text::fixed(p.split->pos_pct, 2)
                    << "% neg=" << text::fixed(p.split->neg_pct, 2) << "%";
        std::cout << '\n';
      }
    });
  }
  {
    auto* cmd = exp->add_subcommand("report", "Render a report table");
    struct Opts {
      std::string store, table, format = "table", out;
      std::vector<std::string> ids;
      bool include_partial = false;
      std::vector<std::size_t> sizes{26, 18, 8};
      std::size_t repeats = 1000;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--store", o->store, "Store directory")->required();
    cmd->add_option("--id", o->ids, "Experiment ids (default: all)");
    cmd->add_option("--table", o->table, "T1, T2, T7 or HIST")->required();
    cmd->add_option("--format", o->format, "Output: table, csv or lines")
        ->capture_default_str();
    cmd->add_option("--out", o->out, "Output file (default stdout)");
    cmd->add_flag("--include-partial", o->include_partial,
                  "Include experiments whose suite did not finish");
    cmd->add_option("--baseline-size", o->sizes, "T7 baseline sample sizes")
        ->capture_default_str();
    cmd->add_option("--baseline-repeats", o->repeats, "T7 resampling repeats")
        ->capture_default_str();
    cmd->callback([o] {
      const auto fmt = parse_out_format(o->format);
      ReportOptions ro;
      ro.include_partial = o->include_partial;
      ro.baseline_sizes = o->sizes;
      ro.baseline_repeats = o->repeats;
      ro.threads = g_threads;
      emit_table(report(Store(o->store), o->ids, parse_report_kind(o->table), ro), fmt,
                 o->out);
    });
  }
}

CLI::App* deepest(CLI::App* app) {
  for (auto* sub : app->get_subcommands()) return deepest(sub);
  return app;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmpoll: poll a language model trained on review corpora"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--threads", g_threads, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  setup_ingest(app);
  setup_synth(app);
  setup_filter(app);
  setup_corpus(app);
  setup_train(app);
  setup_generate(app);
  setup_parse(app);
  setup_classify(app);
  setup_stats(app);
  setup_experiment(app);
  setup_health(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << deepest(&app)->help();
    return 1;
  } catch (const lmpoll::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const lmpoll::BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return 3;
  } catch (const lmpoll::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

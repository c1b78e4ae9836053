// Copyright 2026 The editintent Authors.
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

#include "cli.h"

#include <csignal>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "editintent/annotation_service.h"
#include "editintent/baseline.h"
#include "editintent/corpus.h"
#include "editintent/evaluation.h"
#include "editintent/random.h"
#include "editintent/revision_store.h"

namespace editintent::cli {
namespace {

constexpr char kConfigEnv[] = "EDITINTENT_CONFIG";

// Raised for a missing input file; reported with exit code 1.
class MissingFile : public Error {
 public:
  explicit MissingFile(const std::string& path) : Error("no such file: " + path) {}
};

void RequireFile(const std::string& path) {
  if (path != "-" && !std::filesystem::exists(path)) throw MissingFile(path);
}

// Input stream for a path, "-" meaning stdin.
class Input {
 public:
  Input(const std::string& path, std::istream& stdin_stream) {
    if (path == "-") {
      stream_ = &stdin_stream;
      return;
    }
    RequireFile(path);
    file_.open(path, std::ios::binary);
    if (!file_) throw Error("cannot open " + path);
    stream_ = &file_;
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_ = nullptr;
};

// Output stream for a path, empty or "-" meaning stdout.
class Output {
 public:
  Output(const std::string& path, std::ostream& stdout_stream) : path_(path) {
    if (path.empty() || path == "-") {
      stream_ = &stdout_stream;
      return;
    }
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error("cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void Close() {
    stream_->flush();
    if (!*stream_) throw Error("write failed: " + (path_.empty() ? "stdout" : path_));
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

using PageSource = std::function<ParseStats(const PageSink&)>;

struct SourceFlags {
  std::string in;
  std::string format;  // xml, jsonl or empty for by-extension
  std::string store;
  std::string assessments;
};

void AddSourceFlags(CLI::App* app, SourceFlags& flags) {
  app->add_option("--in", flags.in, "Revisions: XML dump or JSONL file, '-' for stdin");
  app->add_option("--format", flags.format, "Input format of --in")
      ->check(CLI::IsMember({"xml", "jsonl"}));
  app->add_option("--store", flags.store, "Read revisions from a revision store directory");
  app->add_option("--assessments", flags.assessments,
                  "JSONL page assessments (page_id, quality_class)");
}

PageSource MakeSource(const SourceFlags& flags, std::istream& stdin_stream) {
  if (flags.in.empty() == flags.store.empty()) {
    throw CLI::ValidationError("exactly one of --in or --store is required");
  }
  std::optional<Assessments> assessments;
  if (!flags.assessments.empty()) {
    Input in(flags.assessments, stdin_stream);
    assessments = ParseAssessments(in.get());
  }
  auto with_assessments = [assessments](const PageSink& sink) -> PageSink {
    if (!assessments) return sink;
    return [assessments, sink](std::vector<Revision>&& page) {
      ApplyAssessments(*assessments, page);
      sink(std::move(page));
    };
  };
  if (!flags.store.empty()) {
    if (!std::filesystem::is_directory(flags.store)) throw MissingFile(flags.store);
    const std::string dir = flags.store;
    return [dir, with_assessments](const PageSink& sink) {
      RevisionStore store(dir);
      const PageSink target = with_assessments(sink);
      ParseStats stats;
      for (int64_t id : store.PageIds()) {
        std::vector<Revision> page = store.Scan(id);
        ++stats.pages;
        stats.revisions += static_cast<int64_t>(page.size());
        target(std::move(page));
      }
      return stats;
    };
  }
  RequireFile(flags.in);
  std::string format = flags.format;
  if (format.empty()) {
    const std::string ext = std::filesystem::path(flags.in).extension().string();
    format = ext == ".xml" ? "xml" : "jsonl";
  }
  const std::string path = flags.in;
  std::istream* stdin_ptr = &stdin_stream;
  return [path, format, stdin_ptr, with_assessments](const PageSink& sink) {
    Input in(path, *stdin_ptr);
    const PageSink target = with_assessments(sink);
    return format == "xml" ? ParseDump(in.get(), target) : ParseJsonl(in.get(), target);
  };
}

// Applies `fn` to every page on `jobs` worker threads and returns results
// keyed by page_id, so output order is independent of the job count.
template <typename Result>
std::map<int64_t, Result> ProcessPages(
    const PageSource& source, int jobs,
    const std::function<Result(std::vector<Revision>&&)>& fn,
    const std::function<void(Result&, Result&&)>& merge, ParseStats* stats) {
  std::map<int64_t, Result> results;
  auto store = [&](int64_t id, Result&& r) {
    auto it = results.find(id);
    if (it == results.end()) {
      results.emplace(id, std::move(r));
    } else {
      merge(it->second, std::move(r));
    }
  };
  if (jobs <= 1) {
    const ParseStats s = source([&](std::vector<Revision>&& page) {
      if (page.empty()) return;
      const int64_t id = page.front().page_id;
      store(id, fn(std::move(page)));
    });
    if (stats) *stats = s;
    return results;
  }

  std::mutex mu;
  std::condition_variable has_work;
  std::condition_variable has_room;
  std::deque<std::vector<Revision>> queue;
  bool closed = false;
  std::exception_ptr failure;
  const size_t max_queue = static_cast<size_t>(jobs) * 2;

  auto worker = [&] {
    while (true) {
      std::vector<Revision> page;
      {
        std::unique_lock lock(mu);
        has_work.wait(lock, [&] { return closed || !queue.empty(); });
        if (queue.empty()) return;
        page = std::move(queue.front());
        queue.pop_front();
        has_room.notify_one();
      }
      const int64_t id = page.front().page_id;
      try {
        Result r = fn(std::move(page));
        std::lock_guard lock(mu);
        store(id, std::move(r));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
  auto shutdown = [&] {
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    has_work.notify_all();
    for (auto& t : threads) t.join();
  };
  try {
    const ParseStats s = source([&](std::vector<Revision>&& page) {
      if (page.empty()) return;
      std::unique_lock lock(mu);
      has_room.wait(lock, [&] { return queue.size() < max_queue || failure; });
      if (failure) return;
      queue.push_back(std::move(page));
      has_work.notify_one();
    });
    if (stats) *stats = s;
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::optional<Category> CategoryFlag(const std::string& value) {
  if (value.empty()) return std::nullopt;
  auto c = ParseCategory(value);
  if (!c) throw CLI::ValidationError("--category", "unknown category '" + value + "'");
  return c;
}

auto CategoryCheck() {
  return CLI::IsMember({"citation", "point_of_view", "clarification"});
}

void PrintJsonLine(std::ostream& out, const nlohmann::json& j) { out << j.dump() << '\n'; }

// ---- ingest ----

struct IngestFlags {
  SourceFlags source;
  std::string store;
  std::string api;
  std::vector<std::string> titles;
  std::string titles_file;
  int limit = 50;
};

int RunIngest(const IngestFlags& f, std::istream& in, std::ostream& out) {
  if (f.store.empty()) throw CLI::ValidationError("--store is required");
  if (f.api.empty() == f.source.in.empty()) {
    throw CLI::ValidationError("exactly one of --in or --api is required");
  }
  RevisionStore store(f.store);
  nlohmann::json report;
  if (!f.api.empty()) {
    std::vector<std::string> titles = f.titles;
    if (!f.titles_file.empty()) {
      Input t(f.titles_file, in);
      std::string line;
      while (std::getline(t.get(), line)) {
        if (!line.empty()) titles.push_back(line);
      }
    }
    if (titles.empty()) throw CLI::ValidationError("--api needs --title or --titles");
    const FetchReport r = FetchRevisions(f.api, titles, f.limit, store);
    nlohmann::json errors = nlohmann::json::array();
    for (const FetchError& e : r.errors) {
      errors.push_back({{"title", e.title}, {"message", e.message}});
    }
    report = {{"stored", r.stored}, {"duplicates", r.duplicates}, {"errors", errors}};
    PrintJsonLine(out, report);
    return r.errors.empty() ? 0 : 1;
  }
  SourceFlags source = f.source;
  source.store.clear();
  int64_t stored = 0;
  int64_t duplicates = 0;
  const ParseStats stats = MakeSource(source, in)([&](std::vector<Revision>&& page) {
    for (const Revision& rev : page) (store.Put(rev) ? stored : duplicates) += 1;
  });
  report = {{"pages", stats.pages},
            {"revisions", stats.revisions},
            {"skipped_missing_text", stats.skipped_missing_text},
            {"recomputed_sha1", stats.recomputed_sha1},
            {"stored", stored},
            {"duplicates", duplicates}};
  PrintJsonLine(out, report);
  return 0;
}

// ---- label ----

struct LabelFlags {
  SourceFlags source;
  std::string category;
  bool strict = false;
  bool explain = false;
  bool no_revert_filter = false;
  bool keep_reverting = false;
  int jobs = 1;
  std::string emit_diffs;
  std::string out;
  std::string stats;
};

struct LabelPageResult {
  std::string sentences;
  std::string explain;
  std::string diffs;
  ExtractStats stats;
};

int RunLabel(const LabelFlags& f, std::istream& in, std::ostream& out, std::ostream& err) {
  ExtractOptions options;
  options.rules.mode = f.strict ? RegexMode::kStrict : RegexMode::kDefault;
  options.filter_reverts = !f.no_revert_filter;
  options.reverts.exclude_reverting = !f.keep_reverting;
  options.category = CategoryFlag(f.category);
  const PageSource source = MakeSource(f.source, in);
  const bool want_diffs = !f.emit_diffs.empty();
  const bool explain = f.explain;

  std::function<LabelPageResult(std::vector<Revision>&&)> fn =
      [&](std::vector<Revision>&& page) {
        LabelPageResult r;
        std::vector<LabeledEdit> edits = LabelPageEdits(page, options, &r.stats);
        for (const LabeledEdit& e : edits) {
          if (explain) {
            nlohmann::json j = RuleVerdictToJson(e.verdict);
            j["page_id"] = e.revision->page_id;
            j["rev_id"] = e.revision->rev_id;
            j["parent_id"] = e.parent->rev_id;
            r.explain += j.dump() + "\n";
          }
          if (want_diffs) {
            nlohmann::json labels = nlohmann::json::array();
            for (Category c : e.verdict.labels) labels.push_back(std::string(CategoryName(c)));
            r.diffs += nlohmann::json{{"diff_id", e.verdict.diff_ref},
                                      {"page_id", e.revision->page_id},
                                      {"diff", EditDiffToJson(e.diff)},
                                      {"rule_labels", labels}}
                           .dump() +
                       "\n";
          }
        }
        for (const LabeledSentence& s : PositivesFromEdits(edits, options, &r.stats)) {
          r.sentences += LabeledSentenceToJson(s).dump() + "\n";
        }
        return r;
      };
  std::function<void(LabelPageResult&, LabelPageResult&&)> merge =
      [](LabelPageResult& a, LabelPageResult&& b) {
        a.sentences += b.sentences;
        a.explain += b.explain;
        a.diffs += b.diffs;
        a.stats.edits += b.stats.edits;
        a.stats.excluded_reverts += b.stats.excluded_reverts;
        a.stats.duplicates += b.stats.duplicates;
        a.stats.empty_after_strip += b.stats.empty_after_strip;
      };
  ParseStats parse_stats;
  const auto results =
      ProcessPages<LabelPageResult>(source, std::max(1, f.jobs), fn, merge, &parse_stats);

  Output main_out(f.out, out);
  std::optional<Output> diff_out;
  if (want_diffs) diff_out.emplace(f.emit_diffs, out);
  ExtractStats total;
  for (const auto& [id, r] : results) {
    main_out.get() << (explain ? r.explain : r.sentences);
    if (diff_out) diff_out->get() << r.diffs;
    total.edits += r.stats.edits;
    total.excluded_reverts += r.stats.excluded_reverts;
  }
  main_out.Close();
  if (diff_out) diff_out->Close();
  if (!f.stats.empty()) {
    Output s(f.stats, err);
    PrintJsonLine(s.get(), {{"pages", parse_stats.pages},
                            {"revisions", parse_stats.revisions},
                            {"skipped_missing_text", parse_stats.skipped_missing_text},
                            {"edits", total.edits},
                            {"excluded_reverts", total.excluded_reverts}});
    s.Close();
  }
  return 0;
}

// ---- negatives ----

struct NegativesFlags {
  SourceFlags source;
  std::string category;
  bool strict = false;
  int jobs = 1;
  std::string out;
};

int RunNegatives(const NegativesFlags& f, std::istream& in, std::ostream& out) {
  const std::optional<Category> only = CategoryFlag(f.category);
  NegativeOptions options;
  options.mode = f.strict ? RegexMode::kStrict : RegexMode::kDefault;
  const PageSource source = MakeSource(f.source, in);
  std::function<std::string(std::vector<Revision>&&)> fn = [&](std::vector<Revision>&& page) {
    std::string lines;
    const Revision& latest = page.back();
    if (latest.quality_class != QualityClass::kFA) return lines;
    for (Category c : kAllCategories) {
      if (only && *only != c) continue;
      for (const LabeledSentence& s : ExtractNegativeSentences(latest, c, options)) {
        lines += LabeledSentenceToJson(s).dump() + "\n";
      }
    }
    return lines;
  };
  std::function<void(std::string&, std::string&&)> merge = [](std::string& a, std::string&& b) {
    a += b;
  };
  const auto results = ProcessPages<std::string>(source, std::max(1, f.jobs), fn, merge, nullptr);
  Output o(f.out, out);
  for (const auto& [id, lines] : results) o.get() << lines;
  o.Close();
  return 0;
}

// ---- corpus ----

struct CorpusFlags {
  std::string positives;
  std::string negatives;
  std::string category;
  uint64_t seed = 0;
  std::string out;
};

std::vector<LabeledSentence> ReadSentencesFrom(const std::string& path, std::istream& in) {
  Input input(path, in);
  return ReadLabeledSentences(input.get(), path == "-" ? "<stdin>" : path);
}

int RunCorpusBuild(const CorpusFlags& f, std::istream& in, std::ostream& out) {
  if (f.positives == "-" && f.negatives == "-") {
    throw CLI::ValidationError("only one of --positives/--negatives can read stdin");
  }
  const std::optional<Category> only = CategoryFlag(f.category);
  std::vector<LabeledSentence> pos = ReadSentencesFrom(f.positives, in);
  std::vector<LabeledSentence> neg = ReadSentencesFrom(f.negatives, in);
  if (only) {
    std::erase_if(pos, [&](const LabeledSentence& s) { return s.category != *only; });
    std::erase_if(neg, [&](const LabeledSentence& s) { return s.category != *only; });
  }
  SplitStats stats;
  const CorpusSplit split = BuildSplits(pos, neg, f.seed, &stats);
  ExportCorpus(split, f.out);
  PrintJsonLine(out, {{"train", split.train.size()},
                      {"validation", split.validation.size()},
                      {"test", split.test.size()},
                      {"conflicts_dropped", stats.conflicts_dropped},
                      {"downsampled", stats.downsampled},
                      {"seed", f.seed}});
  return 0;
}

// ---- sample ----

struct SampleFlags {
  std::string diffs;
  uint64_t seed = 0;
  std::string out;
  size_t pov = 100;
  size_t clarification = 100;
  size_t remainder = 800;
  bool backfill = false;
  std::string practice;
};

int RunSample(const SampleFlags& f, std::istream& in, std::ostream& out) {
  Input input(f.diffs, in);
  std::vector<SampleEntry> entries;
  std::string line;
  size_t number = 0;
  while (std::getline(input.get(), line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      SampleEntry e;
      e.diff_id = j.at("diff_id").get<std::string>();
      e.diff = EditDiffFromJson(j.at("diff"));
      for (const auto& l : j.at("rule_labels")) {
        auto c = ParseCategory(l.get<std::string>());
        if (!c) throw ParseError("bad category " + l.dump());
        e.rule_labels.insert(*c);
      }
      entries.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw ParseError(f.diffs + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  std::vector<PoolItem> pool;
  std::map<std::string, size_t> by_id;
  for (size_t i = 0; i < entries.size(); ++i) {
    pool.push_back({entries[i].diff_id, entries[i].rule_labels});
    by_id[entries[i].diff_id] = i;
  }
  SampleOptions options;
  options.quotas = {f.pov, f.clarification, f.remainder};
  options.backfill = f.backfill;
  const std::vector<SampledDiff> chosen = StratifiedSample(pool, f.seed, options);

  std::set<std::string> chosen_ids;
  for (const SampledDiff& d : chosen) chosen_ids.insert(d.diff_id);
  std::string practice = f.practice;
  if (practice.empty()) {
    std::vector<std::string> rest;
    for (const auto& [id, i] : by_id) {
      if (!chosen_ids.count(id)) rest.push_back(id);
    }
    if (rest.empty()) throw InvalidArgument("no diff left over for the practice item");
    Rng rng(f.seed ^ 0x9a7c1ce5ULL);
    practice = rest[rng.Uniform(rest.size())];
  }
  if (!by_id.count(practice)) throw InvalidArgument("practice diff not in pool: " + practice);
  if (chosen_ids.count(practice)) {
    throw InvalidArgument("practice diff is part of the sample: " + practice);
  }

  AnnotationSample sample;
  sample.practice = entries[by_id[practice]];
  for (const SampledDiff& d : chosen) sample.items.push_back(entries[by_id[d.diff_id]]);
  nlohmann::json j = AnnotationSampleToJson(sample);
  for (size_t i = 0; i < chosen.size(); ++i) {
    j["items"][i]["stratum"] = std::string(StratumName(chosen[i].stratum));
  }
  Output o(f.out, out);
  o.get() << j.dump() << '\n';
  o.Close();
  return 0;
}

// ---- serve ----

struct ServeFlags {
  std::string config;
  std::string listen;
  std::string sample;
  std::string log;
  int cap = 0;
  std::optional<uint64_t> seed;
};

AnnotationServer* g_server = nullptr;

void StopOnSignal(int) {
  if (g_server) g_server->Stop();
}

int RunServe(const ServeFlags& f, std::ostream& out, std::ostream& err) {
  ServerConfig config;
  std::string config_path = f.config;
  if (config_path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) config_path = env;
  }
  if (!config_path.empty()) {
    RequireFile(config_path);
    config = LoadServerConfig(config_path);
  }
  if (!f.listen.empty()) {
    config = [&] {
      ServerConfig c = ParseServerConfig("listen = " + f.listen);
      ServerConfig merged = config;
      merged.host = c.host;
      merged.port = c.port;
      return merged;
    }();
  }
  if (!f.sample.empty()) config.sample = f.sample;
  if (!f.log.empty()) config.log = f.log;
  if (f.cap > 0) config.cap = f.cap;
  if (f.seed) config.seed = *f.seed;
  if (config.sample.empty()) throw CLI::ValidationError("a sample file is required");
  if (config.log.empty()) throw CLI::ValidationError("a label log path is required");
  RequireFile(config.sample.string());

  ServiceConfig service_config;
  service_config.cap = config.cap;
  service_config.seed = config.seed;
  service_config.log_path = config.log;
  AnnotationService service(LoadAnnotationSample(config.sample), service_config);
  AnnotationServer server(service);
  int port = config.port;
  if (port == 0) {
    port = server.BindToAnyPort(config.host);
    if (port < 0) throw Error("cannot bind " + config.host);
  } else if (!server.Bind(config.host, port)) {
    throw Error("cannot bind " + config.host + ":" + std::to_string(port));
  }
  out << "listening on " << config.host << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, StopOnSignal);
  std::signal(SIGTERM, StopOnSignal);
  const bool ok = server.ListenAfterBind();
  g_server = nullptr;
  if (!ok) err << "editintent: server stopped with an error\n";
  return ok ? 0 : 1;
}

// ---- evaluate ----

struct EvaluateFlags {
  std::string log;
  std::string sample;
  size_t min_annotators = 3;
  std::string model;
  std::string test;
  double threshold = 0.5;
  std::string format = "json";
};

int RunEvaluate(const EvaluateFlags& f, std::istream& in, std::ostream& out) {
  const bool study = !f.log.empty() || !f.sample.empty();
  const bool model = !f.model.empty() || !f.test.empty();
  if (study == model) {
    throw CLI::ValidationError("use either --log with --sample, or --model with --test");
  }
  if (study) {
    if (f.log.empty() || f.sample.empty()) {
      throw CLI::ValidationError("--log and --sample must be given together");
    }
    RequireFile(f.log);
    RequireFile(f.sample);
    const std::vector<AnnotationRecord> records = ReadAnnotationLog(f.log);
    const AnnotationSample sample = LoadAnnotationSample(f.sample);
    RuleLabels rules;
    for (const SampleEntry& e : sample.items) rules[e.diff_id] = e.rule_labels;
    const StudyReport report = BuildStudyReport(records, rules, f.min_annotators);
    if (f.format == "table") {
      out << FormatStudyReport(report);
    } else {
      out << StudyReportToJson(report).dump(2) << '\n';
    }
    return 0;
  }
  if (f.model.empty() || f.test.empty()) {
    throw CLI::ValidationError("--model and --test must be given together");
  }
  RequireFile(f.model);
  RequireFile(f.test);
  const Model m = LoadModel(f.model);
  std::vector<LabeledSentence> test;
  if (std::filesystem::is_directory(f.test)) {
    test = ImportCorpus(f.test).test;
  } else {
    test = ReadSentencesFrom(f.test, in);
  }
  const ModelMetrics metrics = EvaluateModel(m, test, f.threshold);
  nlohmann::json j = ModelMetricsToJson(metrics);
  j["category"] = std::string(CategoryName(m.category));
  j["threshold"] = f.threshold;
  out << j.dump(2) << '\n';
  return 0;
}

// ---- train-baseline / predict ----

struct TrainFlags {
  std::string corpus;
  std::string out;
  int epochs = 10;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  uint64_t seed = 0;
};

int RunTrain(const TrainFlags& f, std::ostream& out) {
  if (!std::filesystem::is_directory(f.corpus)) throw MissingFile(f.corpus);
  const CorpusSplit split = ImportCorpus(f.corpus);
  TrainOptions options;
  options.epochs = f.epochs;
  options.learning_rate = f.learning_rate;
  options.l2 = f.l2;
  options.seed = f.seed;
  const TrainResult result = Train(split, options);
  SaveModel(result.model, f.out);
  for (const EpochStats& e : result.history) {
    nlohmann::json j = {{"epoch", e.epoch},
                        {"learning_rate", e.learning_rate},
                        {"train_loss", e.train_loss},
                        {"accepted", e.accepted}};
    j["validation_loss"] =
        e.validation_loss ? nlohmann::json(*e.validation_loss) : nlohmann::json(nullptr);
    PrintJsonLine(out, j);
  }
  return 0;
}

struct PredictFlags {
  std::string model;
  std::string in = "-";
};

int RunPredict(const PredictFlags& f, std::istream& in, std::ostream& out) {
  RequireFile(f.model);
  const Model m = LoadModel(f.model);
  Input input(f.in, in);
  std::string line;
  while (std::getline(input.get(), line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    PrintJsonLine(out, {{"text", line}, {"probability", Predict(m, line)}});
  }
  return 0;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Weak-supervision labeling of wiki edit intent", "editintent"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  IngestFlags ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Load revisions into a revision store");
  ingest_cmd->add_option("--in", ingest.source.in, "XML dump or JSONL file, '-' for stdin");
  ingest_cmd->add_option("--format", ingest.source.format)->check(CLI::IsMember({"xml", "jsonl"}));
  ingest_cmd->add_option("--assessments", ingest.source.assessments, "JSONL page assessments");
  ingest_cmd->add_option("--store", ingest.store, "Store directory (created if absent)");
  ingest_cmd->add_option("--api", ingest.api, "MediaWiki api.php URL to fetch from");
  ingest_cmd->add_option("--title", ingest.titles, "Page title to fetch (repeatable)");
  ingest_cmd->add_option("--titles", ingest.titles_file, "File with one title per line");
  ingest_cmd->add_option("--limit", ingest.limit, "Revisions per title")->check(CLI::PositiveNumber);

  LabelFlags label;
  CLI::App* label_cmd = app.add_subcommand("label", "Label edits and emit positive sentences");
  AddSourceFlags(label_cmd, label.source);
  label_cmd->add_option("--category", label.category, "Only emit this category")
      ->check(CategoryCheck());
  label_cmd->add_flag("--strict", label.strict, "Use the original literal patterns");
  label_cmd->add_flag("--explain", label.explain, "Emit per-edit verdicts with clause traces");
  label_cmd->add_flag("--no-revert-filter", label.no_revert_filter, "Label reverted edits too");
  label_cmd->add_flag("--keep-reverting", label.keep_reverting,
                      "Label reverting edits (reverted ones stay excluded)");
  label_cmd->add_option("--jobs", label.jobs, "Worker threads")->check(CLI::PositiveNumber);
  label_cmd->add_option("--emit-diffs", label.emit_diffs, "Write labeled diffs as JSONL here");
  label_cmd->add_option("--out", label.out, "Output file (default stdout)");
  label_cmd->add_option("--stats", label.stats, "Write run statistics here ('-' for stderr)");

  NegativesFlags negatives;
  CLI::App* negatives_cmd =
      app.add_subcommand("negatives", "Emit negative sentences from Featured Articles");
  AddSourceFlags(negatives_cmd, negatives.source);
  negatives_cmd->add_option("--category", negatives.category)->check(CategoryCheck());
  negatives_cmd->add_flag("--strict", negatives.strict);
  negatives_cmd->add_option("--jobs", negatives.jobs)->check(CLI::PositiveNumber);
  negatives_cmd->add_option("--out", negatives.out, "Output file (default stdout)");

  CorpusFlags corpus;
  CLI::App* corpus_cmd = app.add_subcommand("corpus", "Corpus construction");
  corpus_cmd->require_subcommand(1);
  CLI::App* build_cmd = corpus_cmd->add_subcommand("build", "Balanced 70/10/20 splits");
  build_cmd->add_option("--positives", corpus.positives, "Positive JSONL, '-' for stdin")
      ->required();
  build_cmd->add_option("--negatives", corpus.negatives, "Negative JSONL, '-' for stdin")
      ->required();
  build_cmd->add_option("--category", corpus.category)->check(CategoryCheck());
  build_cmd->add_option("--seed", corpus.seed);
  build_cmd->add_option("--out", corpus.out, "Output directory")->required();

  SampleFlags sample;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Stratified sample for annotation");
  sample_cmd->add_option("--diffs", sample.diffs, "Diff JSONL from label --emit-diffs")
      ->required();
  sample_cmd->add_option("--seed", sample.seed);
  sample_cmd->add_option("--out", sample.out, "Sample JSON file (default stdout)");
  sample_cmd->add_option("--pov", sample.pov, "Point-of-view quota");
  sample_cmd->add_option("--clarification", sample.clarification, "Clarification quota");
  sample_cmd->add_option("--remainder", sample.remainder, "Remainder quota");
  sample_cmd->add_flag("--backfill", sample.backfill, "Fill short strata from the remainder");
  sample_cmd->add_option("--practice", sample.practice, "diff_id of the practice item");

  ServeFlags serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the annotation service");
  serve_cmd->add_option("--config", serve.config, "key=value config file");
  serve_cmd->add_option("--listen", serve.listen, "host:port");
  serve_cmd->add_option("--sample", serve.sample, "Sample JSON file");
  serve_cmd->add_option("--log", serve.log, "Label log (JSONL, append-only)");
  serve_cmd->add_option("--cap", serve.cap, "Diffs per annotator")->check(CLI::PositiveNumber);
  serve_cmd->add_option("--seed", serve.seed);

  EvaluateFlags evaluate;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Study metrics or model metrics");
  evaluate_cmd->add_option("--log", evaluate.log, "Label log from serve");
  evaluate_cmd->add_option("--sample", evaluate.sample, "Sample JSON used by serve");
  evaluate_cmd->add_option("--min-annotators", evaluate.min_annotators);
  evaluate_cmd->add_option("--model", evaluate.model, "Baseline model file");
  evaluate_cmd->add_option("--test", evaluate.test, "Corpus directory or JSONL file");
  evaluate_cmd->add_option("--threshold", evaluate.threshold)->check(CLI::Range(0.0, 1.0));
  evaluate_cmd->add_option("--format", evaluate.format)->check(CLI::IsMember({"json", "table"}));

  TrainFlags train;
  CLI::App* train_cmd = app.add_subcommand("train-baseline", "Train the linear baseline");
  train_cmd->add_option("--corpus", train.corpus, "Corpus directory")->required();
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_cmd->add_option("--epochs", train.epochs)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--learning-rate", train.learning_rate)->check(CLI::PositiveNumber);
  train_cmd->add_option("--l2", train.l2)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", train.seed);

  PredictFlags predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Score sentences, one per line");
  predict_cmd->add_option("--model", predict.model, "Model file")->required();
  predict_cmd->add_option("--in", predict.in, "Sentences, '-' for stdin");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) {
      target = sub;
      for (CLI::App* nested : sub->get_subcommands()) target = nested;
    }
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "editintent: " << e.what() << "\n";
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    err << target->help();
    return 2;
  }

  try {
    if (*ingest_cmd) return RunIngest(ingest, in, out);
    if (*label_cmd) return RunLabel(label, in, out, err);
    if (*negatives_cmd) return RunNegatives(negatives, in, out);
    if (*build_cmd) return RunCorpusBuild(corpus, in, out);
    if (*sample_cmd) return RunSample(sample, in, out);
    if (*serve_cmd) return RunServe(serve, out, err);
    if (*evaluate_cmd) return RunEvaluate(evaluate, in, out);
    if (*train_cmd) return RunTrain(train, out);
    if (*predict_cmd) return RunPredict(predict, in, out);
  } catch (const CLI::ValidationError& e) {
    err << "editintent: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "editintent: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace editintent::cli

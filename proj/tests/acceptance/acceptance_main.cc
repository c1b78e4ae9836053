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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when a criterion fails that was not listed with --known-failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cli.h"
#include "editintent/annotation_service.h"
#include "editintent/baseline.h"
#include "editintent/corpus.h"
#include "editintent/diffing.h"
#include "editintent/evaluation.h"
#include "editintent/intent_rules.h"
#include "editintent/revision_store.h"
#include "editintent/reverts.h"
#include "editintent/wikitext.h"
#include "support/annotation_driver.h"
#include "support/corpus_contract.h"
#include "support/metric_oracles.h"
#include "support/random_text.h"
#include "support/revert_oracle.h"
#include "support/rule_fixtures.h"
#include "support/sentinel_corpus.h"
#include "support/synthetic_dump.h"

namespace editintent {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v, int precision = 3) {
  std::ostringstream o;
  o.precision(precision);
  o << std::fixed << v;
  return o.str();
}

Outcome RuleGolden() {
  const auto start = Clock::now();
  const auto fixtures = testing::RuleFixtures();
  size_t agree = 0;
  std::string first_miss;
  std::map<std::string, std::set<bool>> seen;
  const std::regex index(R"(\[[^\]]*\])");
  for (const auto& f : fixtures) {
    RuleOptions opt;
    opt.mode = f.mode;
    const RuleVerdict v = LabelEdit(f.diff, opt);
    if (v.labels == f.expected) {
      ++agree;
    } else if (first_miss.empty()) {
      first_miss = f.name;
    }
    for (const RuleTrace& t : v.trace) seen[std::regex_replace(t.rule, index, "")].insert(t.value);
  }
  std::string untoggled;
  for (const auto& [rule, values] : seen) {
    if (rule == "clarification/skipped_new_sentence_insertions") continue;
    if (values.size() != 2) untoggled = rule;
  }
  // The original patterns, as written.
  const bool literals = patterns::kStrictCitation == R"(<ref>|\{\{Cite\}\})" &&
                        patterns::kStrictTemplate == R"(\{\{[^\{]+\}\})" &&
                        patterns::kStrictWikilink == R"(\[\[[^\[]+\]\])" &&
                        patterns::kStrictInfobox == R"(^$|[a-zA-Z0-9 ]+=)" &&
                        patterns::kStrictMultiline == R"(\n)" &&
                        patterns::kStrictComment == R"(pov|pointy)";
  const double t = Seconds(start);
  const bool pass = fixtures.size() >= 30 && agree == fixtures.size() && untoggled.empty() &&
                    literals && t < 1.0;
  std::string d = std::to_string(agree) + "/" + std::to_string(fixtures.size()) +
                  " fixtures agree, " + std::to_string(seen.size()) + " clauses toggled";
  if (!first_miss.empty()) d += ", first mismatch " + first_miss;
  if (!untoggled.empty()) d += ", clause never toggled: " + untoggled;
  if (!literals) d += ", strict literals differ";
  return {pass, d + ", " + Fmt(t) + " s"};
}

Outcome Fig3(const fs::path& fixtures) {
  const auto start = Clock::now();
  std::ifstream in(fixtures / "fig3.jsonl");
  const auto pages = ReadAllPages([&](const PageSink& sink) { return ParseJsonl(in, sink); });
  const auto& page = pages.at(0);
  const auto out = ExtractPositiveSentences(page);
  // The original sentence, cut from the parent revision by hand.
  const std::string& parent = page.at(0).text;
  const size_t from = parent.find("While the exact cause");
  const size_t to = parent.find(". ", from);
  const std::string expected = StripMarkup(parent.substr(from, to + 1 - from));
  const double t = Seconds(start);
  const bool one = out.size() == 1 && out[0].category == Category::kClarification;
  const bool text = one && out[0].text == expected;
  return {one && text && t < 1.0,
          std::to_string(out.size()) + " positive(s), text " + (text ? "matches" : "differs") +
              " \"" + expected + "\", " + Fmt(t) + " s"};
}

Outcome Reconstruction() {
  Rng rng(2024);
  int exact = 0;
  const int n = 10000;
  for (int trial = 0; trial < n; ++trial) {
    const auto [old_line, new_line] = testing::RandomLinePair(rng, trial);
    if (ApplySegments(old_line, DiffLine(old_line, new_line)) == new_line) ++exact;
  }
  return {exact == n, std::to_string(exact) + "/" + std::to_string(n) + " pairs byte-exact"};
}

Outcome RevertOracle() {
  Rng rng(15);
  int match = 0;
  size_t longest = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto page = testing::RandomHistory(rng);
    longest = std::max(longest, page.size());
    if (DetectReverts(page) == testing::BruteForce(page, {})) ++match;
  }
  auto after = [](int between, int64_t span) {
    std::vector<Revision> page = {testing::Rev(1, 0, "base")};
    for (int k = 0; k < between; ++k) {
      page.push_back(testing::Rev(2 + k, 1 + k, "m" + std::to_string(k)));
    }
    page.push_back(testing::Rev(2 + between, span, "base"));
    return DetectReverts(page).at(2 + between);
  };
  const bool boundaries = after(15, 3600) == RevertStatus::kReverting &&
                          after(16, 3600) == RevertStatus::kClean &&
                          after(1, 48 * 3600) == RevertStatus::kReverting &&
                          after(1, 48 * 3600 + 1) == RevertStatus::kClean;
  return {match == 1000 && longest <= 200 && boundaries,
          std::to_string(match) + "/1000 histories match (max length " +
              std::to_string(longest) + "), window and horizon boundaries " +
              (boundaries ? "hold" : "FAIL")};
}

Outcome CorpusContract() {
  Rng rng(77);
  int ok = 0;
  const int trials = 200;
  std::string first;
  for (int trial = 0; trial < trials; ++trial) {
    const size_t n = 5 + rng.Uniform(300);
    const auto in = testing::RandomBalancedInput(rng, n, 1 + rng.Uniform(6));
    const auto a = BuildSplits(in.positives, in.negatives, trial);
    const auto b = BuildSplits(in.positives, in.negatives, trial);
    std::string err = testing::CheckSplitContract(a, in);
    if (err.empty() && testing::ExportBytes(a) != testing::ExportBytes(b)) {
      err = "second run differs";
    }
    if (err.empty()) {
      ++ok;
    } else if (first.empty()) {
      first = err;
    }
  }
  return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) +
                            " random inputs meet 70/10/20, balance, page-disjoint and "
                            "byte-identical reruns" +
                            (first.empty() ? "" : "; " + first)};
}

Outcome Sampler() {
  Rng rng(100);
  const auto pool = testing::RandomPool(rng, 100000);
  const auto sample = StratifiedSample(pool, 42);
  size_t counts[3] = {0, 0, 0};
  std::set<std::string> ids;
  for (const auto& s : sample) {
    ids.insert(s.diff_id);
    ++counts[static_cast<int>(s.stratum)];
  }
  const bool deterministic = StratifiedSample(pool, 42) == sample;
  const bool pass = counts[0] == 100 && counts[1] == 100 && counts[2] == 800 &&
                    ids.size() == sample.size() && deterministic;
  return {pass, std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" +
                    std::to_string(counts[2]) + ", " + std::to_string(ids.size()) +
                    " distinct, " + (deterministic ? "deterministic" : "not deterministic")};
}

Outcome Metrics() {
  double worst_alpha = 0;
  for (const auto& f : testing::AlphaFixtures()) {
    worst_alpha = std::max(worst_alpha, std::abs(KrippendorffAlpha(f.matrix) - f.expected));
  }
  const bool perfect = KrippendorffAlpha({{1, 1, 1}, {0, 0, 0}, {1, 1, 1}}) == 1.0;
  double worst_auc = 0;
  const auto fixtures = testing::AucFixtures();
  for (const auto& [scores, labels] : fixtures) {
    worst_auc = std::max(worst_auc,
                         std::abs(RocAuc(scores, labels) - testing::PairwiseAuc(scores, labels)));
  }
  const auto f = testing::CitationCellFixture();
  const auto c = RulePrecisionRecall(f.rules, f.truth)[static_cast<size_t>(Category::kCitation)];
  const bool pr = std::abs(*c.precision - 0.94) <= 0.005 && std::abs(*c.recall - 0.49) <= 0.005;
  const bool pass = worst_alpha <= 1e-9 && perfect && fixtures.size() == 50 &&
                    worst_auc <= 1e-9 && pr;
  std::ostringstream d;
  d << "alpha max error " << worst_alpha << (perfect ? ", 1.0 on agreement" : ", agreement != 1")
    << "; AUC max error " << worst_auc << " over " << fixtures.size()
    << " fixtures; citation P/R " << Fmt(*c.precision) << "/" << Fmt(*c.recall);
  return {pass, d.str()};
}

Outcome Baseline() {
  const auto start = Clock::now();
  const auto corpus = testing::SentinelCorpus(2000, 3);
  const auto result = Train(corpus);
  const double f1 = *EvaluateModel(result.model, corpus.test).scores.f1;

  Rng rng(17);
  const auto data = testing::RandomExamples(rng, 20);
  Model model;
  std::vector<uint32_t> active;
  for (const auto& e : data) {
    for (const auto& [b, v] : e.features) active.push_back(b);
  }
  for (uint32_t b : active) model.weights[b] = rng.UniformDouble() * 2 - 1;
  model.bias = rng.UniformDouble() - 0.5;
  active.push_back(kHashBuckets);
  const double l2 = 0.01;
  const auto grad = Gradient(model, data, l2);
  double worst = 0;
  for (uint32_t b : active) {
    const double h = 1e-5;
    double& param = b == kHashBuckets ? model.bias : model.weights[b];
    const double saved = param;
    param = saved + h;
    const double up = Loss(model, data, l2);
    param = saved - h;
    const double down = Loss(model, data, l2);
    param = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(grad[b]), 1e-3});
    worst = std::max(worst, std::abs(numeric - grad[b]) / scale);
  }
  const bool deterministic = Train(corpus).model == result.model;
  const double t = Seconds(start);
  std::ostringstream d;
  d << "F1 " << Fmt(f1, 4) << ", gradient relative error " << worst << ", "
    << (deterministic ? "deterministic" : "not deterministic") << ", " << Fmt(t, 2) << " s";
  return {f1 >= 0.99 && worst <= 1e-6 && deterministic && t < 30.0, d.str()};
}

Outcome Throughput() {
  const fs::path dir = fs::temp_directory_path() / "ei_acceptance_throughput";
  fs::create_directories(dir);
  const fs::path dump = dir / "dump.xml";
  std::ofstream(dump) << testing::SyntheticDump(100, 100, 11);
  auto run = [&](int jobs, double* seconds) {
    std::istringstream in;
    std::ostringstream out, err;
    const auto start = Clock::now();
    const int code = cli::Run({"editintent", "label", "--in", dump.string(), "--jobs",
                               std::to_string(jobs)},
                              in, out, err);
    *seconds = Seconds(start);
    return code == 0 ? out.str() : "error: " + err.str();
  };
  double t1 = 0, t4 = 0;
  const std::string one = run(1, &t1);
  const std::string four = run(4, &t4);
  fs::remove_all(dir);
  const bool identical = one == four && !one.empty() && one.rfind("error", 0) != 0;
  const double speedup = t1 / t4;
  std::ostringstream d;
  d << "10000 revisions: " << Fmt(t1, 2) << " s with 1 job, " << Fmt(t4, 2)
    << " s with 4 (speedup " << Fmt(speedup, 2) << "x on " << std::thread::hardware_concurrency()
    << " hardware threads), output " << (identical ? "identical" : "differs");
  return {t1 < 60.0 && speedup >= 2.0 && identical, d.str()};
}

Outcome Annotation() {
  const fs::path log = fs::temp_directory_path() / "ei_acceptance_labels.jsonl";
  fs::remove(log);
  ServiceConfig config;
  config.log_path = log;
  nlohmann::json live;
  testing::StudyRun run;
  {
    AnnotationService service(testing::MakeSample(20), config);
    testing::RunningServer server(service);
    run = testing::DriveAnnotators(server.port(), {"ann1", "ann2", "ann3"}, true);
    httplib::Client cli("127.0.0.1", server.port());
    auto res = cli.Get("/api/metrics");
    if (res && res->status == 200) live = nlohmann::json::parse(res->body);
  }
  AnnotationService replayed(testing::MakeSample(20), config);
  const bool same = !live.is_null() && replayed.Metrics().dump() == live.dump();
  fs::remove(log);
  const int covered = live.is_null() ? 0 : live["coverage"]["covered"].get<int>();
  std::ostringstream d;
  d << covered << "/20 diffs with 3 annotators, " << run.responses_checked
    << " responses blinded" << (run.error.empty() ? "" : " (error: " + run.error + ")")
    << ", replay " << (same ? "identical" : "differs");
  return {run.error.empty() && covered == 20 && same, d.str()};
}

}  // namespace
}  // namespace editintent

int main(int argc, char** argv) {
  using namespace editintent;
  CLI::App app{"Acceptance checks"};
  std::string fixtures = EDITINTENT_FIXTURES;
  std::vector<int> known;
  app.add_option("--fixtures", fixtures, "Fixture directory");
  app.add_option("--known-failure", known, "Criterion allowed to fail (repeatable)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"rule golden suite", RuleGolden},
      {"fig3 end-to-end", [&] { return Fig3(fixtures); }},
      {"diff reconstruction", Reconstruction},
      {"revert oracle", RevertOracle},
      {"corpus contract", CorpusContract},
      {"sampler", Sampler},
      {"metrics", Metrics},
      {"baseline", Baseline},
      {"throughput", Throughput},
      {"annotation service", Annotation},
  };
  int unexpected = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool allowed = std::find(known.begin(), known.end(), number) != known.end();
    if (!o.pass && !allowed) ++unexpected;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << number << " " << criteria[i].first << ": "
              << o.detail << (!o.pass && allowed ? " [known failure]" : "") << std::endl;
  }
  return unexpected == 0 ? 0 : 1;
}

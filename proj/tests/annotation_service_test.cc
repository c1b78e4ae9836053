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

#include "editintent/annotation_service.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support/annotation_driver.h"

namespace editintent {
namespace {

namespace fs = std::filesystem;
using testing::CheckBlinded;
using testing::DriveAnnotators;
using testing::MakeSample;
using testing::RunningServer;

fs::path TempLog(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ei_" + name + ".jsonl");
  fs::remove(p);
  return p;
}

TEST(AnnotationServiceTest, ThreeAnnotatorsCoverEveryDiff) {
  const fs::path log = TempLog("coverage");
  ServiceConfig config;
  config.log_path = log;
  config.cap = 50;
  nlohmann::json live;
  {
    AnnotationService service(MakeSample(20), config);
    RunningServer server(service);
    const auto run = DriveAnnotators(server.port(), {"ann1", "ann2", "ann3"}, false);
    ASSERT_EQ(run.error, "");
    EXPECT_EQ(run.submitted, (std::vector<int>{20, 20, 20}));
    // One practice, 20 items and a final "done" per annotator.
    EXPECT_EQ(run.responses_checked, 3 * 22);

    httplib::Client cli("127.0.0.1", server.port());
    auto res = cli.Get("/api/metrics");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    live = nlohmann::json::parse(res->body);
    EXPECT_EQ(live["coverage"]["covered"], 20);
    EXPECT_EQ(live["coverage"]["diffs"], 20);
    EXPECT_EQ(live, service.Metrics());
    EXPECT_EQ(service.Records().size(), 60u);
  }
  AnnotationService replayed(MakeSample(20), config);
  EXPECT_EQ(replayed.Metrics().dump(), live.dump());
  fs::remove(log);
}

TEST(AnnotationServiceTest, ConcurrentAnnotatorsNeverDoubleLabel) {
  ServiceConfig config;
  config.cap = 1000;
  AnnotationService service(MakeSample(30), config);
  RunningServer server(service);
  std::vector<std::string> names;
  for (int i = 0; i < 6; ++i) names.push_back("c" + std::to_string(i));
  const auto run = DriveAnnotators(server.port(), names, true);
  ASSERT_EQ(run.error, "");
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : service.Records()) {
    EXPECT_TRUE(seen.insert({r.annotator_id, r.diff_id}).second);
  }
  EXPECT_EQ(seen.size(), 6u * 30u);
  EXPECT_EQ(service.Metrics()["coverage"]["covered"], 30);
}

TEST(AnnotationServiceTest, PracticeFirstAndNotLogged) {
  AnnotationService service(MakeSample(3), {});
  const Session s = service.CreateSession("a");
  EXPECT_FALSE(s.practice_done);
  auto next = service.Next(s.session_id);
  EXPECT_TRUE(next.practice);
  EXPECT_EQ(next.diff_id, "practice");
  // A wrong id during practice is a conflict.
  EXPECT_THROW(service.Submit(s.session_id, "diff0", {Category::kCitation}, false, {}),
               ServiceError);
  service.Submit(s.session_id, "practice", {Category::kCitation}, false, {});
  EXPECT_TRUE(service.Records().empty());
  next = service.Next(s.session_id);
  EXPECT_FALSE(next.practice);
  EXPECT_NE(next.diff_id, "practice");
  // Repeated Next without a submit returns the same diff.
  EXPECT_EQ(service.Next(s.session_id).diff_id, next.diff_id);
}

TEST(AnnotationServiceTest, LeastAnnotatedFirst) {
  AnnotationService service(MakeSample(4), {});
  std::map<std::string, int> counts;
  for (int a = 0; a < 4; ++a) {
    const Session s = service.CreateSession("a" + std::to_string(a));
    service.Next(s.session_id);
    service.Submit(s.session_id, "practice", {}, true, {});
    const auto next = service.Next(s.session_id);
    ++counts[next.diff_id];
    service.Submit(s.session_id, next.diff_id, {}, true, {});
  }
  // Four annotators with one label each land on four distinct diffs.
  EXPECT_EQ(counts.size(), 4u);
}

TEST(AnnotationServiceTest, CapStopsAssignment) {
  ServiceConfig config;
  config.cap = 2;
  AnnotationService service(MakeSample(5), config);
  const Session s = service.CreateSession("a");
  service.Next(s.session_id);
  service.Submit(s.session_id, "practice", {}, true, {});
  for (int i = 0; i < 2; ++i) {
    const auto next = service.Next(s.session_id);
    ASSERT_FALSE(next.done);
    service.Submit(s.session_id, next.diff_id, {Category::kClarification}, false, {});
  }
  const auto last = service.Next(s.session_id);
  EXPECT_TRUE(last.done);
  EXPECT_EQ(last.submitted_count, 2);
  EXPECT_EQ(NextResultToJson(last)["status"], "done");
}

TEST(AnnotationServiceTest, ResumeAfterRestart) {
  const fs::path log = TempLog("resume");
  ServiceConfig config;
  config.log_path = log;
  std::string first;
  {
    AnnotationService service(MakeSample(5), config);
    const Session s = service.CreateSession("a");
    service.Next(s.session_id);
    service.Submit(s.session_id, "practice", {}, true, {});
    first = service.Next(s.session_id).diff_id;
    service.Submit(s.session_id, first, {Category::kCitation}, false, std::string("ok"));
    // Same annotator gets the same session back.
    EXPECT_EQ(service.CreateSession("a").session_id, s.session_id);
  }
  AnnotationService service(MakeSample(5), config);
  const Session s = service.CreateSession("a");
  EXPECT_TRUE(s.practice_done);
  EXPECT_EQ(s.submitted_count, 1);
  const auto next = service.Next(s.session_id);
  EXPECT_FALSE(next.practice);
  EXPECT_NE(next.diff_id, first);
  ASSERT_EQ(service.Records().size(), 1u);
  EXPECT_EQ(*service.Records()[0].comment, "ok");
  fs::remove(log);
}

TEST(AnnotationServiceTest, IdleAssignmentIsReleased) {
  Timestamp now = Timestamp(std::chrono::seconds(1'700'000'000));
  ServiceConfig config;
  config.idle_timeout = std::chrono::seconds(60);
  config.clock = [&now] { return now; };
  // A single diff shared by two annotators.
  AnnotationService service(MakeSample(1), config);
  const Session a = service.CreateSession("a");
  service.Next(a.session_id);
  service.Submit(a.session_id, "practice", {}, true, {});
  const auto held = service.Next(a.session_id);
  ASSERT_EQ(held.diff_id, "diff0");

  const Session b = service.CreateSession("b");
  service.Next(b.session_id);
  service.Submit(b.session_id, "practice", {}, true, {});
  // In flight for "a" does not block "b" from the same diff, but the load
  // counts it. With one diff "b" still gets it.
  EXPECT_EQ(service.Next(b.session_id).diff_id, "diff0");

  now += std::chrono::seconds(61);
  // "a" was idle; its submit for the released diff is a conflict.
  service.Next(b.session_id);
  EXPECT_THROW(service.Submit(a.session_id, "diff0", {}, true, {}), ServiceError);
  // Asking again re-assigns it.
  EXPECT_EQ(service.Next(a.session_id).diff_id, "diff0");
  service.Submit(a.session_id, "diff0", {}, true, {});
}

TEST(AnnotationServiceTest, IdleReleaseChangesLoadOrder) {
  Timestamp now = Timestamp(std::chrono::seconds(1'700'000'000));
  ServiceConfig config;
  config.idle_timeout = std::chrono::seconds(60);
  config.clock = [&now] { return now; };
  AnnotationService service(MakeSample(2), config);
  auto start = [&](const std::string& who) {
    const Session s = service.CreateSession(who);
    service.Next(s.session_id);
    service.Submit(s.session_id, "practice", {}, true, {});
    return s;
  };
  const Session a = start("a");
  const std::string held = service.Next(a.session_id).diff_id;
  const Session b = start("b");
  // The held diff counts as load, so "b" gets the other one.
  const std::string other = service.Next(b.session_id).diff_id;
  EXPECT_NE(other, held);
  service.Submit(b.session_id, other, {}, true, {});
  now += std::chrono::seconds(120);
  // a's claim lapsed, so the held diff is now the least loaded.
  const Session c = start("c");
  EXPECT_EQ(service.Next(c.session_id).diff_id, held);
}

TEST(AnnotationServiceTest, Validation) {
  AnnotationService service(MakeSample(2), {});
  EXPECT_THROW(service.CreateSession("  "), ServiceError);
  EXPECT_THROW(service.Next("nope"), ServiceError);
  const Session s = service.CreateSession("a");
  service.Next(s.session_id);
  service.Submit(s.session_id, "practice", {}, true, {});
  const auto next = service.Next(s.session_id);
  try {
    service.Submit(s.session_id, next.diff_id, {Category::kCitation}, true, {});
    FAIL() << "none with categories accepted";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.http_status(), 422);
  }
  try {
    service.Submit(s.session_id, next.diff_id, {}, false, {});
    FAIL() << "empty label accepted";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.http_status(), 422);
  }
  service.Submit(s.session_id, next.diff_id, {}, true, {});
  try {
    service.Submit(s.session_id, next.diff_id, {}, true, {});
    FAIL() << "double submit accepted";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.http_status(), 409);
  }
  ServiceConfig zero_cap;
  zero_cap.cap = 0;
  EXPECT_THROW(AnnotationService(MakeSample(1), zero_cap), InvalidArgument);
}

TEST(AnnotationServerTest, ErrorStatuses) {
  AnnotationService service(MakeSample(3), {});
  RunningServer server(service);
  httplib::Client cli("127.0.0.1", server.port());

  auto res = cli.Get("/api/session/missing/next");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_TRUE(nlohmann::json::parse(res->body).contains("error"));
  res = cli.Get("/api/session?annotator=");
  EXPECT_EQ(res->status, 422);

  res = cli.Get("/api/session?annotator=a");
  ASSERT_EQ(res->status, 200);
  const auto session = nlohmann::json::parse(res->body);
  for (const char* key : {"session_id", "annotator_id", "practice_done", "submitted_count",
                          "cap", "started_at"}) {
    EXPECT_TRUE(session.contains(key)) << key;
  }
  const std::string base = "/api/session/" + session["session_id"].get<std::string>();
  auto post = [&](const std::string& body) {
    return cli.Post(base + "/labels", body, "application/json");
  };
  EXPECT_EQ(post("{not json")->status, 400);
  EXPECT_EQ(post("[1,2]")->status, 400);
  EXPECT_EQ(post(R"({"categories":[]})")->status, 422);
  EXPECT_EQ(post(R"({"diff_id":"practice","categories":["typo"]})")->status, 422);
  EXPECT_EQ(post(R"({"diff_id":"practice","categories":"citation"})")->status, 422);
  EXPECT_EQ(post(R"({"diff_id":"practice","none_flag":"yes"})")->status, 422);
  EXPECT_EQ(post(R"({"diff_id":"practice","none_flag":true,"comment":5})")->status, 422);

  res = cli.Get(base + "/next");
  ASSERT_EQ(res->status, 200);
  auto next = nlohmann::json::parse(res->body);
  EXPECT_EQ(CheckBlinded(next), "");
  EXPECT_TRUE(next["practice"].get<bool>());
  EXPECT_EQ(post(R"({"diff_id":"diff0","none_flag":true})")->status, 409);
  res = post(R"({"diff_id":"practice","none_flag":true})");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["ok"], true);

  next = nlohmann::json::parse(cli.Get(base + "/next")->body);
  const std::string id = next["diff"]["diff_id"];
  res = post(nlohmann::json({{"diff_id", id}, {"categories", {"citation"}}}).dump());
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["submitted_count"], 1);
  EXPECT_EQ(post(nlohmann::json({{"diff_id", id}, {"none_flag", true}}).dump())->status, 409);
  EXPECT_EQ(cli.Post("/api/session/missing/labels", R"({"diff_id":"x","none_flag":true})",
                     "application/json")
                ->status,
            404);
}

TEST(AnnotationServerTest, DefinitionsAndBlindedPayload) {
  AnnotationService service(MakeSample(2), {});
  RunningServer server(service);
  httplib::Client cli("127.0.0.1", server.port());
  auto res = cli.Get("/api/definitions");
  ASSERT_EQ(res->status, 200);
  const auto defs = nlohmann::json::parse(res->body);
  ASSERT_EQ(defs.size(), 3u);
  std::set<std::string> cats;
  for (const auto& d : defs) cats.insert(d["category"]);
  EXPECT_EQ(cats, (std::set<std::string>{"citation", "clarification", "point_of_view"}));

  // The blinded diff keeps the segments but drops ids and comment.
  const auto sample = MakeSample(1);
  const auto j = BlindedDiffToJson("diff0", sample.items[0].diff);
  EXPECT_EQ(j.dump().find(testing::kSecretComment), std::string::npos);
  EXPECT_EQ(j.dump().find("1000"), std::string::npos);
  ASSERT_EQ(j["lines"].size(), 1u);
  EXPECT_EQ(j["lines"][0]["segments"][0]["inserted"], "black ");

  // The full sample file does carry the comment.
  EXPECT_NE(AnnotationSampleToJson(sample).dump().find(testing::kSecretComment),
            std::string::npos);
  EXPECT_NE(CheckBlinded({{"diff", {{"diff_id", "x"}, {"lines", nlohmann::json::array()},
                                    {"comment", "c"}}}}),
            "");
}

TEST(AnnotationLogTest, ReplayErrors) {
  const fs::path log = TempLog("bad");
  std::ofstream(log) << R"({"diff_id":"zzz","annotator_id":"a","categories":[],"none_flag":true,"submitted_at":"2024-01-01T00:00:00Z"})"
                     << "\n";
  ServiceConfig config;
  config.log_path = log;
  EXPECT_THROW(AnnotationService(MakeSample(2), config), ParseError);
  std::ofstream(log, std::ios::trunc) << "{oops\n";
  try {
    ReadAnnotationLog(log);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":1"), std::string::npos) << e.what();
  }
  fs::remove(log);
}

TEST(AnnotationSampleTest, JsonRoundTrip) {
  const auto sample = MakeSample(3);
  const auto back = AnnotationSampleFromJson(AnnotationSampleToJson(sample));
  EXPECT_EQ(AnnotationSampleToJson(back), AnnotationSampleToJson(sample));
  EXPECT_EQ(back.items.size(), 3u);
  EXPECT_EQ(back.items[0].rule_labels, sample.items[0].rule_labels);
}

TEST(ServerConfigTest, Parse) {
  const auto c = ParseServerConfig(
      "# study\nlisten = 0.0.0.0:9000\nsample = s.json\nlog = /tmp/l.jsonl\ncap = 10\n"
      "seed = 4\n",
      "/data");
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.sample, fs::path("/data/s.json"));
  EXPECT_EQ(c.log, fs::path("/tmp/l.jsonl"));
  EXPECT_EQ(c.cap, 10);
  EXPECT_EQ(c.seed, 4u);
  for (const char* bad : {"listen = nohost", "cap = x", "what = 1", "listen = h:99999",
                          "noequals"}) {
    EXPECT_THROW(ParseServerConfig(bad), ParseError) << bad;
  }
  try {
    ParseServerConfig("cap = 1\n\ncap = q\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace editintent

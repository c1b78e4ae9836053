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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "editintent/diffing.h"
#include "editintent/evaluation.h"
#include "editintent/types.h"
#include "json.hpp"

namespace editintent {

struct SampleEntry {
  std::string diff_id;
  EditDiff diff;
  std::set<Category> rule_labels;
};

// The diffs served to annotators plus the fixed practice diff.
struct AnnotationSample {
  SampleEntry practice;
  std::vector<SampleEntry> items;
};

inline constexpr int kSampleSchemaVersion = 1;

nlohmann::json AnnotationSampleToJson(const AnnotationSample& sample);
// Throws ParseError on malformed input or duplicate diff ids.
AnnotationSample AnnotationSampleFromJson(const nlohmann::json& j);
AnnotationSample LoadAnnotationSample(const std::filesystem::path& path);

// Wire form of a diff: line changes with segment offsets and context, no
// edit comment, author, timestamp or revision ids.
nlohmann::json BlindedDiffToJson(const std::string& diff_id, const EditDiff& diff);

struct Session {
  std::string session_id;
  std::string annotator_id;
  bool practice_done = false;
  int submitted_count = 0;
  int cap = 250;
  Timestamp started_at{};
};

nlohmann::json SessionToJson(const Session& session);

class ServiceError : public Error {
 public:
  enum class Kind { kNotFound, kValidation, kConflict };
  ServiceError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }
  int http_status() const;

 private:
  Kind kind_;
};

struct ServiceConfig {
  int cap = 250;
  uint64_t seed = 0;
  std::chrono::seconds idle_timeout = std::chrono::hours(2);
  // Coverage target reported by metrics.
  size_t target_annotators = 3;
  // Append-only JSONL label log; replayed on construction when present.
  std::filesystem::path log_path;
  std::function<Timestamp()> clock;  // defaults to the system clock
};

struct NextResult {
  bool done = false;
  bool practice = false;
  std::string diff_id;
  const EditDiff* diff = nullptr;
  int submitted_count = 0;
  int cap = 0;
};

nlohmann::json NextResultToJson(const NextResult& next);

// Session management, least-annotated-first assignment and label
// persistence. All public methods are safe to call concurrently.
class AnnotationService {
 public:
  AnnotationService(AnnotationSample sample, ServiceConfig config);
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Creates a session, or returns the annotator's existing one.
  Session CreateSession(const std::string& annotator_id);

  // The practice diff first, then the unlabeled diff with the fewest
  // distinct annotators (submitted or in flight). A session holding an
  // unanswered assignment gets the same diff again. Done at the cap or
  // when nothing is left for this annotator.
  NextResult Next(const std::string& session_id);

  // Records labels for the diff last served to the session.
  void Submit(const std::string& session_id, const std::string& diff_id,
              const std::set<Category>& categories, bool none_flag,
              std::optional<std::string> comment);

  nlohmann::json Metrics() const;
  static nlohmann::json Definitions();

  std::vector<AnnotationRecord> Records() const;
  std::optional<Session> GetSession(const std::string& session_id) const;

 private:
  struct State;
  Timestamp Now() const;
  void ReleaseIdle(Timestamp now);

  const AnnotationSample sample_;
  const ServiceConfig config_;
  mutable std::mutex mu_;
  std::unique_ptr<State> state_;
  std::ofstream log_;
};

// Reads a JSONL label log. Throws ParseError naming the line.
std::vector<AnnotationRecord> ReadAnnotationLog(const std::filesystem::path& path);

// key=value configuration for `serve`.
struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path sample;
  std::filesystem::path log;
  int cap = 250;
  uint64_t seed = 0;
};

// Lines "key = value"; '#' starts a comment. Keys: listen (host:port),
// sample, log, cap, seed. Relative paths resolve against the file's
// directory. Throws ParseError naming the line on bad input.
ServerConfig ParseServerConfig(const std::string& text,
                               const std::filesystem::path& base_dir = {});
ServerConfig LoadServerConfig(const std::filesystem::path& path);

// HTTP front end for AnnotationService.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationService& service);
  ~AnnotationServer();

  // Binds to an ephemeral port and returns it, or -1 on failure.
  int BindToAnyPort(const std::string& host);
  bool Bind(const std::string& host, int port);
  // Serves until Stop(). Call after a successful bind.
  bool ListenAfterBind();
  void Stop();
  void WaitUntilReady() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace editintent

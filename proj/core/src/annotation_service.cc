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

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "editintent/random.h"
#include "text_util.h"

namespace editintent {
namespace {

uint64_t Mix(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t TieKey(uint64_t seed, std::string_view id) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Mix(h ^ Mix(seed));
}

SampleEntry EntryFromJson(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": not an object");
  SampleEntry e;
  auto id = j.find("diff_id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw ParseError(where + ": field 'diff_id' missing or empty");
  }
  e.diff_id = id->get<std::string>();
  auto diff = j.find("diff");
  if (diff == j.end()) throw ParseError(where + ": field 'diff' missing");
  try {
    e.diff = EditDiffFromJson(*diff);
  } catch (const std::exception& ex) {
    throw ParseError(where + ": " + ex.what());
  }
  if (auto labels = j.find("rule_labels"); labels != j.end()) {
    if (!labels->is_array()) throw ParseError(where + ": field 'rule_labels' is not an array");
    for (const auto& l : *labels) {
      auto c = l.is_string() ? ParseCategory(l.get<std::string>()) : std::nullopt;
      if (!c) throw ParseError(where + ": bad category in 'rule_labels'");
      e.rule_labels.insert(*c);
    }
  }
  return e;
}

nlohmann::json EntryToJson(const SampleEntry& e) {
  nlohmann::json labels = nlohmann::json::array();
  for (Category c : e.rule_labels) labels.push_back(std::string(CategoryName(c)));
  return {{"diff_id", e.diff_id}, {"diff", EditDiffToJson(e.diff)}, {"rule_labels", labels}};
}

}  // namespace

nlohmann::json AnnotationSampleToJson(const AnnotationSample& sample) {
  nlohmann::json items = nlohmann::json::array();
  for (const SampleEntry& e : sample.items) items.push_back(EntryToJson(e));
  return {{"schema_version", kSampleSchemaVersion},
          {"practice", EntryToJson(sample.practice)},
          {"items", items}};
}

AnnotationSample AnnotationSampleFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("sample: not an object");
  if (j.value("schema_version", 0) != kSampleSchemaVersion) {
    throw ParseError("sample: unsupported schema_version");
  }
  AnnotationSample sample;
  if (!j.contains("practice")) throw ParseError("sample: field 'practice' missing");
  sample.practice = EntryFromJson(j["practice"], "sample practice");
  auto items = j.find("items");
  if (items == j.end() || !items->is_array()) {
    throw ParseError("sample: field 'items' missing or not an array");
  }
  std::set<std::string> ids = {sample.practice.diff_id};
  for (size_t i = 0; i < items->size(); ++i) {
    SampleEntry e = EntryFromJson((*items)[i], "sample item " + std::to_string(i));
    if (!ids.insert(e.diff_id).second) throw ParseError("sample: duplicate diff_id " + e.diff_id);
    sample.items.push_back(std::move(e));
  }
  return sample;
}

AnnotationSample LoadAnnotationSample(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return AnnotationSampleFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

nlohmann::json BlindedDiffToJson(const std::string& diff_id, const EditDiff& diff) {
  nlohmann::json lines = nlohmann::json::array();
  for (const LineChange& line : diff.lines) {
    nlohmann::json segments = nlohmann::json::array();
    for (const Segment& s : line.segments) segments.push_back(SegmentToJson(s));
    lines.push_back({{"old_line", line.old_line},
                     {"new_line", line.new_line},
                     {"segments", segments},
                     {"paragraph_index", line.paragraph_index},
                     {"context_before", line.context_before},
                     {"context_after", line.context_after}});
  }
  return {{"diff_id", diff_id}, {"lines", lines}};
}

nlohmann::json SessionToJson(const Session& s) {
  return {{"session_id", s.session_id},
          {"annotator_id", s.annotator_id},
          {"practice_done", s.practice_done},
          {"submitted_count", s.submitted_count},
          {"cap", s.cap},
          {"started_at", FormatTimestamp(s.started_at)}};
}

int ServiceError::http_status() const {
  switch (kind_) {
    case Kind::kNotFound:
      return 404;
    case Kind::kValidation:
      return 422;
    case Kind::kConflict:
      return 409;
  }
  return 500;
}

nlohmann::json NextResultToJson(const NextResult& next) {
  nlohmann::json j;
  j["status"] = next.done ? "done" : "diff";
  j["practice"] = next.practice;
  j["progress"] = {{"submitted", next.submitted_count}, {"cap", next.cap}};
  if (!next.done) j["diff"] = BlindedDiffToJson(next.diff_id, *next.diff);
  return j;
}

struct AnnotationService::State {
  struct SessionState {
    Session session;
    Timestamp last_active{};
    std::optional<size_t> current;  // item index
    bool current_practice = false;
  };

  std::map<std::string, size_t> index;
  std::vector<std::set<std::string>> labeled_by;  // annotator ids
  std::vector<std::set<std::string>> in_flight;   // annotator ids
  std::vector<uint64_t> tie;
  std::map<std::string, SessionState> sessions;
  std::map<std::string, std::string> session_of;  // annotator -> session
  std::map<std::string, int> submitted;           // annotator -> count
  std::vector<AnnotationRecord> records;
  std::unique_ptr<Rng> ids;
};

AnnotationService::AnnotationService(AnnotationSample sample, ServiceConfig config)
    : sample_(std::move(sample)), config_(std::move(config)), state_(std::make_unique<State>()) {
  if (config_.cap <= 0) throw InvalidArgument("cap must be positive");
  State& st = *state_;
  st.ids = std::make_unique<Rng>(Mix(config_.seed ^ 0x5e55107ULL));
  for (size_t i = 0; i < sample_.items.size(); ++i) {
    st.index.emplace(sample_.items[i].diff_id, i);
    st.tie.push_back(TieKey(config_.seed, sample_.items[i].diff_id));
  }
  st.labeled_by.resize(sample_.items.size());
  st.in_flight.resize(sample_.items.size());

  if (config_.log_path.empty()) return;
  if (std::filesystem::exists(config_.log_path)) {
    for (AnnotationRecord& r : ReadAnnotationLog(config_.log_path)) {
      auto it = st.index.find(r.diff_id);
      if (it == st.index.end()) {
        throw ParseError(config_.log_path.string() + ": unknown diff_id " + r.diff_id);
      }
      if (!st.labeled_by[it->second].insert(r.annotator_id).second) {
        throw ParseError(config_.log_path.string() + ": duplicate record for diff " +
                         r.diff_id + " by " + r.annotator_id);
      }
      ++st.submitted[r.annotator_id];
      st.records.push_back(std::move(r));
    }
  }
  log_.open(config_.log_path, std::ios::binary | std::ios::app);
  if (!log_) throw Error("cannot open label log " + config_.log_path.string());
}

AnnotationService::~AnnotationService() = default;

Timestamp AnnotationService::Now() const {
  if (config_.clock) return config_.clock();
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

void AnnotationService::ReleaseIdle(Timestamp now) {
  State& st = *state_;
  for (auto& [id, ss] : st.sessions) {
    if (now - ss.last_active <= config_.idle_timeout) continue;
    if (ss.current && !ss.current_practice) {
      st.in_flight[*ss.current].erase(ss.session.annotator_id);
    }
    ss.current.reset();
    ss.current_practice = false;
  }
}

Session AnnotationService::CreateSession(const std::string& annotator_id) {
  if (internal::Trim(annotator_id).empty()) {
    throw ServiceError(ServiceError::Kind::kValidation, "annotator id is empty");
  }
  std::lock_guard lock(mu_);
  State& st = *state_;
  const Timestamp now = Now();
  ReleaseIdle(now);
  if (auto it = st.session_of.find(annotator_id); it != st.session_of.end()) {
    State::SessionState& ss = st.sessions.at(it->second);
    ss.last_active = now;
    return ss.session;
  }
  State::SessionState ss;
  char buf[24];
  do {
    std::snprintf(buf, sizeof buf, "s%016llx",
                  static_cast<unsigned long long>(st.ids->Next()));
  } while (st.sessions.count(buf));
  ss.session.session_id = buf;
  ss.session.annotator_id = annotator_id;
  ss.session.cap = config_.cap;
  ss.session.started_at = now;
  const int prior = st.submitted.count(annotator_id) ? st.submitted[annotator_id] : 0;
  ss.session.submitted_count = prior;
  // Annotators returning after a restart already did their practice.
  ss.session.practice_done = prior > 0;
  ss.last_active = now;
  st.session_of[annotator_id] = ss.session.session_id;
  const Session out = ss.session;
  st.sessions.emplace(out.session_id, std::move(ss));
  return out;
}

NextResult AnnotationService::Next(const std::string& session_id) {
  std::lock_guard lock(mu_);
  State& st = *state_;
  const Timestamp now = Now();
  ReleaseIdle(now);
  auto it = st.sessions.find(session_id);
  if (it == st.sessions.end()) {
    throw ServiceError(ServiceError::Kind::kNotFound, "unknown session " + session_id);
  }
  State::SessionState& ss = it->second;
  ss.last_active = now;
  NextResult result;
  result.cap = ss.session.cap;
  result.submitted_count = ss.session.submitted_count;

  if (!ss.session.practice_done) {
    ss.current_practice = true;
    ss.current.reset();
    result.practice = true;
    result.diff_id = sample_.practice.diff_id;
    result.diff = &sample_.practice.diff;
    return result;
  }
  if (ss.current) {
    const SampleEntry& e = sample_.items[*ss.current];
    result.diff_id = e.diff_id;
    result.diff = &e.diff;
    return result;
  }
  if (ss.session.submitted_count >= ss.session.cap) {
    result.done = true;
    return result;
  }
  const std::string& annotator = ss.session.annotator_id;
  std::optional<size_t> best;
  size_t best_load = std::numeric_limits<size_t>::max();
  for (size_t i = 0; i < sample_.items.size(); ++i) {
    if (st.labeled_by[i].count(annotator) || st.in_flight[i].count(annotator)) continue;
    const size_t load = st.labeled_by[i].size() + st.in_flight[i].size();
    if (!best || load < best_load ||
        (load == best_load &&
         (st.tie[i] < st.tie[*best] ||
          (st.tie[i] == st.tie[*best] && sample_.items[i].diff_id < sample_.items[*best].diff_id)))) {
      best = i;
      best_load = load;
    }
  }
  if (!best) {
    result.done = true;
    return result;
  }
  st.in_flight[*best].insert(annotator);
  ss.current = *best;
  result.diff_id = sample_.items[*best].diff_id;
  result.diff = &sample_.items[*best].diff;
  return result;
}

void AnnotationService::Submit(const std::string& session_id, const std::string& diff_id,
                               const std::set<Category>& categories, bool none_flag,
                               std::optional<std::string> comment) {
  std::lock_guard lock(mu_);
  State& st = *state_;
  const Timestamp now = Now();
  ReleaseIdle(now);
  auto it = st.sessions.find(session_id);
  if (it == st.sessions.end()) {
    throw ServiceError(ServiceError::Kind::kNotFound, "unknown session " + session_id);
  }
  State::SessionState& ss = it->second;
  ss.last_active = now;

  AnnotationRecord record;
  record.diff_id = diff_id;
  record.annotator_id = ss.session.annotator_id;
  record.categories = categories;
  record.none_flag = none_flag;
  record.comment = std::move(comment);
  record.submitted_at = now;
  try {
    ValidateAnnotation(record);
  } catch (const InvalidArgument& e) {
    throw ServiceError(ServiceError::Kind::kValidation, e.what());
  }

  if (ss.current_practice) {
    if (diff_id != sample_.practice.diff_id) {
      throw ServiceError(ServiceError::Kind::kConflict,
                         "diff " + diff_id + " is not assigned to this session");
    }
    ss.session.practice_done = true;
    ss.current_practice = false;
    return;
  }
  auto item = st.index.find(diff_id);
  if (item != st.index.end() && st.labeled_by[item->second].count(record.annotator_id)) {
    throw ServiceError(ServiceError::Kind::kConflict,
                       "diff " + diff_id + " already labeled by " + record.annotator_id);
  }
  if (!ss.current || sample_.items[*ss.current].diff_id != diff_id) {
    throw ServiceError(ServiceError::Kind::kConflict,
                       "diff " + diff_id + " is not assigned to this session");
  }
  if (log_.is_open()) {
    log_ << AnnotationRecordToJson(record).dump() << '\n';
    log_.flush();
    if (!log_) throw Error("label log write failed");
  }
  const size_t i = *ss.current;
  st.in_flight[i].erase(record.annotator_id);
  st.labeled_by[i].insert(record.annotator_id);
  ++st.submitted[record.annotator_id];
  ++ss.session.submitted_count;
  ss.current.reset();
  st.records.push_back(std::move(record));
}

nlohmann::json AnnotationService::Metrics() const {
  std::lock_guard lock(mu_);
  const State& st = *state_;
  size_t labeled = 0;
  size_t covered = 0;
  RuleLabels rules;
  for (size_t i = 0; i < sample_.items.size(); ++i) {
    if (!st.labeled_by[i].empty()) ++labeled;
    if (st.labeled_by[i].size() >= config_.target_annotators) ++covered;
    rules[sample_.items[i].diff_id] = sample_.items[i].rule_labels;
  }
  const StudyReport report = BuildStudyReport(st.records, rules, config_.target_annotators);
  nlohmann::json j = StudyReportToJson(report);
  j["coverage"] = {{"diffs", sample_.items.size()},
                   {"labeled", labeled},
                   {"covered", covered},
                   {"target_annotators", config_.target_annotators},
                   {"summary", std::to_string(covered) + " of " +
                                   std::to_string(sample_.items.size()) + " labeled"}};
  return j;
}

nlohmann::json AnnotationService::Definitions() {
  return {
      {{"category", "citation"},
       {"label", "Citations"},
       {"definition",
        "Adding, removing or changing a citation or reference. The sentence "
        "before the edit made a claim without a source."}},
      {{"category", "point_of_view"},
       {"label", "Point-of-view"},
       {"definition",
        "Rewriting to improve the neutrality of the text: removing bias, "
        "opinion or promotional wording."}},
      {{"category", "clarification"},
       {"label", "Clarifications"},
       {"definition",
        "Specifying or explaining an existing fact or meaning by example or "
        "discussion without adding new information."}},
  };
}

std::vector<AnnotationRecord> AnnotationService::Records() const {
  std::lock_guard lock(mu_);
  return state_->records;
}

std::optional<Session> AnnotationService::GetSession(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  auto it = state_->sessions.find(session_id);
  if (it == state_->sessions.end()) return std::nullopt;
  return it->second.session;
}

std::vector<AnnotationRecord> ReadAnnotationLog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<AnnotationRecord> out;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (internal::Trim(line).empty()) continue;
    try {
      AnnotationRecord r = AnnotationRecordFromJson(nlohmann::json::parse(line));
      ValidateAnnotation(r);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

ServerConfig ParseServerConfig(const std::string& text,
                               const std::filesystem::path& base_dir) {
  ServerConfig config;
  std::istringstream in(text);
  std::string raw;
  size_t number = 0;
  auto resolve = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  auto fail = [&](const std::string& message) {
    throw ParseError("line " + std::to_string(number) + ": " + message);
  };
  auto to_int = [&](std::string_view v) -> long long {
    try {
      size_t used = 0;
      const long long n = std::stoll(std::string(v), &used);
      if (used != v.size()) fail("not an integer: " + std::string(v));
      return n;
    } catch (const std::logic_error&) {
      fail("not an integer: " + std::string(v));
    }
    return 0;
  };
  while (std::getline(in, raw)) {
    ++number;
    const std::string_view line = internal::Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string key(internal::Trim(line.substr(0, eq)));
    const std::string_view value = internal::Trim(line.substr(eq + 1));
    if (key == "listen") {
      const size_t colon = value.rfind(':');
      if (colon == std::string_view::npos) fail("listen must be host:port");
      config.host = std::string(value.substr(0, colon));
      const long long port = to_int(value.substr(colon + 1));
      if (port < 0 || port > 65535) fail("port out of range");
      config.port = static_cast<int>(port);
    } else if (key == "sample") {
      config.sample = resolve(value);
    } else if (key == "log") {
      config.log = resolve(value);
    } else if (key == "cap") {
      const long long cap = to_int(value);
      if (cap <= 0) fail("cap must be positive");
      config.cap = static_cast<int>(cap);
    } else if (key == "seed") {
      const long long seed = to_int(value);
      if (seed < 0) fail("seed must be non-negative");
      config.seed = static_cast<uint64_t>(seed);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return config;
}

ServerConfig LoadServerConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseServerConfig(buffer.str(), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace editintent

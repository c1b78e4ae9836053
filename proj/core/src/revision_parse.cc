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

#include <expat.h>

#include <algorithm>
#include <cstring>
#include <deque>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "editintent/revision_store.h"

namespace editintent {
namespace {

// Element-level state for the MediaWiki export schema. Only the elements we
// keep are captured; everything else (contributor, model, format, ...) is
// skipped by path.
class DumpHandler {
 public:
  explicit DumpHandler(ParseStats* stats) : stats_(stats) {}

  static void OnStart(void* data, const XML_Char* name, const XML_Char** atts) {
    static_cast<DumpHandler*>(data)->Start(name, atts);
  }
  static void OnEnd(void* data, const XML_Char* name) {
    static_cast<DumpHandler*>(data)->End(name);
  }
  static void OnChars(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<DumpHandler*>(data);
    if (self->capture_ != nullptr) self->capture_->append(s, len);
  }

  std::deque<std::vector<Revision>>& completed() { return completed_; }

 private:
  void Start(const char* name, const char** atts) {
    path_.emplace_back(name);
    capture_ = nullptr;
    if (Is("page", 1)) {
      page_ = {};
      page_title_.clear();
      page_id_ = 0;
    } else if (path_.back() == "revision" && Parent("page")) {
      rev_ = {};
      in_revision_ = true;
      has_text_ = false;
      text_deleted_ = false;
      field_.clear();
    } else if (in_revision_ && Parent("revision")) {
      field_.clear();
      if (std::strcmp(name, "text") == 0) {
        has_text_ = true;
        for (int i = 0; atts[i] != nullptr; i += 2) {
          if (std::strcmp(atts[i], "deleted") == 0) text_deleted_ = true;
        }
        rev_.text.clear();
        capture_ = &rev_.text;
      } else {
        capture_ = &field_;
      }
    } else if (!in_revision_ && Parent("page") &&
               (std::strcmp(name, "title") == 0 ||
                std::strcmp(name, "id") == 0)) {
      field_.clear();
      capture_ = &field_;
    }
  }

  void End(const char* name) {
    capture_ = nullptr;
    if (path_.empty()) return;
    const bool in_page_child = path_.size() >= 2 && Parent("page");
    if (in_revision_ && path_.size() >= 2 && Parent("revision")) {
      SetRevisionField(name);
    } else if (!in_revision_ && in_page_child) {
      if (std::strcmp(name, "title") == 0) page_title_ = field_;
      if (std::strcmp(name, "id") == 0) page_id_ = ToInt(field_);
    } else if (std::strcmp(name, "revision") == 0 && in_revision_) {
      in_revision_ = false;
      if (!has_text_ || text_deleted_) {
        ++stats_->skipped_missing_text;
      } else {
        rev_.page_id = page_id_;
        rev_.page_title = page_title_;
        if (rev_.sha1.empty()) {
          rev_.sha1 = Sha1Hex(rev_.text);
          ++stats_->recomputed_sha1;
        }
        page_.push_back(std::move(rev_));
      }
    } else if (std::strcmp(name, "page") == 0) {
      for (Revision& r : page_) {
        r.page_id = page_id_;
        r.page_title = page_title_;
      }
      std::stable_sort(page_.begin(), page_.end(), RevisionOrder);
      if (!page_.empty()) {
        ++stats_->pages;
        stats_->revisions += static_cast<int64_t>(page_.size());
        completed_.push_back(std::move(page_));
      }
      page_.clear();
    }
    path_.pop_back();
  }

  void SetRevisionField(const char* name) {
    if (std::strcmp(name, "id") == 0) {
      rev_.rev_id = ToInt(field_);
    } else if (std::strcmp(name, "parentid") == 0) {
      rev_.parent_id = ToInt(field_);
    } else if (std::strcmp(name, "timestamp") == 0) {
      if (auto ts = ParseTimestamp(field_)) {
        rev_.timestamp = *ts;
      } else {
        bad_field_ = "timestamp '" + field_ + "'";
      }
    } else if (std::strcmp(name, "comment") == 0) {
      rev_.comment = field_;
    } else if (std::strcmp(name, "sha1") == 0) {
      if (field_.size() == 40) {
        rev_.sha1 = field_;
      } else if (auto hex = Base36Sha1ToHex(field_)) {
        rev_.sha1 = *hex;
      }
    }
  }

  int64_t ToInt(const std::string& s) {
    try {
      size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size() || v < 0) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      bad_field_ = "integer '" + s + "'";
      return 0;
    }
  }

  // True for element `name` at `depth` below the document root.
  bool Is(const char* name, size_t depth) const {
    return path_.size() == depth + 1 && path_.back() == name;
  }
  bool Parent(const char* name) const {
    return path_.size() >= 2 && path_[path_.size() - 2] == name;
  }

 public:
  std::string bad_field_;

 private:
  ParseStats* stats_;
  std::vector<std::string> path_;
  std::string* capture_ = nullptr;
  std::string field_;
  std::string page_title_;
  int64_t page_id_ = 0;
  bool in_revision_ = false;
  bool has_text_ = false;
  bool text_deleted_ = false;
  Revision rev_;
  std::vector<Revision> page_;
  std::deque<std::vector<Revision>> completed_;
};

}  // namespace

ParseStats ParseDump(std::istream& in, const PageSink& sink) {
  ParseStats stats;
  DumpHandler handler(&stats);
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), &DumpHandler::OnStart,
                        &DumpHandler::OnEnd);
  XML_SetCharacterDataHandler(parser.get(), &DumpHandler::OnChars);

  std::vector<char> buf(1 << 16);
  bool done = false;
  while (!done) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    done = got < static_cast<std::streamsize>(buf.size());
    if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got),
                  done ? 1 : 0) == XML_STATUS_ERROR) {
      throw ParseError(
          std::string("malformed XML at byte offset ") +
          std::to_string(XML_GetCurrentByteIndex(parser.get())) + ": " +
          XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!handler.bad_field_.empty()) {
      throw ParseError("invalid " + handler.bad_field_ + " near byte offset " +
                       std::to_string(XML_GetCurrentByteIndex(parser.get())));
    }
    auto& completed = handler.completed();
    while (!completed.empty()) {
      sink(std::move(completed.front()));
      completed.pop_front();
    }
  }
  return stats;
}

ParseStats ParseJsonl(std::istream& in, const PageSink& sink) {
  ParseStats stats;
  std::vector<Revision> page;
  std::set<int64_t> flushed;
  auto flush = [&] {
    if (page.empty()) return;
    std::stable_sort(page.begin(), page.end(), RevisionOrder);
    flushed.insert(page.front().page_id);
    ++stats.pages;
    stats.revisions += static_cast<int64_t>(page.size());
    sink(std::move(page));
    page.clear();
  };

  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Revision rev;
    try {
      const bool had_sha1 = line.find("\"sha1\"") != std::string::npos;
      rev = RevisionFromJson(nlohmann::json::parse(line));
      if (!had_sha1) ++stats.recomputed_sha1;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!page.empty() && page.front().page_id != rev.page_id) flush();
    if (page.empty() && flushed.count(rev.page_id) != 0) {
      throw ParseError("line " + std::to_string(line_no) + ": page " +
                       std::to_string(rev.page_id) +
                       " is not contiguous in the input");
    }
    page.push_back(std::move(rev));
  }
  flush();
  return stats;
}

std::vector<std::vector<Revision>> ReadAllPages(
    const std::function<ParseStats(const PageSink&)>& parse) {
  std::vector<std::vector<Revision>> pages;
  parse([&](std::vector<Revision>&& page) { pages.push_back(std::move(page)); });
  return pages;
}

Assessments ParseAssessments(std::istream& in) {
  Assessments out;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const int64_t page_id = j.at("page_id").get<int64_t>();
      auto q = ParseQualityClass(j.at("quality_class").get<std::string>());
      if (!q) throw ParseError("unknown quality_class");
      out[page_id] = *q;
    } catch (const std::exception& e) {
      throw ParseError("assessments line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return out;
}

void ApplyAssessments(const Assessments& assessments,
                      std::vector<Revision>& page) {
  for (Revision& rev : page) {
    if (auto it = assessments.find(rev.page_id); it != assessments.end()) {
      rev.quality_class = it->second;
    }
  }
}

}  // namespace editintent

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

#include <algorithm>
#include <thread>
#include <variant>

#include "editintent/revision_store.h"
#include "httplib.h"

namespace editintent {
namespace {

struct Endpoint {
  std::string scheme_host_port;
  std::string path;
};

Endpoint SplitUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InvalidArgument("API URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class ApiClient {
 public:
  ApiClient(const std::string& api_url, const FetchOptions& options)
      : endpoint_(SplitUrl(api_url)),
        client_(endpoint_.scheme_host_port),
        options_(options) {
    client_.set_connection_timeout(options.timeout);
    client_.set_read_timeout(options.timeout);
  }

  // Returns the decoded JSON body or an error message.
  std::variant<nlohmann::json, std::string> Query(const httplib::Params& params) {
    auto backoff = options_.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
      Throttle();
      const httplib::Headers headers = {{"User-Agent", options_.user_agent}};
      auto res = client_.Get(endpoint_.path, params, headers);
      if (!res) {
        last_error = "connection failed: " + httplib::to_string(res.error());
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
      } else if (res->status != 200) {
        return "HTTP " + std::to_string(res->status);
      } else {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          return std::string("invalid JSON response: ") + e.what();
        }
      }
      if (attempt < options_.max_attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    return last_error + " after " + std::to_string(options_.max_attempts) +
           " attempts";
  }

 private:
  void Throttle() {
    const auto now = std::chrono::steady_clock::now();
    if (last_request_ && now - *last_request_ < options_.min_request_interval) {
      std::this_thread::sleep_for(options_.min_request_interval -
                                  (now - *last_request_));
    }
    last_request_ = std::chrono::steady_clock::now();
  }

  Endpoint endpoint_;
  httplib::Client client_;
  FetchOptions options_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
};

// Decodes one formatversion=2 revision object. Returns nullopt when the
// content is hidden.
std::optional<Revision> DecodeRevision(const nlohmann::json& r,
                                       int64_t page_id,
                                       const std::string& title) {
  Revision rev;
  rev.rev_id = r.at("revid").get<int64_t>();
  rev.page_id = page_id;
  rev.page_title = title;
  if (auto it = r.find("parentid"); it != r.end() && it->get<int64_t>() > 0) {
    rev.parent_id = it->get<int64_t>();
  }
  auto ts = ParseTimestamp(r.at("timestamp").get<std::string>());
  if (!ts) throw ParseError("bad timestamp for revid " +
                            std::to_string(rev.rev_id));
  rev.timestamp = *ts;
  if (auto it = r.find("comment"); it != r.end() && it->is_string()) {
    rev.comment = it->get<std::string>();
  }
  const nlohmann::json* content = nullptr;
  if (auto slots = r.find("slots"); slots != r.end()) {
    auto main = slots->find("main");
    if (main != slots->end() && main->contains("content")) {
      content = &(*main)["content"];
    }
  } else if (auto it = r.find("content"); it != r.end()) {
    content = &*it;
  }
  if (content == nullptr || !content->is_string()) return std::nullopt;
  rev.text = content->get<std::string>();
  rev.sha1 = Sha1Hex(rev.text);
  if (auto it = r.find("sha1"); it != r.end() && it->is_string() &&
                                it->get<std::string>() != rev.sha1) {
    throw ParseError("sha1 mismatch for revid " + std::to_string(rev.rev_id));
  }
  return rev;
}

}  // namespace

FetchReport FetchRevisions(const std::string& api_url,
                           const std::vector<std::string>& titles,
                           int limit_per_page, RevisionStore& store,
                           const FetchOptions& options) {
  if (limit_per_page <= 0) throw InvalidArgument("limit_per_page must be > 0");
  FetchReport report;
  ApiClient client(api_url, options);

  for (const std::string& title : titles) {
    int remaining = limit_per_page;
    std::string rvcontinue;
    try {
      while (remaining > 0) {
        httplib::Params params = {
            {"action", "query"},       {"prop", "revisions"},
            {"titles", title},         {"rvprop", "ids|timestamp|comment|sha1|content"},
            {"rvslots", "main"},       {"rvdir", "newer"},
            {"format", "json"},        {"formatversion", "2"},
            {"rvlimit", std::to_string(std::min(remaining, 50))}};
        if (!rvcontinue.empty()) params.emplace("rvcontinue", rvcontinue);

        auto result = client.Query(params);
        if (auto* err = std::get_if<std::string>(&result)) {
          report.errors.push_back({title, *err});
          break;
        }
        const auto& body = std::get<nlohmann::json>(result);
        if (body.contains("error")) {
          report.errors.push_back(
              {title, body["error"].value("info", std::string("API error"))});
          break;
        }
        const auto& pages = body.at("query").at("pages");
        if (pages.empty() || pages[0].value("missing", false) ||
            pages[0].value("invalid", false)) {
          report.errors.push_back({title, "unknown title"});
          break;
        }
        const auto& page = pages[0];
        const int64_t page_id = page.at("pageid").get<int64_t>();
        const std::string page_title = page.value("title", title);
        for (const auto& r : page.value("revisions", nlohmann::json::array())) {
          if (remaining == 0) break;
          --remaining;
          auto rev = DecodeRevision(r, page_id, page_title);
          if (!rev) continue;
          if (store.Put(*rev)) {
            ++report.stored;
          } else {
            ++report.duplicates;
          }
        }
        auto cont = body.find("continue");
        if (cont == body.end() || !cont->contains("rvcontinue")) break;
        rvcontinue = (*cont)["rvcontinue"].get<std::string>();
      }
    } catch (const std::exception& e) {
      report.errors.push_back({title, e.what()});
    }
  }
  return report;
}

}  // namespace editintent

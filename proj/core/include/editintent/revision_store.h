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
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "editintent/revision.h"

namespace editintent {

// Receives one page's revisions at a time, sorted by RevisionOrder.
using PageSink = std::function<void(std::vector<Revision>&& page)>;

struct ParseStats {
  int64_t pages = 0;
  int64_t revisions = 0;
  int64_t skipped_missing_text = 0;
  int64_t recomputed_sha1 = 0;
};

// Streams a MediaWiki export (pages-meta-history layout). Only one page is
// buffered at a time. Throws ParseError with the byte offset on malformed
// XML. Revisions without a <text> element, or with deleted text, are skipped
// and counted.
ParseStats ParseDump(std::istream& in, const PageSink& sink);

// Streams JSONL revisions. Lines of one page must be contiguous; each
// contiguous run is re-sorted before it is handed to `sink`. Throws
// ParseError naming the 1-based line number.
ParseStats ParseJsonl(std::istream& in, const PageSink& sink);

// Convenience: collects every page from either parser.
std::vector<std::vector<Revision>> ReadAllPages(
    const std::function<ParseStats(const PageSink&)>& parse);

// page_id -> quality_class from the JSONL assessment sidecar.
using Assessments = std::unordered_map<int64_t, QualityClass>;
Assessments ParseAssessments(std::istream& in);
void ApplyAssessments(const Assessments& assessments,
                      std::vector<Revision>& page);

class StoreError : public Error {
 public:
  using Error::Error;
};

// Page-indexed on-disk revision store: one append-only record file per page
// plus an append-only index. Layout is documented in docs/formats.md.
//
// One writer and any number of readers per process.
class RevisionStore {
 public:
  // Opens or creates a store rooted at `dir`.
  explicit RevisionStore(std::filesystem::path dir);

  // Returns false when the rev_id is already stored. Throws StoreError if
  // the sha1 does not match the text.
  bool Put(const Revision& rev);

  // Revisions of one page in (timestamp, rev_id) order. Unknown page: empty.
  // Throws StoreError naming the rev_id of a corrupt record.
  std::vector<Revision> Scan(int64_t page_id) const;

  bool Contains(int64_t rev_id) const;
  std::vector<int64_t> PageIds() const;
  size_t size() const;

  const std::filesystem::path& dir() const { return dir_; }

  static constexpr std::string_view kIndexMagic = "EDITINTENT-STORE v1";
  static constexpr std::string_view kPageMagic = "EIREV001";

 private:
  std::filesystem::path PagePath(int64_t page_id) const;
  void LoadIndex();

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::map<int64_t, std::set<int64_t>> pages_;  // page_id -> rev_ids
  std::unordered_map<int64_t, int64_t> rev_to_page_;
};

// Client options for a MediaWiki action API endpoint.
struct FetchOptions {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds min_request_interval{100};  // rate limit
  std::chrono::seconds timeout{30};
  std::string user_agent = "editintent/0.1 (revision fetcher)";
};

struct FetchError {
  std::string title;
  std::string message;
};

struct FetchReport {
  int64_t stored = 0;
  int64_t duplicates = 0;
  std::vector<FetchError> errors;
};

// Fetches up to `limit_per_page` oldest-first revisions for each title from
// `api_url` (a full api.php URL) and persists them to `store`. Failures are
// per title; the remaining titles are still fetched.
FetchReport FetchRevisions(const std::string& api_url,
                           const std::vector<std::string>& titles,
                           int limit_per_page, RevisionStore& store,
                           const FetchOptions& options = {});

}  // namespace editintent

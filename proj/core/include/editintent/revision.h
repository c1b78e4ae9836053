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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "editintent/types.h"
#include "json.hpp"

namespace editintent {

// One stored page version.
struct Revision {
  int64_t rev_id = 0;
  int64_t page_id = 0;
  std::optional<int64_t> parent_id;  // absent for page creations
  Timestamp timestamp{};
  std::string comment;
  std::string sha1;  // 40-char lowercase hex digest of `text`
  std::string text;
  std::string page_title;
  std::optional<QualityClass> quality_class;

  friend bool operator==(const Revision&, const Revision&) = default;
};

// Lowercase hex SHA-1 of `data`.
std::string Sha1Hex(std::string_view data);

// MediaWiki dumps carry base-36 SHA-1 digests. Converts one to 40-char hex;
// returns nullopt if `digest` is not valid base 36 or overflows 160 bits.
std::optional<std::string> Base36Sha1ToHex(std::string_view digest);

// Total order used everywhere revisions of one page are sorted.
inline bool RevisionOrder(const Revision& a, const Revision& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.rev_id < b.rev_id;
}

// JSON object with exactly the Revision field names.
nlohmann::json RevisionToJson(const Revision& rev);

// Throws ParseError naming the offending field. A missing or empty sha1 is
// recomputed from text.
Revision RevisionFromJson(const nlohmann::json& j);

}  // namespace editintent

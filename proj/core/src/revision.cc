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

#include "editintent/revision.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace editintent {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

std::string ToHex(const unsigned char* data, size_t size) {
  std::string out;
  out.reserve(size * 2);
  for (size_t i = 0; i < size; ++i) {
    out.push_back(kHexDigits[data[i] >> 4]);
    out.push_back(kHexDigits[data[i] & 0xf]);
  }
  return out;
}

bool IsHexSha1(std::string_view s) {
  if (s.size() != 40) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace

std::string_view CategoryName(Category category) {
  switch (category) {
    case Category::kCitation:
      return "citation";
    case Category::kPointOfView:
      return "point_of_view";
    case Category::kClarification:
      return "clarification";
  }
  return "unknown";
}

std::optional<Category> ParseCategory(std::string_view name) {
  if (name == "citation" || name == "citations") return Category::kCitation;
  if (name == "point_of_view" || name == "pov" || name == "point-of-view") {
    return Category::kPointOfView;
  }
  if (name == "clarification" || name == "clarifications") {
    return Category::kClarification;
  }
  return std::nullopt;
}

std::string_view QualityClassName(QualityClass quality) {
  switch (quality) {
    case QualityClass::kStub:
      return "Stub";
    case QualityClass::kStart:
      return "Start";
    case QualityClass::kC:
      return "C";
    case QualityClass::kB:
      return "B";
    case QualityClass::kGA:
      return "GA";
    case QualityClass::kFA:
      return "FA";
    case QualityClass::kUnassessed:
      return "Unassessed";
  }
  return "Unassessed";
}

std::optional<QualityClass> ParseQualityClass(std::string_view name) {
  for (QualityClass q :
       {QualityClass::kStub, QualityClass::kStart, QualityClass::kC,
        QualityClass::kB, QualityClass::kGA, QualityClass::kFA,
        QualityClass::kUnassessed}) {
    if (QualityClassName(q) == name) return q;
  }
  return std::nullopt;
}

std::string FormatTimestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss hms{ts - day};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  using namespace std::chrono;
  if (text.size() < 19) return std::nullopt;
  int y, mo, d, h, mi, s;
  char sep;
  std::string copy(text);
  if (std::sscanf(copy.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep,
                  &h, &mi, &s) != 7) {
    return std::nullopt;
  }
  if (sep != 'T' && sep != ' ') return std::nullopt;
  if (text.size() > 19 && !(text.size() == 20 && text[19] == 'Z')) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    return std::nullopt;
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string Sha1Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha1(), nullptr);
  return ToHex(md.data(), len);
}

std::optional<std::string> Base36Sha1ToHex(std::string_view digest) {
  if (digest.empty()) return std::nullopt;
  // Big-endian 160-bit accumulator.
  std::array<unsigned char, 20> value{};
  for (char c : digest) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'z') {
      v = c - 'a' + 10;
    } else {
      return std::nullopt;
    }
    unsigned carry = static_cast<unsigned>(v);
    for (int i = 19; i >= 0; --i) {
      const unsigned cur = value[i] * 36u + carry;
      value[i] = static_cast<unsigned char>(cur & 0xff);
      carry = cur >> 8;
    }
    if (carry != 0) return std::nullopt;
  }
  return ToHex(value.data(), value.size());
}

nlohmann::json RevisionToJson(const Revision& rev) {
  nlohmann::json j;
  j["rev_id"] = rev.rev_id;
  j["page_id"] = rev.page_id;
  j["parent_id"] = rev.parent_id ? nlohmann::json(*rev.parent_id) : nullptr;
  j["timestamp"] = FormatTimestamp(rev.timestamp);
  j["comment"] = rev.comment;
  j["sha1"] = rev.sha1;
  j["text"] = rev.text;
  j["page_title"] = rev.page_title;
  j["quality_class"] =
      rev.quality_class
          ? nlohmann::json(std::string(QualityClassName(*rev.quality_class)))
          : nullptr;
  return j;
}

Revision RevisionFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("revision is not a JSON object");
  auto require = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      throw ParseError(std::string("missing field '") + key + "'");
    }
    return *it;
  };
  auto as_id = [](const nlohmann::json& v, const char* key) -> int64_t {
    if (!v.is_number_integer() || v.get<int64_t>() < 0) {
      throw ParseError(std::string("field '") + key +
                       "' must be a non-negative integer");
    }
    return v.get<int64_t>();
  };
  auto as_string = [](const nlohmann::json& v, const char* key) {
    if (!v.is_string()) {
      throw ParseError(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
  };

  Revision rev;
  rev.rev_id = as_id(require("rev_id"), "rev_id");
  rev.page_id = as_id(require("page_id"), "page_id");
  if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
    rev.parent_id = as_id(*it, "parent_id");
  }
  const std::string ts = as_string(require("timestamp"), "timestamp");
  auto parsed = ParseTimestamp(ts);
  if (!parsed) throw ParseError("field 'timestamp' is not ISO-8601: " + ts);
  rev.timestamp = *parsed;
  if (auto it = j.find("comment"); it != j.end() && !it->is_null()) {
    rev.comment = as_string(*it, "comment");
  }
  rev.text = as_string(require("text"), "text");
  if (auto it = j.find("page_title"); it != j.end() && !it->is_null()) {
    rev.page_title = as_string(*it, "page_title");
  }
  if (auto it = j.find("quality_class"); it != j.end() && !it->is_null()) {
    auto q = ParseQualityClass(as_string(*it, "quality_class"));
    if (!q) throw ParseError("unknown quality_class");
    rev.quality_class = q;
  }
  if (auto it = j.find("sha1"); it != j.end() && !it->is_null()) {
    rev.sha1 = as_string(*it, "sha1");
  }
  if (rev.sha1.empty()) {
    rev.sha1 = Sha1Hex(rev.text);
  } else if (!IsHexSha1(rev.sha1)) {
    auto hex = Base36Sha1ToHex(rev.sha1);
    if (!hex) throw ParseError("field 'sha1' is neither hex nor base-36");
    rev.sha1 = *hex;
  }
  return rev;
}

}  // namespace editintent

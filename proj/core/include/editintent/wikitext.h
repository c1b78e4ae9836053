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

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace editintent {

// Regex mode for the markup detectors.
//
// kStrict reproduces the original rule regexes byte-for-byte:
//   citation   <ref>|\{\{Cite\}\}
//   template   \{\{[^\{]+\}\}
//   wikilink   \[\[[^\[]+\]\]
//   infobox    ^$|[a-zA-Z0-9 ]+=      (searched unanchored)
//   multiline  \n
//   comment    pov|pointy             (case-sensitive, unbounded)
//
// kDefault broadens citation matching to any "<ref" tag (attributes and
// self-closing forms) and case-insensitive "{{ cite", anchors the infobox
// key at the start and admits '_' in keys, and matches the comment words
// case-insensitively on word boundaries. Every strict citation match is
// also a default match.
enum class RegexMode { kStrict, kDefault };

namespace patterns {
inline constexpr std::string_view kStrictCitation = R"(<ref>|\{\{Cite\}\})";
inline constexpr std::string_view kStrictTemplate = R"(\{\{[^\{]+\}\})";
inline constexpr std::string_view kStrictWikilink = R"(\[\[[^\[]+\]\])";
inline constexpr std::string_view kStrictInfobox = R"(^$|[a-zA-Z0-9 ]+=)";
inline constexpr std::string_view kStrictMultiline = R"(\n)";
inline constexpr std::string_view kStrictComment = R"(pov|pointy)";

inline constexpr std::string_view kDefaultCitation =
    R"(<ref[\s>/]|\{\{\s*cite)";  // case-insensitive
inline constexpr std::string_view kDefaultInfobox = R"(^$|^[A-Za-z0-9_ ]+=)";
inline constexpr std::string_view kDefaultComment =
    R"(\b(pov|pointy)\b)";  // case-insensitive
}  // namespace patterns

bool DetectCitation(std::string_view text, RegexMode mode = RegexMode::kDefault);
bool DetectTemplate(std::string_view text, RegexMode mode = RegexMode::kDefault);
bool DetectWikilink(std::string_view text, RegexMode mode = RegexMode::kDefault);
bool DetectInfoboxParam(std::string_view text,
                        RegexMode mode = RegexMode::kDefault);
bool IsMultiline(std::string_view text);
bool CommentMatchesPov(std::string_view comment,
                       RegexMode mode = RegexMode::kDefault);

// Removes ref spans, templates, comments, residual tags and bold/italic
// quotes; [[target|label]] becomes label and [[target]] becomes target;
// whitespace is collapsed. Idempotent.
std::string StripMarkup(std::string_view text);

// True when nothing but markup and punctuation remains after StripMarkup.
// Wikilink labels survive stripping, so "[[Paris]]" is content.
bool IsMarkupOnly(std::string_view text);

// Byte span [start, end) of one sentence in its source text.
struct SentenceSpan {
  size_t start = 0;
  size_t end = 0;
  std::string_view text;

  friend bool operator==(const SentenceSpan& a, const SentenceSpan& b) {
    return a.start == b.start && a.end == b.end;
  }
};

// Lowercase tokens (without the trailing period) that never end a sentence.
class AbbreviationList {
 public:
  // The list shipped in core/data/abbreviations.txt.
  static const AbbreviationList& Default();

  // One token per line; '#' starts a comment line.
  static AbbreviationList Parse(std::string_view data);

  bool Contains(std::string_view lowercase_token) const {
    return tokens_.count(std::string(lowercase_token)) != 0;
  }
  size_t size() const { return tokens_.size(); }

 private:
  std::unordered_set<std::string> tokens_;
};

// Deterministic rule-based splitter. A sentence ends at '.', '!' or '?'
// (plus closing quotes/brackets and any directly attached refs or
// templates) followed by whitespace and a capital, or by the end of text.
// Newlines always end a sentence. Text inside <ref>..</ref>, {{..}} and
// [[..]] never splits, nor do abbreviations and single-letter initials.
//
// Spans exclude surrounding whitespace; the gaps between them are
// whitespace only. Returned views point into `text`.
std::vector<SentenceSpan> SplitSentences(
    std::string_view text,
    const AbbreviationList& abbreviations = AbbreviationList::Default());

// "external links" -> "External_links". Idempotent.
std::string NormalizeSectionTitle(std::string_view title);

// If `line` is a heading ("== Title =="), returns the title text.
std::optional<std::string> ParseHeading(std::string_view line);

// Whitespace-split token count (the rule engine's word length).
size_t CountWords(std::string_view text);

}  // namespace editintent

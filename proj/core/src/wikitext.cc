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

#include "editintent/wikitext.h"

#include <algorithm>
#include <cctype>

#include "abbreviations_data.h"
#include "text_util.h"

namespace editintent {
namespace {

using internal::IsSpace;
using internal::IsWordByte;
using internal::StartsWithIcase;

// Finds a "{{ ... }}"-style construct whose interior has no `open` char.
// Mirrors <open><open>[^<open>]+<close><close>.
bool HasDoubledBracketRun(std::string_view text, char open, char close) {
  const size_t n = text.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    if (text[i] != open || text[i + 1] != open) continue;
    const size_t body = i + 2;
    size_t k = body;
    while (k < n && text[k] != open) ++k;
    // Need at least one interior char before the closing pair, all in [body, k).
    for (size_t p = body + 1; p + 1 < k; ++p) {
      if (text[p] == close && text[p + 1] == close) return true;
    }
  }
  return false;
}

bool IsKeyChar(char c, bool allow_underscore) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == ' ' ||
         (allow_underscore && c == '_');
}

// A "<ref" opener followed by whitespace, '>' or '/'.
bool IsRefOpenerAt(std::string_view text, size_t i) {
  if (!StartsWithIcase(text.substr(i), "<ref")) return false;
  if (i + 4 >= text.size()) return false;
  const char next = text[i + 4];
  return next == '>' || next == '/' || IsSpace(next);
}

bool IsCiteTemplateAt(std::string_view text, size_t i) {
  if (text.compare(i, 2, "{{") != 0) return false;
  size_t k = i + 2;
  while (k < text.size() && IsSpace(text[k])) ++k;
  return StartsWithIcase(text.substr(k), "cite");
}

// Returns the end of the balanced construct starting at `i`, or npos.
size_t SkipBalanced(std::string_view text, size_t i, std::string_view open,
                    std::string_view close) {
  int depth = 0;
  size_t k = i;
  while (k < text.size()) {
    if (text.compare(k, open.size(), open) == 0) {
      ++depth;
      k += open.size();
    } else if (text.compare(k, close.size(), close) == 0) {
      --depth;
      k += close.size();
      if (depth == 0) return k;
    } else {
      ++k;
    }
  }
  return std::string_view::npos;
}

// End of a <ref ...>...</ref> or <ref .../> starting at `i`, or npos when
// the construct is unterminated. `tag_end` receives the end of the opener.
size_t SkipRef(std::string_view text, size_t i, size_t* tag_end = nullptr) {
  const size_t gt = text.find('>', i);
  if (gt == std::string_view::npos) return std::string_view::npos;
  if (tag_end != nullptr) *tag_end = gt + 1;
  if (text[gt - 1] == '/') return gt + 1;
  for (size_t k = gt + 1; k + 5 < text.size() + 1; ++k) {
    if (StartsWithIcase(text.substr(k), "</ref")) {
      const size_t close = text.find('>', k);
      return close == std::string_view::npos ? text.size() : close + 1;
    }
  }
  return std::string_view::npos;
}

bool HasPrefixIcase(std::string_view s, std::initializer_list<std::string_view> prefixes) {
  for (auto p : prefixes) {
    if (StartsWithIcase(s, p)) return true;
  }
  return false;
}

// One stripping pass; StripMarkup iterates it to a fixed point.
std::string StripOnce(std::string_view text);

std::string StripLink(std::string_view inner) {
  std::string_view trimmed = internal::Trim(inner);
  if (HasPrefixIcase(trimmed, {"file:", "image:", "category:", "media:"})) {
    return "";
  }
  // Label is the text after the last top-level '|'.
  int depth = 0;
  size_t last_pipe = std::string_view::npos;
  for (size_t k = 0; k < inner.size(); ++k) {
    if (inner.compare(k, 2, "[[") == 0 || inner.compare(k, 2, "{{") == 0) {
      ++depth;
      ++k;
    } else if (inner.compare(k, 2, "]]") == 0 || inner.compare(k, 2, "}}") == 0) {
      --depth;
      ++k;
    } else if (inner[k] == '|' && depth == 0) {
      last_pipe = k;
    }
  }
  std::string_view label = inner;
  if (last_pipe != std::string_view::npos) {
    label = inner.substr(last_pipe + 1);
    if (internal::Trim(label).empty()) label = inner.substr(0, last_pipe);
  }
  return StripOnce(label);
}

std::string StripOnce(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const size_t n = text.size();
  size_t i = 0;
  while (i < n) {
    const char c = text[i];
    if (c == '<') {
      if (text.compare(i, 4, "<!--") == 0) {
        const size_t end = text.find("-->", i + 4);
        i = end == std::string_view::npos ? n : end + 3;
        continue;
      }
      if (IsRefOpenerAt(text, i)) {
        const size_t end = SkipRef(text, i);
        i = end == std::string_view::npos ? n : end;
        continue;
      }
      if (i + 1 < n && (std::isalpha(static_cast<unsigned char>(text[i + 1])) ||
                        text[i + 1] == '/')) {
        const size_t gt = text.find('>', i);
        const size_t lt = text.find('<', i + 1);
        if (gt != std::string_view::npos && (lt == std::string_view::npos || gt < lt)) {
          out.push_back(' ');
          i = gt + 1;
          continue;
        }
      }
    } else if (c == '{' && i + 1 < n && text[i + 1] == '{') {
      const size_t end = SkipBalanced(text, i, "{{", "}}");
      i = end == std::string_view::npos ? n : end;
      continue;
    } else if (c == '[' && i + 1 < n && text[i + 1] == '[') {
      const size_t end = SkipBalanced(text, i, "[[", "]]");
      if (end == std::string_view::npos) {
        i += 2;
        continue;
      }
      out += StripLink(text.substr(i + 2, end - i - 4));
      i = end;
      continue;
    } else if (c == '[' &&
               HasPrefixIcase(text.substr(i + 1),
                              {"http://", "https://", "ftp://", "//"})) {
      const size_t close = text.find(']', i);
      if (close != std::string_view::npos) {
        const std::string_view inner = text.substr(i + 1, close - i - 1);
        const size_t space = inner.find(' ');
        if (space != std::string_view::npos) out += inner.substr(space + 1);
        i = close + 1;
        continue;
      }
    } else if (c == '\'' && i + 1 < n && text[i + 1] == '\'') {
      while (i < n && text[i] == '\'') ++i;
      continue;
    }
    out.push_back(c);
    ++i;
  }

  // Collapse whitespace.
  std::string collapsed;
  collapsed.reserve(out.size());
  bool pending_space = false;
  for (char ch : out) {
    if (IsSpace(ch)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    collapsed.push_back(ch);
  }
  return collapsed;
}

// Token before the '.' at `pos`: maximal run of letters and dots.
std::string_view TokenBefore(std::string_view text, size_t pos) {
  size_t b = pos;
  while (b > 0) {
    const char p = text[b - 1];
    if (std::isalpha(static_cast<unsigned char>(p)) || p == '.') {
      --b;
    } else {
      break;
    }
  }
  return text.substr(b, pos - b);
}

bool IsAbbreviationAt(std::string_view text, size_t pos,
                      const AbbreviationList& abbreviations) {
  const std::string_view token = TokenBefore(text, pos);
  if (token.empty()) return false;
  if (token.size() == 1 && std::isupper(static_cast<unsigned char>(token[0]))) {
    return true;  // initial
  }
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return abbreviations.Contains(lower);
}

bool StartsSentence(std::string_view text, size_t k) {
  const size_t n = text.size();
  while (k < n) {
    if (text[k] == '"' || text[k] == '(' || text[k] == '\'') {
      ++k;
    } else if (text.compare(k, 2, "[[") == 0) {
      k += 2;
    } else {
      break;
    }
  }
  return k < n && std::isupper(static_cast<unsigned char>(text[k]));
}

// Skips a protected construct starting at `i`; returns `i` if none starts
// there.
size_t SkipProtected(std::string_view text, size_t i) {
  if (text[i] == '<' && IsRefOpenerAt(text, i)) {
    size_t tag_end = i + 1;
    const size_t end = SkipRef(text, i, &tag_end);
    return end == std::string_view::npos ? tag_end : end;
  }
  if (text.compare(i, 4, "<!--") == 0) {
    const size_t end = text.find("-->", i + 4);
    return end == std::string_view::npos ? i + 4 : end + 3;
  }
  if (text.compare(i, 2, "{{") == 0) {
    const size_t end = SkipBalanced(text, i, "{{", "}}");
    return end == std::string_view::npos ? i + 2 : end;
  }
  if (text.compare(i, 2, "[[") == 0) {
    const size_t end = SkipBalanced(text, i, "[[", "]]");
    return end == std::string_view::npos ? i + 2 : end;
  }
  return i;
}

}  // namespace

bool DetectCitation(std::string_view text, RegexMode mode) {
  if (mode == RegexMode::kStrict) {
    return text.find("<ref>") != std::string_view::npos ||
           text.find("{{Cite}}") != std::string_view::npos;
  }
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '<' && IsRefOpenerAt(text, i)) return true;
    if (text[i] == '{' && IsCiteTemplateAt(text, i)) return true;
  }
  return false;
}

bool DetectTemplate(std::string_view text, RegexMode) {
  return HasDoubledBracketRun(text, '{', '}');
}

bool DetectWikilink(std::string_view text, RegexMode) {
  return HasDoubledBracketRun(text, '[', ']');
}

bool DetectInfoboxParam(std::string_view text, RegexMode mode) {
  if (text.empty()) return true;
  if (mode == RegexMode::kStrict) {
    for (size_t i = 1; i < text.size(); ++i) {
      if (text[i] == '=' && IsKeyChar(text[i - 1], false)) return true;
    }
    return false;
  }
  size_t k = 0;
  while (k < text.size() && IsKeyChar(text[k], true)) ++k;
  return k > 0 && k < text.size() && text[k] == '=';
}

bool IsMultiline(std::string_view text) {
  return text.find('\n') != std::string_view::npos;
}

bool CommentMatchesPov(std::string_view comment, RegexMode mode) {
  if (mode == RegexMode::kStrict) {
    return comment.find("pov") != std::string_view::npos ||
           comment.find("pointy") != std::string_view::npos;
  }
  for (std::string_view word : {std::string_view("pov"), std::string_view("pointy")}) {
    for (size_t i = 0; i + word.size() <= comment.size(); ++i) {
      if (!StartsWithIcase(comment.substr(i), word)) continue;
      const bool left = i == 0 || !IsWordByte(comment[i - 1]);
      const size_t after = i + word.size();
      const bool right = after == comment.size() || !IsWordByte(comment[after]);
      if (left && right) return true;
    }
  }
  return false;
}

std::string StripMarkup(std::string_view text) {
  std::string current = StripOnce(text);
  for (int iter = 0; iter < 16; ++iter) {
    std::string next = StripOnce(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

bool IsMarkupOnly(std::string_view text) {
  const std::string stripped = StripMarkup(text);
  return std::none_of(stripped.begin(), stripped.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) ||
           static_cast<unsigned char>(c) >= 0x80;
  });
}

const AbbreviationList& AbbreviationList::Default() {
  static const AbbreviationList list = Parse(internal::kAbbreviationsData);
  return list;
}

AbbreviationList AbbreviationList::Parse(std::string_view data) {
  AbbreviationList list;
  size_t pos = 0;
  while (pos <= data.size()) {
    size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) eol = data.size();
    std::string_view line = internal::Trim(data.substr(pos, eol - pos));
    if (!line.empty() && line[0] != '#') {
      std::string token(line);
      if (!token.empty() && token.back() == '.') token.pop_back();
      std::transform(token.begin(), token.end(), token.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      list.tokens_.insert(std::move(token));
    }
    pos = eol + 1;
  }
  return list;
}

std::vector<SentenceSpan> SplitSentences(std::string_view text,
                                         const AbbreviationList& abbreviations) {
  std::vector<SentenceSpan> spans;
  const size_t n = text.size();
  auto skip_ws = [&](size_t k) {
    while (k < n && IsSpace(text[k])) ++k;
    return k;
  };
  auto emit = [&](size_t start, size_t end) {
    while (end > start && IsSpace(text[end - 1])) --end;
    if (end > start) spans.push_back({start, end, text.substr(start, end - start)});
  };

  size_t start = skip_ws(0);
  size_t pos = start;
  while (pos < n) {
    const char c = text[pos];
    if (c == '\n') {
      emit(start, pos);
      start = pos = skip_ws(pos);
      continue;
    }
    if (c == '<' || c == '{' || c == '[') {
      const size_t skipped = SkipProtected(text, pos);
      if (skipped != pos) {
        pos = skipped;
        continue;
      }
    }
    if (c != '.' && c != '!' && c != '?') {
      ++pos;
      continue;
    }

    size_t j = pos;
    while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    const bool single_period = c == '.' && j == pos + 1;
    while (j < n && (text[j] == '"' || text[j] == '\'' || text[j] == ')' ||
                     text[j] == ']')) {
      ++j;
    }
    for (;;) {
      if (j < n && (text[j] == '<' || text[j] == '{')) {
        const size_t skipped = SkipProtected(text, j);
        if (skipped != j) {
          j = skipped;
          continue;
        }
      }
      break;
    }
    if (single_period && IsAbbreviationAt(text, pos, abbreviations)) {
      pos = j;
      continue;
    }
    bool boundary = false;
    if (j == n) {
      boundary = true;
    } else if (IsSpace(text[j])) {
      size_t k = j;
      while (k < n && IsSpace(text[k]) && text[k] != '\n') ++k;
      boundary = k == n || text[k] == '\n' || StartsSentence(text, k);
    }
    if (!boundary) {
      pos = j;
      continue;
    }
    emit(start, j);
    start = pos = skip_ws(j);
  }
  if (start < n) emit(start, n);
  return spans;
}

std::string NormalizeSectionTitle(std::string_view title) {
  std::string out(internal::Trim(title));
  std::replace(out.begin(), out.end(), ' ', '_');
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

std::optional<std::string> ParseHeading(std::string_view line) {
  std::string_view s = internal::Trim(line);
  size_t lead = 0;
  while (lead < s.size() && s[lead] == '=') ++lead;
  size_t trail = 0;
  while (trail < s.size() - lead && s[s.size() - 1 - trail] == '=') ++trail;
  if (lead == 0 || trail == 0) return std::nullopt;
  std::string_view inner = internal::Trim(s.substr(lead, s.size() - lead - trail));
  if (inner.empty()) return std::nullopt;
  return std::string(inner);
}

size_t CountWords(std::string_view text) {
  size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

}  // namespace editintent

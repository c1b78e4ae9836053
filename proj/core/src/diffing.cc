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

#include "editintent/diffing.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "editintent/wikitext.h"
#include "text_util.h"

namespace editintent {
namespace {

using internal::IsSpace;

// Interns items so the LCS core compares integers.
std::pair<std::vector<int>, std::vector<int>> Intern(
    const std::vector<std::string_view>& a,
    const std::vector<std::string_view>& b) {
  std::unordered_map<std::string_view, int> ids;
  auto id_of = [&](std::string_view s) {
    auto [it, inserted] = ids.try_emplace(s, static_cast<int>(ids.size()));
    return it->second;
  };
  std::vector<int> ia, ib;
  ia.reserve(a.size());
  ib.reserve(b.size());
  for (auto s : a) ia.push_back(id_of(s));
  for (auto s : b) ib.push_back(id_of(s));
  return {std::move(ia), std::move(ib)};
}

// Hirschberg's linear-space LCS; used when the edit distance is large.
void HirschbergRec(const int* a, size_t n, const int* b, size_t m,
                   size_t a_off, size_t b_off,
                   std::vector<std::pair<size_t, size_t>>& out) {
  if (n == 0 || m == 0) return;
  if (n == 1) {
    for (size_t j = 0; j < m; ++j) {
      if (a[0] == b[j]) {
        out.emplace_back(a_off, b_off + j);
        return;
      }
    }
    return;
  }
  const size_t mid = n / 2;
  std::vector<int> fwd(m + 1, 0), bwd(m + 1, 0), prev(m + 1, 0);
  for (size_t i = 0; i < mid; ++i) {
    std::swap(prev, fwd);
    fwd[0] = 0;
    for (size_t j = 1; j <= m; ++j) {
      fwd[j] = a[i] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], fwd[j - 1]);
    }
  }
  std::fill(prev.begin(), prev.end(), 0);
  for (size_t i = n; i > mid; --i) {
    std::swap(prev, bwd);
    bwd[m] = 0;
    for (size_t j = m; j-- > 0;) {
      bwd[j] = a[i - 1] == b[j] ? prev[j + 1] + 1 : std::max(prev[j], bwd[j + 1]);
    }
  }
  size_t split = 0;
  int best = -1;
  for (size_t j = 0; j <= m; ++j) {
    if (fwd[j] + bwd[j] > best) {
      best = fwd[j] + bwd[j];
      split = j;
    }
  }
  HirschbergRec(a, mid, b, split, a_off, b_off, out);
  HirschbergRec(a + mid, n - mid, b + split, m - split, a_off + mid,
                b_off + split, out);
}

// Myers' greedy shortest edit script. Returns false when D exceeds
// `max_d`, leaving `out` untouched.
bool MyersLcs(const int* a, int n, const int* b, int m, size_t a_off,
              size_t b_off, int max_d,
              std::vector<std::pair<size_t, size_t>>& out) {
  const int offset = n + m + 1;
  std::vector<int> v(2 * offset + 2, 0);
  std::vector<std::vector<int>> trace;  // trace[d][k + d] = V before step d
  int final_d = -1;
  for (int d = 0; d <= n + m; ++d) {
    if (d > max_d) return false;
    trace.emplace_back(v.begin() + offset - d, v.begin() + offset + d + 1);
    for (int k = -d; k <= d; k += 2) {
      int x;
      if (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1])) {
        x = v[offset + k + 1];
      } else {
        x = v[offset + k - 1] + 1;
      }
      int y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x >= n && y >= m) {
        final_d = d;
        break;
      }
    }
    if (final_d >= 0) break;
  }

  std::vector<std::pair<size_t, size_t>> rev;
  int x = n, y = m;
  for (int d = final_d; d > 0; --d) {
    const std::vector<int>& prev = trace[d];  // V after step d-1, window [-d, d]
    auto at = [&](int k) { return prev[k + d]; };
    const int k = x - y;
    int prev_k;
    if (k == -d || (k != d && at(k - 1) < at(k + 1))) {
      prev_k = k + 1;
    } else {
      prev_k = k - 1;
    }
    const int prev_x = at(prev_k);
    const int prev_y = prev_x - prev_k;
    while (x > prev_x && y > prev_y) {
      --x;
      --y;
      rev.emplace_back(a_off + x, b_off + y);
    }
    x = prev_x;
    y = prev_y;
  }
  while (x > 0 && y > 0) {
    --x;
    --y;
    rev.emplace_back(a_off + x, b_off + y);
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
  return true;
}

constexpr int kMaxMyersD = 2000;

std::vector<size_t> UnitOffsets(const std::vector<std::string_view>& units,
                                std::string_view base) {
  std::vector<size_t> offsets;
  offsets.reserve(units.size() + 1);
  for (auto u : units) offsets.push_back(static_cast<size_t>(u.data() - base.data()));
  offsets.push_back(base.size());
  return offsets;
}

bool IsWhitespaceUnit(std::string_view u) {
  return !u.empty() && IsSpace(u.front());
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), IsSpace);
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  for (;;) {
    const size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

// Paragraph index per line; blank lines separate paragraphs.
std::vector<int> ParagraphIndex(const std::vector<std::string_view>& lines) {
  std::vector<int> index(lines.size(), 0);
  int current = 0;
  bool in_paragraph = false;
  bool seen_any = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (IsBlank(lines[i])) {
      in_paragraph = false;
      index[i] = current;
      continue;
    }
    if (!in_paragraph && seen_any) ++current;
    in_paragraph = true;
    seen_any = true;
    index[i] = current;
  }
  return index;
}

// Jaccard similarity of whitespace token sets.
double LineSimilarity(std::string_view a, std::string_view b) {
  auto tokens = [](std::string_view s) {
    std::set<std::string_view> out;
    for (auto u : TokenizeUnits(s)) {
      if (!IsWhitespaceUnit(u)) out.insert(u);
    }
    return out;
  };
  const auto ta = tokens(a), tb = tokens(b);
  if (ta.empty() && tb.empty()) return 1.0;
  size_t common = 0;
  for (auto t : ta) common += tb.count(t);
  return static_cast<double>(common) /
         static_cast<double>(ta.size() + tb.size() - common);
}

constexpr double kMinPairSimilarity = 0.2;
constexpr size_t kMaxSimilarityCells = 10000;

// Pairs deleted and inserted lines of one hunk. Returns index pairs into
// `olds` / `news`; -1 marks an unpaired side.
std::vector<std::pair<int, int>> PairHunk(
    const std::vector<std::string_view>& olds,
    const std::vector<std::string_view>& news) {
  const size_t n = olds.size(), m = news.size();
  std::vector<std::pair<int, int>> out;
  if (n * m > kMaxSimilarityCells) {
    for (size_t i = 0; i < std::max(n, m); ++i) {
      out.emplace_back(i < n ? static_cast<int>(i) : -1,
                       i < m ? static_cast<int>(i) : -1);
    }
    return out;
  }
  // Monotone alignment maximizing summed similarity of paired lines.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(m + 1, 0.0));
  std::vector<std::vector<double>> sim(n, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) sim[i][j] = LineSimilarity(olds[i], news[j]);
  }
  for (size_t i = n; i-- > 0;) {
    for (size_t j = m; j-- > 0;) {
      double v = std::max(best[i + 1][j], best[i][j + 1]);
      if (sim[i][j] >= kMinPairSimilarity) v = std::max(v, sim[i][j] + best[i + 1][j + 1]);
      best[i][j] = v;
    }
  }
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (sim[i][j] >= kMinPairSimilarity &&
        best[i][j] == sim[i][j] + best[i + 1][j + 1]) {
      out.emplace_back(static_cast<int>(i), static_cast<int>(j));
      ++i;
      ++j;
    } else if (best[i][j] == best[i + 1][j]) {
      out.emplace_back(static_cast<int>(i), -1);
      ++i;
    } else {
      out.emplace_back(-1, static_cast<int>(j));
      ++j;
    }
  }
  for (; i < n; ++i) out.emplace_back(static_cast<int>(i), -1);
  for (; j < m; ++j) out.emplace_back(-1, static_cast<int>(j));
  return out;
}

bool EndsWithTerminator(std::string_view s) {
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == ')')) {
    s.remove_suffix(1);
  }
  return !s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?');
}

// Inserted text that forms complete new sentence(s).
bool IsNewSentenceText(std::string_view inserted) {
  const std::string stripped = StripMarkup(inserted);
  if (stripped.empty() || CountWords(stripped) < 2) return false;
  size_t k = 0;
  while (k < stripped.size() && (stripped[k] == '"' || stripped[k] == '(')) ++k;
  if (k == stripped.size() ||
      !std::isupper(static_cast<unsigned char>(stripped[k]))) {
    return false;
  }
  return EndsWithTerminator(stripped);
}

std::string ReviseSentence(std::string_view old_line, size_t s, size_t e,
                           const std::vector<Segment>& attached) {
  std::string out;
  size_t cursor = s;
  for (const Segment& seg : attached) {
    const size_t a = seg.old_offset;
    const size_t b = a + seg.deleted.size();
    if (a > cursor) out.append(old_line.substr(cursor, a - cursor));
    out += seg.inserted;
    cursor = std::max(cursor, b);
  }
  if (cursor < e) out.append(old_line.substr(cursor, e - cursor));
  return out;
}

}  // namespace

std::vector<std::pair<size_t, size_t>> LongestCommonSubsequence(
    const std::vector<std::string_view>& a,
    const std::vector<std::string_view>& b) {
  auto [ia, ib] = Intern(a, b);
  std::vector<std::pair<size_t, size_t>> out;
  size_t prefix = 0;
  while (prefix < ia.size() && prefix < ib.size() && ia[prefix] == ib[prefix]) {
    out.emplace_back(prefix, prefix);
    ++prefix;
  }
  size_t suffix = 0;
  while (suffix < ia.size() - prefix && suffix < ib.size() - prefix &&
         ia[ia.size() - 1 - suffix] == ib[ib.size() - 1 - suffix]) {
    ++suffix;
  }
  const int n = static_cast<int>(ia.size() - prefix - suffix);
  const int m = static_cast<int>(ib.size() - prefix - suffix);
  if (n > 0 && m > 0) {
    if (!MyersLcs(ia.data() + prefix, n, ib.data() + prefix, m, prefix, prefix,
                  kMaxMyersD, out)) {
      HirschbergRec(ia.data() + prefix, static_cast<size_t>(n),
                    ib.data() + prefix, static_cast<size_t>(m), prefix, prefix,
                    out);
    }
  }
  for (size_t k = suffix; k > 0; --k) {
    out.emplace_back(ia.size() - k, ib.size() - k);
  }
  return out;
}

std::vector<std::string_view> TokenizeUnits(std::string_view line) {
  std::vector<std::string_view> units;
  size_t i = 0;
  while (i < line.size()) {
    const bool space = IsSpace(line[i]);
    size_t j = i + 1;
    while (j < line.size() && IsSpace(line[j]) == space) ++j;
    units.push_back(line.substr(i, j - i));
    i = j;
  }
  return units;
}

std::vector<Segment> DiffLine(std::string_view old_line,
                              std::string_view new_line) {
  const auto ua = TokenizeUnits(old_line);
  const auto ub = TokenizeUnits(new_line);
  const auto oa = UnitOffsets(ua, old_line);
  const auto ob = UnitOffsets(ub, new_line);
  auto matches = LongestCommonSubsequence(ua, ub);
  matches.emplace_back(ua.size(), ub.size());  // sentinel

  // Raw changed runs in unit coordinates: [a0, a1) x [b0, b1).
  struct Run {
    size_t a0, a1, b0, b1;
  };
  std::vector<Run> runs;
  size_t ia = 0, ib = 0;
  for (auto [i, j] : matches) {
    if (ia < i || ib < j) runs.push_back({ia, i, ib, j});
    ia = i + 1;
    ib = j + 1;
  }

  // Merge runs separated only by matched whitespace.
  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty()) {
      Run& last = merged.back();
      bool only_space = true;
      for (size_t k = last.a1; k < r.a0; ++k) {
        if (!IsWhitespaceUnit(ua[k])) {
          only_space = false;
          break;
        }
      }
      if (only_space) {
        last.a1 = r.a1;
        last.b1 = r.b1;
        continue;
      }
    }
    merged.push_back(r);
  }

  std::vector<Segment> segments;
  segments.reserve(merged.size());
  for (const Run& r : merged) {
    Segment seg;
    seg.old_offset = oa[r.a0];
    seg.new_offset = ob[r.b0];
    seg.deleted = std::string(old_line.substr(oa[r.a0], oa[r.a1] - oa[r.a0]));
    seg.inserted = std::string(new_line.substr(ob[r.b0], ob[r.b1] - ob[r.b0]));
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::string ApplySegments(std::string_view old_line,
                          const std::vector<Segment>& segments) {
  std::string out;
  size_t cursor = 0;
  for (const Segment& seg : segments) {
    out.append(old_line.substr(cursor, seg.old_offset - cursor));
    out += seg.inserted;
    cursor = seg.old_offset + seg.deleted.size();
  }
  out.append(old_line.substr(cursor));
  return out;
}

EditDiff DiffRevisions(std::string_view old_text, std::string_view new_text,
                       std::string_view comment, int64_t old_rev_id,
                       int64_t new_rev_id) {
  EditDiff diff;
  diff.old_rev_id = old_rev_id;
  diff.new_rev_id = new_rev_id;
  diff.comment = std::string(comment);
  if (old_text == new_text) return diff;

  const auto old_lines = SplitLines(old_text);
  const auto new_lines = SplitLines(new_text);
  const auto old_para = ParagraphIndex(old_lines);
  const auto new_para = ParagraphIndex(new_lines);
  auto matches = LongestCommonSubsequence(old_lines, new_lines);
  matches.emplace_back(old_lines.size(), new_lines.size());

  auto make_change = [&](int oi, int ni) {
    LineChange lc;
    lc.old_line_number = oi;
    lc.new_line_number = ni;
    if (oi >= 0) lc.old_line = std::string(old_lines[oi]);
    if (ni >= 0) lc.new_line = std::string(new_lines[ni]);
    if (oi >= 0) {
      lc.paragraph_index = old_para[oi];
      if (oi > 0) lc.context_before = std::string(old_lines[oi - 1]);
      if (oi + 1 < static_cast<int>(old_lines.size())) {
        lc.context_after = std::string(old_lines[oi + 1]);
      }
    } else {
      lc.paragraph_index = new_para[ni];
      if (ni > 0) lc.context_before = std::string(new_lines[ni - 1]);
      if (ni + 1 < static_cast<int>(new_lines.size())) {
        lc.context_after = std::string(new_lines[ni + 1]);
      }
    }
    lc.segments = DiffLine(lc.old_line, lc.new_line);
    if (!lc.segments.empty()) diff.lines.push_back(std::move(lc));
  };

  size_t ia = 0, ib = 0;
  for (auto [i, j] : matches) {
    if (ia < i || ib < j) {
      std::vector<std::string_view> olds, news;
      std::vector<int> old_idx, new_idx;
      for (size_t k = ia; k < i; ++k) {
        if (!IsBlank(old_lines[k])) {
          olds.push_back(old_lines[k]);
          old_idx.push_back(static_cast<int>(k));
        }
      }
      for (size_t k = ib; k < j; ++k) {
        if (!IsBlank(new_lines[k])) {
          news.push_back(new_lines[k]);
          new_idx.push_back(static_cast<int>(k));
        }
      }
      for (auto [po, pn] : PairHunk(olds, news)) {
        make_change(po >= 0 ? old_idx[po] : -1, pn >= 0 ? new_idx[pn] : -1);
      }
    }
    ia = i + 1;
    ib = j + 1;
  }
  diff.changed_paragraph_count = CountChangedParagraphs(diff);
  return diff;
}

SentenceAlignment AlignSentencesDetailed(const LineChange& line,
                                         size_t line_ref) {
  SentenceAlignment result;
  const std::string_view old_line = line.old_line;
  const auto spans = SplitSentences(old_line);
  std::vector<std::vector<Segment>> attached(spans.size());

  for (const Segment& seg : line.segments) {
    const size_t fs = seg.old_offset;
    const size_t fe = fs + seg.deleted.size();
    bool placed = false;
    if (fe > fs) {
      for (size_t k = 0; k < spans.size(); ++k) {
        if (spans[k].start < fe && fs < spans[k].end) {
          attached[k].push_back(seg);
          placed = true;
        }
      }
    }
    if (placed) continue;

    const size_t p = fs;
    int target = -1;
    for (size_t k = 0; k < spans.size(); ++k) {
      if (spans[k].start < p && p < spans[k].end) target = static_cast<int>(k);
    }
    if (target < 0) {
      if (spans.empty() ||
          (!seg.inserted.empty() && IsNewSentenceText(seg.inserted))) {
        result.new_sentence_insertions.push_back(seg);
        continue;
      }
      for (size_t k = 0; k < spans.size() && target < 0; ++k) {
        if (spans[k].end == p) target = static_cast<int>(k);
      }
      for (size_t k = 0; k < spans.size() && target < 0; ++k) {
        if (spans[k].start == p) target = static_cast<int>(k);
      }
      if (target < 0) {
        for (size_t k = 0; k < spans.size(); ++k) {
          if (spans[k].end <= p) target = static_cast<int>(k);
        }
      }
      if (target < 0) target = 0;
    }
    attached[target].push_back(seg);
  }

  for (size_t k = 0; k < spans.size(); ++k) {
    if (attached[k].empty()) continue;
    ChangedSentence cs;
    cs.original = std::string(spans[k].text);
    cs.revised = ReviseSentence(old_line, spans[k].start, spans[k].end, attached[k]);
    cs.segments = std::move(attached[k]);
    cs.line_ref = line_ref;
    cs.start = spans[k].start;
    cs.end = spans[k].end;
    result.sentences.push_back(std::move(cs));
  }
  return result;
}

std::vector<ChangedSentence> AlignSentences(const LineChange& line,
                                            size_t line_ref) {
  return AlignSentencesDetailed(line, line_ref).sentences;
}

int CountChangedParagraphs(const EditDiff& diff) {
  std::set<int> paragraphs;
  for (const LineChange& line : diff.lines) paragraphs.insert(line.paragraph_index);
  return static_cast<int>(paragraphs.size());
}

nlohmann::json SegmentToJson(const Segment& s) {
  return {{"inserted", s.inserted},
          {"deleted", s.deleted},
          {"old_offset", s.old_offset},
          {"new_offset", s.new_offset}};
}

nlohmann::json LineChangeToJson(const LineChange& line) {
  nlohmann::json segments = nlohmann::json::array();
  for (const Segment& s : line.segments) segments.push_back(SegmentToJson(s));
  return {{"old_line", line.old_line},
          {"new_line", line.new_line},
          {"segments", segments},
          {"paragraph_index", line.paragraph_index},
          {"context_before", line.context_before},
          {"context_after", line.context_after},
          {"old_line_number", line.old_line_number},
          {"new_line_number", line.new_line_number}};
}

nlohmann::json EditDiffToJson(const EditDiff& diff) {
  nlohmann::json lines = nlohmann::json::array();
  for (const LineChange& l : diff.lines) lines.push_back(LineChangeToJson(l));
  return {{"old_rev_id", diff.old_rev_id},
          {"new_rev_id", diff.new_rev_id},
          {"comment", diff.comment},
          {"lines", lines},
          {"changed_paragraph_count", diff.changed_paragraph_count}};
}

nlohmann::json ChangedSentenceToJson(const ChangedSentence& s) {
  nlohmann::json segments = nlohmann::json::array();
  for (const Segment& seg : s.segments) segments.push_back(SegmentToJson(seg));
  return {{"original", s.original}, {"revised", s.revised},
          {"segments", segments},   {"line_ref", s.line_ref},
          {"start", s.start},       {"end", s.end}};
}

Segment SegmentFromJson(const nlohmann::json& j) {
  Segment s;
  s.inserted = j.at("inserted").get<std::string>();
  s.deleted = j.at("deleted").get<std::string>();
  s.old_offset = j.at("old_offset").get<size_t>();
  s.new_offset = j.at("new_offset").get<size_t>();
  return s;
}

LineChange LineChangeFromJson(const nlohmann::json& j) {
  LineChange l;
  l.old_line = j.at("old_line").get<std::string>();
  l.new_line = j.at("new_line").get<std::string>();
  for (const auto& s : j.at("segments")) l.segments.push_back(SegmentFromJson(s));
  l.paragraph_index = j.value("paragraph_index", 0);
  l.context_before = j.value("context_before", std::string());
  l.context_after = j.value("context_after", std::string());
  l.old_line_number = j.value("old_line_number", -1);
  l.new_line_number = j.value("new_line_number", -1);
  return l;
}

EditDiff EditDiffFromJson(const nlohmann::json& j) {
  EditDiff d;
  d.old_rev_id = j.value("old_rev_id", int64_t{0});
  d.new_rev_id = j.value("new_rev_id", int64_t{0});
  d.comment = j.value("comment", std::string());
  for (const auto& l : j.at("lines")) d.lines.push_back(LineChangeFromJson(l));
  d.changed_paragraph_count =
      j.value("changed_paragraph_count", CountChangedParagraphs(d));
  return d;
}

}  // namespace editintent

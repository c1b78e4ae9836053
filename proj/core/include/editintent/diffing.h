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
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace editintent {

// A maximal contiguous changed run inside one line. Offsets are byte
// offsets into the owning LineChange's old_line / new_line.
struct Segment {
  std::string inserted;
  std::string deleted;
  size_t old_offset = 0;
  size_t new_offset = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// One changed line of an edit diff. old_line is empty for pure insertions
// and new_line is empty for pure deletions.
struct LineChange {
  std::string old_line;
  std::string new_line;
  std::vector<Segment> segments;
  int paragraph_index = 0;
  std::string context_before;
  std::string context_after;
  int old_line_number = -1;  // 0-based index in the old text, -1 if none
  int new_line_number = -1;

  friend bool operator==(const LineChange&, const LineChange&) = default;
};

// All changes between two consecutive revisions.
struct EditDiff {
  int64_t old_rev_id = 0;
  int64_t new_rev_id = 0;
  std::string comment;
  std::vector<LineChange> lines;
  int changed_paragraph_count = 0;

  friend bool operator==(const EditDiff&, const EditDiff&) = default;
};

// An original sentence touched by at least one segment, with its revised
// form. Offsets are into the owning line's old_line.
struct ChangedSentence {
  std::string original;
  std::string revised;
  std::vector<Segment> segments;
  size_t line_ref = 0;  // index into EditDiff::lines
  size_t start = 0;
  size_t end = 0;

  friend bool operator==(const ChangedSentence&, const ChangedSentence&) = default;
};

struct SentenceAlignment {
  std::vector<ChangedSentence> sentences;
  // Pure insertions that add whole new sentences; attached to no sentence.
  std::vector<Segment> new_sentence_insertions;
};

// Index pairs (i, j) with a[i] == b[j] forming a longest common subsequence,
// in increasing order. Myers' O((N+M)D) algorithm after trimming the common
// prefix and suffix.
std::vector<std::pair<size_t, size_t>> LongestCommonSubsequence(
    const std::vector<std::string_view>& a,
    const std::vector<std::string_view>& b);

// Splits into alternating runs of whitespace and non-whitespace.
std::vector<std::string_view> TokenizeUnits(std::string_view line);

// Token-level segments turning old_line into new_line. Segments separated
// only by whitespace are merged, so each one is maximal.
std::vector<Segment> DiffLine(std::string_view old_line,
                              std::string_view new_line);

// Applies segments to old_line; reproduces new_line for DiffLine output.
std::string ApplySegments(std::string_view old_line,
                          const std::vector<Segment>& segments);

// Line alignment by LCS over newline-delimited lines, then DiffLine on each
// paired changed line. Unchanged lines are omitted.
EditDiff DiffRevisions(std::string_view old_text, std::string_view new_text,
                       std::string_view comment = {}, int64_t old_rev_id = 0,
                       int64_t new_rev_id = 0);

std::vector<ChangedSentence> AlignSentences(const LineChange& line,
                                            size_t line_ref = 0);
SentenceAlignment AlignSentencesDetailed(const LineChange& line,
                                         size_t line_ref = 0);

int CountChangedParagraphs(const EditDiff& diff);

nlohmann::json SegmentToJson(const Segment& s);
nlohmann::json LineChangeToJson(const LineChange& line);
nlohmann::json EditDiffToJson(const EditDiff& diff);
nlohmann::json ChangedSentenceToJson(const ChangedSentence& s);
Segment SegmentFromJson(const nlohmann::json& j);
LineChange LineChangeFromJson(const nlohmann::json& j);
EditDiff EditDiffFromJson(const nlohmann::json& j);

}  // namespace editintent

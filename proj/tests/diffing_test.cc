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

#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "editintent/random.h"
#include "support/random_text.h"

namespace editintent {
namespace {

using testing::Mutate;
using testing::RandomText;

// Plain O(nm) table; the reference for LCS length.
size_t DpLcsLength(const std::vector<std::string_view>& a,
                   const std::vector<std::string_view>& b) {
  std::vector<std::vector<size_t>> t(a.size() + 1,
                                     std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = a.size(); i-- > 0;) {
    for (size_t j = b.size(); j-- > 0;) {
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1
                             : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  return t[0][0];
}

TEST(LcsTest, MatchesDynamicProgrammingLength) {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::string> pool = {"a", "b", "c", "d"};
    std::vector<std::string_view> a, b;
    const size_t n = rng.Uniform(40), m = rng.Uniform(40);
    for (size_t i = 0; i < n; ++i) a.push_back(pool[rng.Uniform(pool.size())]);
    for (size_t i = 0; i < m; ++i) b.push_back(pool[rng.Uniform(pool.size())]);
    const auto pairs = LongestCommonSubsequence(a, b);
    ASSERT_EQ(pairs.size(), DpLcsLength(a, b)) << "trial " << trial;
    for (size_t k = 0; k < pairs.size(); ++k) {
      ASSERT_EQ(a[pairs[k].first], b[pairs[k].second]);
      if (k > 0) {
        ASSERT_LT(pairs[k - 1].first, pairs[k].first);
        ASSERT_LT(pairs[k - 1].second, pairs[k].second);
      }
    }
  }
}

TEST(LcsTest, LargeDissimilarInputsFallBack) {
  // Forces the edit distance past the Myers cap.
  std::vector<std::string> storage;
  Rng rng(3);
  for (int i = 0; i < 6000; ++i) storage.push_back(std::to_string(rng.Uniform(50)));
  std::vector<std::string_view> a(storage.begin(), storage.begin() + 3000);
  std::vector<std::string_view> b(storage.begin() + 3000, storage.end());
  const auto pairs = LongestCommonSubsequence(a, b);
  std::vector<std::string_view> sa(a.begin(), a.begin() + 400);
  std::vector<std::string_view> sb(b.begin(), b.begin() + 400);
  EXPECT_EQ(LongestCommonSubsequence(sa, sb).size(), DpLcsLength(sa, sb));
  for (auto [i, j] : pairs) ASSERT_EQ(a[i], b[j]);
}

TEST(TokenizeTest, AlternatesRuns) {
  const auto u = TokenizeUnits("  ab c\t\td ");
  ASSERT_EQ(u.size(), 7u);
  EXPECT_EQ(u[0], "  ");
  EXPECT_EQ(u[1], "ab");
  EXPECT_EQ(u[4], "\t\t");
  EXPECT_EQ(u[6], " ");
  EXPECT_TRUE(TokenizeUnits("").empty());
}

TEST(DiffLineTest, ReconstructionProperty) {
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto [old_line, new_line] = testing::RandomLinePair(rng, trial);
    const auto segs = DiffLine(old_line, new_line);
    ASSERT_EQ(ApplySegments(old_line, segs), new_line)
        << "old=" << old_line << " new=" << new_line;
    size_t prev_end = 0;
    for (const Segment& s : segs) {
      ASSERT_GE(s.old_offset, prev_end);
      ASSERT_EQ(old_line.substr(s.old_offset, s.deleted.size()), s.deleted);
      ASSERT_EQ(new_line.substr(s.new_offset, s.inserted.size()), s.inserted);
      ASSERT_FALSE(s.inserted.empty() && s.deleted.empty());
      prev_end = s.old_offset + s.deleted.size();
    }
    if (old_line == new_line) {
      ASSERT_TRUE(segs.empty());
    }
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(DiffLineTest, WordSubstitution) {
  const auto segs = DiffLine("it is believed", "Tourette's is believed");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].deleted, "it");
  EXPECT_EQ(segs[0].inserted, "Tourette's");
  EXPECT_EQ(segs[0].old_offset, 0u);
}

TEST(DiffLineTest, WhitespaceSeparatedRunsMerge) {
  const auto segs = DiffLine("a b c d", "a x y d");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].deleted, "b c");
  EXPECT_EQ(segs[0].inserted, "x y");
}

TEST(DiffLineTest, SeparateRunsStaySeparate) {
  const auto segs = DiffLine("a b c d e", "x b c d y");
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].deleted, "a");
  EXPECT_EQ(segs[1].inserted, "y");
}

TEST(DiffRevisionsTest, IdenticalTextsHaveNoLines) {
  const auto d = DiffRevisions("a\nb", "a\nb", "c", 1, 2);
  EXPECT_TRUE(d.lines.empty());
  EXPECT_EQ(d.old_rev_id, 1);
  EXPECT_EQ(d.new_rev_id, 2);
  EXPECT_EQ(d.changed_paragraph_count, 0);
}

TEST(DiffRevisionsTest, PairsModifiedLine) {
  const std::string old_text = "Intro line.\n\nThe cat sat.\nTail.";
  const std::string new_text = "Intro line.\n\nThe dog sat.\nTail.";
  const auto d = DiffRevisions(old_text, new_text);
  ASSERT_EQ(d.lines.size(), 1u);
  const auto& l = d.lines[0];
  EXPECT_EQ(l.old_line, "The cat sat.");
  EXPECT_EQ(l.new_line, "The dog sat.");
  EXPECT_EQ(l.old_line_number, 2);
  EXPECT_EQ(l.new_line_number, 2);
  EXPECT_EQ(l.paragraph_index, 1);
  EXPECT_EQ(l.context_before, "");
  EXPECT_EQ(l.context_after, "Tail.");
  EXPECT_EQ(d.changed_paragraph_count, 1);
}

TEST(DiffRevisionsTest, InsertionAndDeletion) {
  const auto d = DiffRevisions("a\nb\nc", "a\nc\nnew words here");
  ASSERT_EQ(d.lines.size(), 2u);
  EXPECT_EQ(d.lines[0].old_line, "b");
  EXPECT_EQ(d.lines[0].new_line_number, -1);
  EXPECT_EQ(d.lines[1].new_line, "new words here");
  EXPECT_EQ(d.lines[1].old_line_number, -1);
  EXPECT_EQ(d.lines[1].context_before, "c");
}

TEST(DiffRevisionsTest, DissimilarLinesAreNotPaired) {
  const auto d = DiffRevisions("x\nalpha beta gamma\ny",
                               "x\ncompletely different words\ny");
  ASSERT_EQ(d.lines.size(), 2u);
  EXPECT_TRUE(d.lines[0].new_line.empty());
  EXPECT_TRUE(d.lines[1].old_line.empty());
}

TEST(DiffRevisionsTest, EveryLineReconstructs) {
  Rng rng(11);
  const std::vector<std::string> pool = {
      "The cat sat on the mat.", "It rained.", "", "{{Infobox x}}",
      "| name = y", "Some [[link]] text.<ref>z</ref>", "==Heading=="};
  for (int trial = 0; trial < 300; ++trial) {
    std::string a, b;
    for (size_t i = 0, n = rng.Uniform(12); i < n; ++i) {
      a += pool[rng.Uniform(pool.size())] + "\n";
    }
    b = Mutate(rng, a, "abc .\n[]");
    const auto d = DiffRevisions(a, b);
    for (const auto& l : d.lines) {
      ASSERT_EQ(ApplySegments(l.old_line, l.segments), l.new_line);
      ASSERT_FALSE(l.segments.empty());
    }
  }
}

TEST(AlignSentencesTest, AttachesToTouchedSentence) {
  LineChange lc;
  lc.old_line = "First one here. It is believed so. Last one.";
  lc.new_line = "First one here. Tourette's is believed so. Last one.";
  lc.segments = DiffLine(lc.old_line, lc.new_line);
  const auto s = AlignSentences(lc, 4);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].original, "It is believed so.");
  EXPECT_EQ(s[0].revised, "Tourette's is believed so.");
  EXPECT_EQ(s[0].line_ref, 4u);
}

TEST(AlignSentencesTest, NewSentenceInsertionIsSeparate) {
  LineChange lc;
  lc.old_line = "One sentence here.";
  lc.new_line = "One sentence here. A brand new sentence.";
  lc.segments = DiffLine(lc.old_line, lc.new_line);
  const auto r = AlignSentencesDetailed(lc);
  EXPECT_TRUE(r.sentences.empty());
  ASSERT_EQ(r.new_sentence_insertions.size(), 1u);
}

TEST(AlignSentencesTest, AppendedFragmentAttachesToPrevious) {
  LineChange lc;
  lc.old_line = "One sentence here.";
  lc.new_line = "One sentence here. and more";
  lc.segments = DiffLine(lc.old_line, lc.new_line);
  const auto s = AlignSentences(lc);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].revised, "One sentence here. and more");
}

TEST(AlignSentencesTest, PureInsertionLineHasNoSentences) {
  LineChange lc;
  lc.new_line = "Fresh line.";
  lc.segments = DiffLine("", lc.new_line);
  const auto r = AlignSentencesDetailed(lc);
  EXPECT_TRUE(r.sentences.empty());
  EXPECT_EQ(r.new_sentence_insertions.size(), 1u);
}

TEST(DiffJsonTest, RoundTrip) {
  const auto d = DiffRevisions("a b\n\nc d e", "a x\n\nc d", "edit", 3, 4);
  const auto j = EditDiffToJson(d);
  EXPECT_EQ(EditDiffFromJson(j), d);
  EXPECT_EQ(EditDiffFromJson(nlohmann::json::parse(j.dump())), d);
}

}  // namespace
}  // namespace editintent

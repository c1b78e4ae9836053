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

#include "editintent/intent_rules.h"

#include <gtest/gtest.h>

#include <map>
#include <regex>

#include "support/rule_fixtures.h"

namespace editintent {
namespace {

using testing::RuleFixtures;

std::string Labels(const std::set<Category>& s) {
  std::string out;
  for (Category c : s) out += std::string(CategoryName(c)) + " ";
  return out;
}

TEST(RuleGoldenTest, TruthTable) {
  const auto fixtures = RuleFixtures();
  ASSERT_GE(fixtures.size(), 30u);
  for (const auto& f : fixtures) {
    RuleOptions opt;
    opt.mode = f.mode;
    const RuleVerdict v = LabelEdit(f.diff, opt);
    EXPECT_EQ(Labels(v.labels), Labels(f.expected)) << f.name;
  }
}

// Every clause in the trace is seen both true and false somewhere.
TEST(RuleGoldenTest, EveryClauseToggles) {
  std::map<std::string, std::set<bool>> seen;
  const std::regex index(R"(\[[^\]]*\])");
  for (const auto& f : RuleFixtures()) {
    RuleOptions opt;
    opt.mode = f.mode;
    for (const RuleTrace& t : LabelEdit(f.diff, opt).trace) {
      seen[std::regex_replace(t.rule, index, "")].insert(t.value);
    }
  }
  EXPECT_GE(seen.size(), 17u);
  for (const auto& [rule, values] : seen) {
    if (rule == "clarification/skipped_new_sentence_insertions") continue;
    EXPECT_EQ(values.size(), 2u) << rule;
  }
}

TEST(RuleTest, PositiveSentencesForFig3Edit) {
  const auto diff = testing::Diff(
      "clarify subject",
      {testing::Line("Tics are common. While the exact cause is unknown, it is "
                     "believed to be genetic.",
                     "Tics are common. While the exact cause is unknown, "
                     "Tourette's is believed to be genetic.")});
  const RuleVerdict v = LabelEdit(diff);
  ASSERT_EQ(v.positive_sentences.size(), 1u);
  EXPECT_EQ(v.positive_sentences[0].category, Category::kClarification);
  EXPECT_EQ(v.positive_sentences[0].sentence.original,
            "While the exact cause is unknown, it is believed to be genetic.");
}

TEST(RuleTest, CitationPositiveIsCarryingSentence) {
  const auto diff = testing::Diff(
      "", {testing::Line("A is b. C is d.", "A is b. C is d.<ref>x</ref>")});
  const auto v = ClassifyCitation(diff);
  ASSERT_TRUE(v.matched);
  ASSERT_EQ(v.sentences.size(), 1u);
  EXPECT_EQ(v.sentences[0].original, "C is d.");
}

TEST(RuleTest, PovSkipsMarkupOnlySentences) {
  const auto diff = testing::Diff(
      "pov", {testing::Line("It is great. It is big - yes.",
                            "It is good. It is big yes.")});
  const auto v = ClassifyPov(diff);
  ASSERT_TRUE(v.matched);
  ASSERT_EQ(v.sentences.size(), 1u);
  EXPECT_EQ(v.sentences[0].original, "It is great.");
}

TEST(RuleTest, SegmentMarkupIgnoresEmptySide) {
  Segment s;
  s.inserted = "plain words";
  EXPECT_FALSE(SegmentMarkup(s, RegexMode::kStrict).any());
  s.deleted = "[[x]]";
  EXPECT_TRUE(SegmentMarkup(s, RegexMode::kStrict).wikilink);
}

TEST(RuleTest, CustomLimits) {
  RuleOptions opt;
  opt.max_inserted_words = 1;
  const auto diff = testing::Diff(
      "", {testing::Line("The cat sat.", "The big black cat sat.")});
  EXPECT_FALSE(ClassifyClarification(diff, opt).matched);
  EXPECT_TRUE(ClassifyClarification(diff).matched);
}

TEST(RuleTest, VerdictJson) {
  const auto diff = testing::Diff("pov", {testing::Line("A is b.", "A is c.")});
  const auto j = RuleVerdictToJson(LabelEdit(diff, {}, "1:2"));
  EXPECT_EQ(j["diff_ref"], "1:2");
  EXPECT_EQ(j["labels"], nlohmann::json({"point_of_view", "clarification"}));
  EXPECT_EQ(j["positive_sentences"].size(), 2u);
  EXPECT_TRUE(j["trace"].is_array());
}

}  // namespace
}  // namespace editintent

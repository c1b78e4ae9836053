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

#include "editintent/reverts.h"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "editintent/random.h"
#include "support/revert_oracle.h"

namespace editintent {
namespace {

using std::chrono::hours;
using std::chrono::seconds;
using testing::BruteForce;
using testing::RandomHistory;
using testing::Rev;

TEST(RevertOracleTest, MatchesBruteForce) {
  Rng rng(15);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto page = RandomHistory(rng);
    ASSERT_EQ(DetectReverts(page), BruteForce(page, {})) << "trial " << trial;
  }
}

TEST(RevertOracleTest, MatchesBruteForceOtherConfigs) {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    RevertConfig cfg;
    cfg.window = static_cast<int>(rng.Uniform(20));
    cfg.horizon = hours(1 + rng.Uniform(72));
    const auto page = RandomHistory(rng);
    ASSERT_EQ(DetectReverts(page, cfg), BruteForce(page, cfg)) << trial;
  }
}

std::vector<Revision> RevertAfter(int between, int64_t span_seconds) {
  std::vector<Revision> page;
  page.push_back(Rev(1, 0, "base"));
  for (int k = 0; k < between; ++k) {
    page.push_back(Rev(2 + k, 1 + k, "mid" + std::to_string(k)));
  }
  page.push_back(Rev(2 + between, span_seconds, "base"));
  return page;
}

TEST(RevertBoundaryTest, WindowOfFifteenIsInclusive) {
  auto at = DetectReverts(RevertAfter(15, 3600));
  EXPECT_EQ(at.at(17), RevertStatus::kReverting);
  EXPECT_EQ(at.at(2), RevertStatus::kReverted);
  auto over = DetectReverts(RevertAfter(16, 3600));
  EXPECT_EQ(over.at(18), RevertStatus::kClean);
  EXPECT_EQ(over.at(2), RevertStatus::kClean);
}

TEST(RevertBoundaryTest, HorizonOfTwoDaysIsInclusive) {
  auto at = DetectReverts(RevertAfter(1, 48 * 3600));
  EXPECT_EQ(at.at(3), RevertStatus::kReverting);
  EXPECT_EQ(at.at(2), RevertStatus::kReverted);
  auto over = DetectReverts(RevertAfter(1, 48 * 3600 + 1));
  EXPECT_EQ(over.at(3), RevertStatus::kClean);
}

TEST(RevertBoundaryTest, AdjacentDuplicateIsNotARevert) {
  auto s = DetectReverts(RevertAfter(0, 10));
  EXPECT_EQ(s.at(1), RevertStatus::kClean);
  EXPECT_EQ(s.at(2), RevertStatus::kClean);
}

TEST(RevertBoundaryTest, RevertingWinsOverReverted) {
  // A B A B: rev 3 reverts 2, rev 4 reverts 3.
  std::vector<Revision> page = {Rev(1, 0, "a"), Rev(2, 1, "b"), Rev(3, 2, "a"),
                                Rev(4, 3, "b")};
  auto s = DetectReverts(page);
  EXPECT_EQ(s.at(1), RevertStatus::kClean);
  EXPECT_EQ(s.at(2), RevertStatus::kReverted);
  EXPECT_EQ(s.at(3), RevertStatus::kReverting);
  EXPECT_EQ(s.at(4), RevertStatus::kReverting);
}

TEST(RevertTest, RejectsUnsortedInput) {
  std::vector<Revision> page = {Rev(2, 5, "a"), Rev(1, 5, "b")};
  EXPECT_THROW(DetectReverts(page), InvalidArgument);
  std::vector<Revision> dup = {Rev(1, 5, "a"), Rev(1, 5, "b")};
  EXPECT_THROW(DetectReverts(dup), InvalidArgument);
}

TEST(RevertTest, ExclusionFollowsConfig) {
  RevertConfig keep;
  keep.exclude_reverting = false;
  EXPECT_TRUE(ExcludedFromLabeling(RevertStatus::kReverted));
  EXPECT_TRUE(ExcludedFromLabeling(RevertStatus::kReverting));
  EXPECT_FALSE(ExcludedFromLabeling(RevertStatus::kReverting, keep));
  EXPECT_FALSE(ExcludedFromLabeling(RevertStatus::kClean));
  EXPECT_EQ(RevertStatusName(RevertStatus::kReverted), "reverted");
}

}  // namespace
}  // namespace editintent

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "editintent/intent_rules.h"
#include "editintent/reverts.h"
#include "editintent/revision.h"
#include "json.hpp"

namespace editintent {

enum class Polarity { kPositive, kNegative };

std::string_view PolarityName(Polarity polarity);

// One corpus record: a markup-stripped sentence with its label.
struct LabeledSentence {
  std::string text;
  Category category = Category::kCitation;
  Polarity polarity = Polarity::kPositive;
  int64_t page_id = 0;
  int64_t rev_id = 0;
  std::string section_title;  // normalized
  int64_t char_len = 0;       // UTF-8 code points
  int64_t word_len = 0;       // whitespace tokens

  friend bool operator==(const LabeledSentence&, const LabeledSentence&) = default;
};

// Fills text-derived fields (char_len, word_len).
LabeledSentence MakeLabeledSentence(std::string text, Category category,
                                    Polarity polarity, int64_t page_id,
                                    int64_t rev_id, std::string section_title);

nlohmann::json LabeledSentenceToJson(const LabeledSentence& s);
// Throws ParseError on missing or mistyped fields.
LabeledSentence LabeledSentenceFromJson(const nlohmann::json& j);

struct ExtractOptions {
  RuleOptions rules;
  RevertConfig reverts;
  bool filter_reverts = true;
  // Restrict output to one category; all three when unset.
  std::optional<Category> category;
  // Heading assigned to text before the first heading.
  std::string lead_section = "Lead";
};

struct ExtractStats {
  int64_t edits = 0;
  int64_t excluded_reverts = 0;
  int64_t duplicates = 0;
  int64_t empty_after_strip = 0;
};

// Weak positives from one page's history (ascending). Each edit is the pair
// (previous revision, revision); edits whose revision is reverted (or
// reverting, per config) are skipped. The pre-edit sentence is emitted with
// markup stripped, deduplicated per (category, text) within the page.
std::vector<LabeledSentence> ExtractPositiveSentences(
    std::span<const Revision> page, const ExtractOptions& options = {},
    ExtractStats* stats = nullptr);

// Diff and verdict for every labelable edit of a page, in history order.
struct LabeledEdit {
  const Revision* parent = nullptr;
  const Revision* revision = nullptr;
  EditDiff diff;
  RuleVerdict verdict;
};
std::vector<LabeledEdit> LabelPageEdits(std::span<const Revision> page,
                                        const ExtractOptions& options = {},
                                        ExtractStats* stats = nullptr);

// The positive-sentence step of ExtractPositiveSentences, for callers that
// already hold the labeled edits of one page.
std::vector<LabeledSentence> PositivesFromEdits(std::span<const LabeledEdit> edits,
                                                const ExtractOptions& options = {},
                                                ExtractStats* stats = nullptr);

struct NegativeOptions {
  RegexMode mode = RegexMode::kDefault;
  std::string lead_section = "Lead";
};

// Body sentences of a Featured Article revision. For Citation only
// sentences without citation markup qualify. Throws InvalidArgument when
// the revision is not assessed FA.
std::vector<LabeledSentence> ExtractNegativeSentences(
    const Revision& featured_article, Category category,
    const NegativeOptions& options = {});

struct CorpusSplit {
  std::vector<LabeledSentence> train;
  std::vector<LabeledSentence> validation;
  std::vector<LabeledSentence> test;
  uint64_t seed = 0;

  size_t size() const { return train.size() + validation.size() + test.size(); }
  friend bool operator==(const CorpusSplit&, const CorpusSplit&) = default;
};

struct SplitStats {
  int64_t conflicts_dropped = 0;  // negatives whose text is also positive
  int64_t downsampled = 0;        // records dropped for balance or page fit
};

// Balanced 70/10/20 splits. Negatives sharing text with a positive are
// dropped first. Pages never span two splits. Split sizes are the
// floor-then-largest-remainder partition of the balanced total, and each
// split holds ceil/floor halves of positives and negatives so the corpus
// is exactly 1:1. Deterministic under `seed`. Throws InvalidArgument when
// either side is empty or categories are mixed.
CorpusSplit BuildSplits(std::span<const LabeledSentence> positives,
                        std::span<const LabeledSentence> negatives,
                        uint64_t seed, SplitStats* stats = nullptr);

// Floor-then-largest-remainder partition of `total` into 70/10/20.
std::array<size_t, 3> PartitionSizes(size_t total);

// Writes <dir>/manifest.json and <dir>/{train,validation,test}.jsonl.
void ExportCorpus(const CorpusSplit& split, const std::filesystem::path& dir);
// Throws ParseError naming file and line on corrupt input.
CorpusSplit ImportCorpus(const std::filesystem::path& dir);

// JSONL helpers shared by the CLI.
void WriteLabeledSentences(std::ostream& out,
                           std::span<const LabeledSentence> sentences);
std::vector<LabeledSentence> ReadLabeledSentences(std::istream& in,
                                                  const std::string& source);

inline constexpr int kCorpusSchemaVersion = 1;

}  // namespace editintent

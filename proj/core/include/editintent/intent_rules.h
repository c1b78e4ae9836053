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

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "editintent/diffing.h"
#include "editintent/types.h"
#include "editintent/wikitext.h"
#include "json.hpp"

namespace editintent {

struct RuleOptions {
  RegexMode mode = RegexMode::kDefault;
  // Clarification segment limits, inclusive.
  size_t max_inserted_words = 10;
  size_t max_deleted_words = 5;
};

struct RuleTrace {
  std::string rule;
  bool value = false;

  friend bool operator==(const RuleTrace&, const RuleTrace&) = default;
};

struct PositiveSentence {
  ChangedSentence sentence;
  Category category;

  friend bool operator==(const PositiveSentence&, const PositiveSentence&) = default;
};

// Outcome of one category's rule block.
struct CategoryVerdict {
  bool matched = false;
  std::vector<ChangedSentence> sentences;
  std::vector<RuleTrace> trace;
};

struct RuleVerdict {
  std::string diff_ref;
  std::set<Category> labels;
  std::vector<PositiveSentence> positive_sentences;
  std::vector<RuleTrace> trace;

  friend bool operator==(const RuleVerdict&, const RuleVerdict&) = default;
};

// Negative-clause detectors over one segment's non-empty sides.
struct MarkupFlags {
  bool citation = false;
  bool template_ = false;
  bool wikilink = false;
  bool infobox = false;
  bool multiline = false;

  bool any() const {
    return citation || template_ || wikilink || infobox || multiline;
  }
};
MarkupFlags SegmentMarkup(const Segment& segment, RegexMode mode);

// Citation: some segment inserts citation markup absent from its deleted
// text. Positives are the sentences carrying such a segment.
CategoryVerdict ClassifyCitation(const EditDiff& diff,
                                 const RuleOptions& options = {});

// Point-of-view: one changed paragraph, one changed line, a POV edit
// comment, and no citation/template/wikilink/infobox/multiline content
// inserted or deleted anywhere in the diff. Sentences whose segments are
// all markup are not emitted.
CategoryVerdict ClassifyPov(const EditDiff& diff, const RuleOptions& options = {});

// Clarification, per segment inside an existing sentence: inserted words in
// [0, 10], deleted words in [0, 5], at least one word changed, not
// markup-only, and no negative-clause markup in any segment of that line.
CategoryVerdict ClassifyClarification(const EditDiff& diff,
                                      const RuleOptions& options = {});

// Union of the three rule blocks with the full clause trace.
RuleVerdict LabelEdit(const EditDiff& diff, const RuleOptions& options = {},
                      std::string diff_ref = {});

nlohmann::json RuleVerdictToJson(const RuleVerdict& verdict);

}  // namespace editintent

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

#include <algorithm>

namespace editintent {
namespace {

bool CitationInserted(const Segment& seg, RegexMode mode) {
  return !seg.inserted.empty() && DetectCitation(seg.inserted, mode) &&
         !DetectCitation(seg.deleted, mode);
}

bool SegmentMarkupOnly(const Segment& seg) {
  return IsMarkupOnly(seg.inserted) && IsMarkupOnly(seg.deleted);
}

MarkupFlags LineMarkup(const LineChange& line, RegexMode mode) {
  MarkupFlags flags;
  for (const Segment& seg : line.segments) {
    const MarkupFlags f = SegmentMarkup(seg, mode);
    flags.citation |= f.citation;
    flags.template_ |= f.template_;
    flags.wikilink |= f.wikilink;
    flags.infobox |= f.infobox;
    flags.multiline |= f.multiline;
  }
  return flags;
}

void AddNegatedClauses(const std::string& prefix, const MarkupFlags& flags,
                       std::vector<RuleTrace>& trace) {
  trace.push_back({prefix + "NOT is_citation_inserted_or_deleted", !flags.citation});
  trace.push_back({prefix + "NOT is_template_inserted_or_deleted", !flags.template_});
  trace.push_back({prefix + "NOT is_wikilink_inserted_or_deleted", !flags.wikilink});
  trace.push_back({prefix + "NOT is_infobox_inserted_or_deleted", !flags.infobox});
  trace.push_back({prefix + "NOT is_multiline_inserted_or_deleted", !flags.multiline});
}

}  // namespace

MarkupFlags SegmentMarkup(const Segment& segment, RegexMode mode) {
  MarkupFlags flags;
  // An absent side carries no inserted or deleted content; the infobox
  // pattern's "^$" alternative would otherwise fire on every pure insertion.
  for (const std::string* side : {&segment.inserted, &segment.deleted}) {
    if (side->empty()) continue;
    flags.citation |= DetectCitation(*side, mode);
    flags.template_ |= DetectTemplate(*side, mode);
    flags.wikilink |= DetectWikilink(*side, mode);
    flags.infobox |= DetectInfoboxParam(*side, mode);
    flags.multiline |= IsMultiline(*side);
  }
  return flags;
}

CategoryVerdict ClassifyCitation(const EditDiff& diff, const RuleOptions& options) {
  CategoryVerdict verdict;
  for (size_t l = 0; l < diff.lines.size(); ++l) {
    const LineChange& line = diff.lines[l];
    bool line_has_citation = false;
    for (const Segment& seg : line.segments) {
      line_has_citation |= CitationInserted(seg, options.mode);
    }
    if (!line_has_citation) continue;
    verdict.matched = true;
    for (ChangedSentence& cs : AlignSentences(line, l)) {
      const bool carries = std::any_of(
          cs.segments.begin(), cs.segments.end(),
          [&](const Segment& s) { return CitationInserted(s, options.mode); });
      if (carries) verdict.sentences.push_back(std::move(cs));
    }
  }
  verdict.trace.push_back({"citation/is_citation_inserted", verdict.matched});
  return verdict;
}

CategoryVerdict ClassifyPov(const EditDiff& diff, const RuleOptions& options) {
  CategoryVerdict verdict;
  auto& trace = verdict.trace;
  const bool one_paragraph = CountChangedParagraphs(diff) == 1;
  const bool one_line = diff.lines.size() == 1;
  const bool comment = CommentMatchesPov(diff.comment, options.mode);
  MarkupFlags flags;
  for (const LineChange& line : diff.lines) {
    const MarkupFlags f = LineMarkup(line, options.mode);
    flags.citation |= f.citation;
    flags.template_ |= f.template_;
    flags.wikilink |= f.wikilink;
    flags.infobox |= f.infobox;
    flags.multiline |= f.multiline;
  }
  trace.push_back({"point_of_view/para_changes == 1", one_paragraph});
  trace.push_back({"point_of_view/single_changed_line", one_line});
  trace.push_back({"point_of_view/comment_matches pov|pointy", comment});
  AddNegatedClauses("point_of_view/", flags, trace);

  verdict.matched = one_paragraph && one_line && comment && !flags.any();
  if (!verdict.matched) return verdict;
  for (ChangedSentence& cs : AlignSentences(diff.lines.front(), 0)) {
    const bool all_markup = std::all_of(cs.segments.begin(), cs.segments.end(),
                                        SegmentMarkupOnly);
    if (!all_markup) verdict.sentences.push_back(std::move(cs));
  }
  return verdict;
}

CategoryVerdict ClassifyClarification(const EditDiff& diff,
                                      const RuleOptions& options) {
  CategoryVerdict verdict;
  auto& trace = verdict.trace;
  for (size_t l = 0; l < diff.lines.size(); ++l) {
    const LineChange& line = diff.lines[l];
    const MarkupFlags flags = LineMarkup(line, options.mode);
    const std::string line_prefix = "clarification[line " + std::to_string(l) + "]/";
    AddNegatedClauses(line_prefix, flags, trace);

    const SentenceAlignment alignment = AlignSentencesDetailed(line, l);
    trace.push_back({line_prefix + "skipped_new_sentence_insertions",
                     !alignment.new_sentence_insertions.empty()});
    for (size_t s = 0; s < alignment.sentences.size(); ++s) {
      const ChangedSentence& cs = alignment.sentences[s];
      bool qualifies = false;
      for (size_t g = 0; g < cs.segments.size(); ++g) {
        const Segment& seg = cs.segments[g];
        const std::string prefix = "clarification[line " + std::to_string(l) +
                                   " sentence " + std::to_string(s) +
                                   " segment " + std::to_string(g) + "]/";
        const size_t ins = CountWords(seg.inserted);
        const size_t del = CountWords(seg.deleted);
        const bool ins_ok = ins <= options.max_inserted_words;
        const bool del_ok = del <= options.max_deleted_words;
        const bool nonempty = ins + del > 0;
        const bool content = !SegmentMarkupOnly(seg);
        trace.push_back({prefix + "inserted_length_words in [0," +
                             std::to_string(options.max_inserted_words) + "]",
                         ins_ok});
        trace.push_back({prefix + "deleted_length_words in [0," +
                             std::to_string(options.max_deleted_words) + "]",
                         del_ok});
        trace.push_back({prefix + "words_changed > 0", nonempty});
        trace.push_back({prefix + "NOT markup_only", content});
        qualifies |= ins_ok && del_ok && nonempty && content && !flags.any();
      }
      if (qualifies) verdict.sentences.push_back(cs);
    }
  }
  verdict.matched = !verdict.sentences.empty();
  trace.push_back({"clarification/matched", verdict.matched});
  return verdict;
}

RuleVerdict LabelEdit(const EditDiff& diff, const RuleOptions& options,
                      std::string diff_ref) {
  RuleVerdict verdict;
  verdict.diff_ref = std::move(diff_ref);
  const std::pair<Category, CategoryVerdict> blocks[] = {
      {Category::kCitation, ClassifyCitation(diff, options)},
      {Category::kPointOfView, ClassifyPov(diff, options)},
      {Category::kClarification, ClassifyClarification(diff, options)},
  };
  for (const auto& [category, block] : blocks) {
    verdict.trace.insert(verdict.trace.end(), block.trace.begin(), block.trace.end());
    if (!block.matched) continue;
    verdict.labels.insert(category);
    for (const ChangedSentence& cs : block.sentences) {
      verdict.positive_sentences.push_back({cs, category});
    }
  }
  return verdict;
}

nlohmann::json RuleVerdictToJson(const RuleVerdict& verdict) {
  nlohmann::json labels = nlohmann::json::array();
  for (Category c : verdict.labels) labels.push_back(std::string(CategoryName(c)));
  nlohmann::json positives = nlohmann::json::array();
  for (const PositiveSentence& p : verdict.positive_sentences) {
    nlohmann::json s = ChangedSentenceToJson(p.sentence);
    s["category"] = std::string(CategoryName(p.category));
    positives.push_back(std::move(s));
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const RuleTrace& t : verdict.trace) {
    trace.push_back({{"rule", t.rule}, {"value", t.value}});
  }
  return {{"diff_ref", verdict.diff_ref},
          {"labels", labels},
          {"positive_sentences", positives},
          {"trace", trace}};
}

}  // namespace editintent

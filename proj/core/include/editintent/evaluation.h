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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "editintent/types.h"
#include "json.hpp"

namespace editintent {

// ---- Stratified sampling ----

struct PoolItem {
  std::string diff_id;
  std::set<Category> rule_labels;
};

enum class Stratum { kPointOfView, kClarification, kRemainder };
std::string_view StratumName(Stratum stratum);

struct SampleQuotas {
  size_t point_of_view = 100;
  size_t clarification = 100;
  size_t remainder = 800;
};

struct SampleOptions {
  SampleQuotas quotas;
  // Fill a short labeled stratum from the remainder instead of failing.
  bool backfill = false;
};

struct SampledDiff {
  std::string diff_id;
  Stratum stratum = Stratum::kRemainder;

  friend bool operator==(const SampledDiff&, const SampledDiff&) = default;
};

// Without-replacement draws: point-of-view quota from diffs the rules
// labeled point_of_view, then clarification quota from the unselected
// clarification-labeled diffs, then the remainder quota from everything
// not yet selected. Output is grouped by stratum in draw order. The pool
// is canonicalized by diff_id first, so input order does not matter.
// Throws InvalidArgument listing the shortfall when a stratum is too small
// (unless backfilling), or on duplicate diff ids.
std::vector<SampledDiff> StratifiedSample(std::span<const PoolItem> pool, uint64_t seed,
                                          const SampleOptions& options = {});

// ---- Annotations and ground truth ----

struct AnnotationRecord {
  std::string diff_id;
  std::string annotator_id;
  std::set<Category> categories;
  bool none_flag = false;
  std::optional<std::string> comment;
  Timestamp submitted_at{};

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

// Throws InvalidArgument unless exactly one of (categories non-empty,
// none_flag) holds and both ids are non-empty.
void ValidateAnnotation(const AnnotationRecord& record);

nlohmann::json AnnotationRecordToJson(const AnnotationRecord& record);
// Throws ParseError on malformed JSON fields.
AnnotationRecord AnnotationRecordFromJson(const nlohmann::json& j);

using GroundTruth = std::map<std::string, std::set<Category>>;

// Union of labels over diffs with at least `min_annotators` distinct
// annotators. Throws InvalidArgument on two records for the same
// (diff_id, annotator_id).
GroundTruth AggregateGroundTruth(std::span<const AnnotationRecord> records,
                                 size_t min_annotators = 3);

// ---- Rule precision / recall ----

struct CategoryScores {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  int64_t tn = 0;
  std::optional<double> precision;  // unset when TP+FP == 0
  std::optional<double> recall;     // unset when TP+FN == 0
  std::optional<double> f1;         // unset when precision or recall is
};

// Fills precision, recall and F1 from the counts.
void FinalizeScores(CategoryScores& scores);

using RuleLabels = std::map<std::string, std::set<Category>>;

// Scores over the ground-truth diff set; diffs missing from `verdicts` carry
// no rule labels. A category not assigned by anyone is a negative.
std::array<CategoryScores, 3> RulePrecisionRecall(const RuleLabels& verdicts,
                                                  const GroundTruth& truth);

// ---- Agreement ----

// Rows are items, columns coders; unset cells are missing. Values are
// nominal codes.
using ReliabilityMatrix = std::vector<std::vector<std::optional<int>>>;

// Nominal Krippendorff alpha from the coincidence matrix. Items with fewer
// than two values are ignored. Returns 1.0 when every pairable value is the
// same. Throws InvalidArgument when fewer than two items are pairable.
double KrippendorffAlpha(const ReliabilityMatrix& matrix);

// Binary labeled/not-labeled matrix for one category: rows are diffs sorted
// by id, columns annotators sorted by id.
ReliabilityMatrix BuildReliabilityMatrix(std::span<const AnnotationRecord> records,
                                         Category category);

// ---- Ranking ----

// Probability that a random positive scores above a random negative, ties
// counting one half. Throws InvalidArgument without both classes or on a
// size mismatch.
double RocAuc(std::span<const double> scores, std::span<const int> labels);

// ---- Reports ----

struct StudyReport {
  size_t records = 0;
  size_t annotators = 0;
  size_t ground_truth_diffs = 0;
  std::array<std::optional<double>, 3> alpha;  // unset when not computable
  std::array<CategoryScores, 3> rules;
};

StudyReport BuildStudyReport(std::span<const AnnotationRecord> records,
                             const RuleLabels& verdicts, size_t min_annotators = 3);
nlohmann::json StudyReportToJson(const StudyReport& report);
std::string FormatStudyReport(const StudyReport& report);

}  // namespace editintent

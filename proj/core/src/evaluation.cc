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

#include "editintent/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "editintent/random.h"

namespace editintent {
namespace {

// Moves `count` uniformly chosen members of `candidates` (by index into the
// canonical pool) to the front, in draw order.
std::vector<size_t> DrawWithoutReplacement(std::vector<size_t> candidates, size_t count,
                                           Rng& rng) {
  count = std::min(count, candidates.size());
  for (size_t i = 0; i < count; ++i) {
    const size_t j = i + static_cast<size_t>(rng.Uniform(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  return candidates;
}

std::string FormatOptional(const std::optional<double>& v) {
  if (!v) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

nlohmann::json OptionalToJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string_view StratumName(Stratum stratum) {
  switch (stratum) {
    case Stratum::kPointOfView:
      return "point_of_view";
    case Stratum::kClarification:
      return "clarification";
    case Stratum::kRemainder:
      return "remainder";
  }
  return "remainder";
}

std::vector<SampledDiff> StratifiedSample(std::span<const PoolItem> pool, uint64_t seed,
                                          const SampleOptions& options) {
  std::vector<const PoolItem*> items;
  items.reserve(pool.size());
  for (const PoolItem& p : pool) items.push_back(&p);
  std::sort(items.begin(), items.end(),
            [](const PoolItem* a, const PoolItem* b) { return a->diff_id < b->diff_id; });
  for (size_t i = 1; i < items.size(); ++i) {
    if (items[i]->diff_id == items[i - 1]->diff_id) {
      throw InvalidArgument("duplicate diff_id in pool: " + items[i]->diff_id);
    }
  }

  Rng rng(seed);
  std::vector<bool> taken(items.size(), false);
  std::vector<SampledDiff> out;
  size_t carry = 0;  // labeled shortfall to backfill from the remainder
  std::vector<std::string> shortfalls;

  const std::pair<Category, size_t> labeled[] = {
      {Category::kPointOfView, options.quotas.point_of_view},
      {Category::kClarification, options.quotas.clarification}};
  for (const auto& [category, quota] : labeled) {
    std::vector<size_t> candidates;
    for (size_t i = 0; i < items.size(); ++i) {
      if (!taken[i] && items[i]->rule_labels.count(category)) candidates.push_back(i);
    }
    if (candidates.size() < quota) {
      shortfalls.push_back(std::string(CategoryName(category)) + " stratum has " +
                           std::to_string(candidates.size()) + " diffs for a quota of " +
                           std::to_string(quota) + " (short by " +
                           std::to_string(quota - candidates.size()) + ")");
      carry += quota - candidates.size();
    }
    const Stratum stratum =
        category == Category::kPointOfView ? Stratum::kPointOfView : Stratum::kClarification;
    for (size_t i : DrawWithoutReplacement(std::move(candidates), quota, rng)) {
      taken[i] = true;
      out.push_back({items[i]->diff_id, stratum});
    }
  }
  if (!shortfalls.empty() && !options.backfill) {
    std::string message = "stratified sample shortfall: ";
    for (size_t i = 0; i < shortfalls.size(); ++i) {
      if (i) message += "; ";
      message += shortfalls[i];
    }
    throw InvalidArgument(message);
  }

  std::vector<size_t> rest;
  for (size_t i = 0; i < items.size(); ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  const size_t want = options.quotas.remainder + carry;
  if (rest.size() < want) {
    throw InvalidArgument("stratified sample shortfall: remainder has " +
                          std::to_string(rest.size()) + " diffs for a quota of " +
                          std::to_string(want) + " (short by " +
                          std::to_string(want - rest.size()) + ")");
  }
  for (size_t i : DrawWithoutReplacement(std::move(rest), want, rng)) {
    out.push_back({items[i]->diff_id, Stratum::kRemainder});
  }
  return out;
}

void ValidateAnnotation(const AnnotationRecord& record) {
  if (record.diff_id.empty()) throw InvalidArgument("diff_id is empty");
  if (record.annotator_id.empty()) throw InvalidArgument("annotator_id is empty");
  if (record.none_flag && !record.categories.empty()) {
    throw InvalidArgument("none_flag set together with categories");
  }
  if (!record.none_flag && record.categories.empty()) {
    throw InvalidArgument("no categories selected and none_flag not set");
  }
}

nlohmann::json AnnotationRecordToJson(const AnnotationRecord& record) {
  nlohmann::json categories = nlohmann::json::array();
  for (Category c : record.categories) categories.push_back(std::string(CategoryName(c)));
  nlohmann::json j;
  j["diff_id"] = record.diff_id;
  j["annotator_id"] = record.annotator_id;
  j["categories"] = categories;
  j["none_flag"] = record.none_flag;
  j["comment"] = record.comment ? nlohmann::json(*record.comment) : nlohmann::json(nullptr);
  j["submitted_at"] = FormatTimestamp(record.submitted_at);
  return j;
}

AnnotationRecord AnnotationRecordFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("annotation record is not an object");
  auto string_field = [&](const char* name) {
    auto it = j.find(name);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(std::string("field '") + name + "' missing or not a string");
    }
    return it->get<std::string>();
  };
  AnnotationRecord r;
  r.diff_id = string_field("diff_id");
  r.annotator_id = string_field("annotator_id");
  auto cats = j.find("categories");
  if (cats == j.end() || !cats->is_array()) {
    throw ParseError("field 'categories' missing or not an array");
  }
  for (const auto& c : *cats) {
    if (!c.is_string()) throw ParseError("field 'categories' holds a non-string");
    auto parsed = ParseCategory(c.get<std::string>());
    if (!parsed) throw ParseError("unknown category '" + c.get<std::string>() + "'");
    r.categories.insert(*parsed);
  }
  auto none = j.find("none_flag");
  if (none == j.end() || !none->is_boolean()) {
    throw ParseError("field 'none_flag' missing or not a boolean");
  }
  r.none_flag = none->get<bool>();
  auto comment = j.find("comment");
  if (comment != j.end() && !comment->is_null()) {
    if (!comment->is_string()) throw ParseError("field 'comment' is not a string");
    r.comment = comment->get<std::string>();
  }
  const std::string ts = string_field("submitted_at");
  auto parsed_ts = ParseTimestamp(ts);
  if (!parsed_ts) throw ParseError("field 'submitted_at' is not a timestamp: " + ts);
  r.submitted_at = *parsed_ts;
  return r;
}

GroundTruth AggregateGroundTruth(std::span<const AnnotationRecord> records,
                                 size_t min_annotators) {
  std::map<std::string, std::set<std::string>> annotators;
  GroundTruth labels;
  for (const AnnotationRecord& r : records) {
    if (!annotators[r.diff_id].insert(r.annotator_id).second) {
      throw InvalidArgument("two records for diff " + r.diff_id + " by annotator " +
                            r.annotator_id);
    }
    labels[r.diff_id].insert(r.categories.begin(), r.categories.end());
  }
  GroundTruth out;
  for (auto& [diff, set] : labels) {
    if (annotators[diff].size() >= min_annotators) out.emplace(diff, std::move(set));
  }
  return out;
}

void FinalizeScores(CategoryScores& s) {
  s.precision.reset();
  s.recall.reset();
  s.f1.reset();
  if (s.tp + s.fp > 0) s.precision = static_cast<double>(s.tp) / (s.tp + s.fp);
  if (s.tp + s.fn > 0) s.recall = static_cast<double>(s.tp) / (s.tp + s.fn);
  if (s.precision && s.recall) {
    const double sum = *s.precision + *s.recall;
    s.f1 = sum > 0 ? 2 * *s.precision * *s.recall / sum : 0.0;
  }
}

std::array<CategoryScores, 3> RulePrecisionRecall(const RuleLabels& verdicts,
                                                  const GroundTruth& truth) {
  std::array<CategoryScores, 3> out;
  static const std::set<Category> kNone;
  for (const auto& [diff, gold] : truth) {
    auto it = verdicts.find(diff);
    const std::set<Category>& predicted = it == verdicts.end() ? kNone : it->second;
    for (Category c : kAllCategories) {
      CategoryScores& s = out[static_cast<size_t>(c)];
      const bool p = predicted.count(c) != 0;
      const bool g = gold.count(c) != 0;
      if (p && g) {
        ++s.tp;
      } else if (p) {
        ++s.fp;
      } else if (g) {
        ++s.fn;
      } else {
        ++s.tn;
      }
    }
  }
  for (CategoryScores& s : out) FinalizeScores(s);
  return out;
}

double KrippendorffAlpha(const ReliabilityMatrix& matrix) {
  std::map<int, size_t> code;
  for (const auto& row : matrix) {
    for (const auto& cell : row) {
      if (cell) code.emplace(*cell, 0);
    }
  }
  size_t next = 0;
  for (auto& [value, index] : code) index = next++;
  const size_t k = code.size();
  std::vector<double> coincidence(k * k, 0.0);
  size_t pairable = 0;
  for (const auto& row : matrix) {
    std::vector<size_t> counts(k, 0);
    size_t m = 0;
    for (const auto& cell : row) {
      if (!cell) continue;
      ++counts[code[*cell]];
      ++m;
    }
    if (m < 2) continue;
    ++pairable;
    for (size_t c = 0; c < k; ++c) {
      if (!counts[c]) continue;
      for (size_t d = 0; d < k; ++d) {
        const double pairs = c == d ? static_cast<double>(counts[c]) * (counts[c] - 1)
                                    : static_cast<double>(counts[c]) * counts[d];
        coincidence[c * k + d] += pairs / static_cast<double>(m - 1);
      }
    }
  }
  if (pairable < 2) {
    throw InvalidArgument("alpha needs at least two items with two or more values, got " +
                          std::to_string(pairable));
  }
  std::vector<double> marginal(k, 0.0);
  double n = 0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) marginal[c] += coincidence[c * k + d];
    n += marginal[c];
  }
  double observed = 0;
  double expected = 0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      observed += coincidence[c * k + d];
      expected += marginal[c] * marginal[d];
    }
  }
  if (expected == 0) return 1.0;
  return 1.0 - (n - 1) * observed / expected;
}

ReliabilityMatrix BuildReliabilityMatrix(std::span<const AnnotationRecord> records,
                                         Category category) {
  std::map<std::string, size_t> items;
  std::map<std::string, size_t> coders;
  for (const AnnotationRecord& r : records) {
    items.emplace(r.diff_id, 0);
    coders.emplace(r.annotator_id, 0);
  }
  size_t i = 0;
  for (auto& [id, index] : items) index = i++;
  i = 0;
  for (auto& [id, index] : coders) index = i++;
  ReliabilityMatrix matrix(items.size(), std::vector<std::optional<int>>(coders.size()));
  for (const AnnotationRecord& r : records) {
    matrix[items[r.diff_id]][coders[r.annotator_id]] = r.categories.count(category) ? 1 : 0;
  }
  return matrix;
}

double RocAuc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgument("scores and labels differ in length");
  }
  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0;
  size_t positives = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        positive_rank_sum += mid_rank;
        ++positives;
      }
    }
    i = j;
  }
  const size_t negatives = order.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw InvalidArgument("ROC-AUC needs both positive and negative labels");
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

StudyReport BuildStudyReport(std::span<const AnnotationRecord> records,
                             const RuleLabels& verdicts, size_t min_annotators) {
  StudyReport report;
  report.records = records.size();
  std::set<std::string> annotators;
  for (const AnnotationRecord& r : records) annotators.insert(r.annotator_id);
  report.annotators = annotators.size();
  const GroundTruth truth = AggregateGroundTruth(records, min_annotators);
  report.ground_truth_diffs = truth.size();
  for (Category c : kAllCategories) {
    try {
      report.alpha[static_cast<size_t>(c)] =
          KrippendorffAlpha(BuildReliabilityMatrix(records, c));
    } catch (const InvalidArgument&) {
    }
  }
  report.rules = RulePrecisionRecall(verdicts, truth);
  return report;
}

nlohmann::json StudyReportToJson(const StudyReport& report) {
  nlohmann::json categories = nlohmann::json::object();
  for (Category c : kAllCategories) {
    const size_t i = static_cast<size_t>(c);
    const CategoryScores& s = report.rules[i];
    categories[std::string(CategoryName(c))] = {
        {"alpha", OptionalToJson(report.alpha[i])},
        {"tp", s.tp},
        {"fp", s.fp},
        {"fn", s.fn},
        {"tn", s.tn},
        {"precision", OptionalToJson(s.precision)},
        {"recall", OptionalToJson(s.recall)},
        {"f1", OptionalToJson(s.f1)}};
  }
  return {{"records", report.records},
          {"annotators", report.annotators},
          {"ground_truth_diffs", report.ground_truth_diffs},
          {"categories", categories}};
}

std::string FormatStudyReport(const StudyReport& report) {
  std::ostringstream out;
  out << "records " << report.records << ", annotators " << report.annotators
      << ", ground-truth diffs " << report.ground_truth_diffs << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-15s %10s %6s %6s %6s %6s %10s %10s %10s\n", "category",
                "alpha", "TP", "FP", "FN", "TN", "precision", "recall", "F1");
  out << line;
  for (Category c : kAllCategories) {
    const size_t i = static_cast<size_t>(c);
    const CategoryScores& s = report.rules[i];
    std::snprintf(line, sizeof line, "%-15s %10s %6lld %6lld %6lld %6lld %10s %10s %10s\n",
                  std::string(CategoryName(c)).c_str(), FormatOptional(report.alpha[i]).c_str(),
                  static_cast<long long>(s.tp), static_cast<long long>(s.fp),
                  static_cast<long long>(s.fn), static_cast<long long>(s.tn),
                  FormatOptional(s.precision).c_str(), FormatOptional(s.recall).c_str(),
                  FormatOptional(s.f1).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace editintent

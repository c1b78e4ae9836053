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

// Random corpus inputs and an independent checker for the split contract.

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "editintent/corpus.h"
#include "editintent/random.h"

namespace editintent::testing {

struct CorpusInput {
  std::vector<LabeledSentence> positives;
  std::vector<LabeledSentence> negatives;
};

// `n` records per side spread over pages of 1..max_page records. Positive and
// negative pages are disjoint, as they are in practice.
inline CorpusInput RandomBalancedInput(Rng& rng, size_t n, size_t max_page) {
  CorpusInput in;
  int64_t page = 1;
  for (Polarity polarity : {Polarity::kPositive, Polarity::kNegative}) {
    auto& out = polarity == Polarity::kPositive ? in.positives : in.negatives;
    size_t left = 0;
    for (size_t i = 0; i < n; ++i) {
      if (left == 0) {
        ++page;
        left = 1 + rng.Uniform(max_page);
      }
      --left;
      std::string text = std::string(PolarityName(polarity)) + " sentence " +
                         std::to_string(i) + " on page " + std::to_string(page) + ".";
      out.push_back(MakeLabeledSentence(std::move(text), Category::kClarification,
                                        polarity, page, 1000 + page, "Body"));
    }
  }
  return in;
}

// Empty string when the contract holds, otherwise the first violation.
inline std::string CheckSplitContract(const CorpusSplit& split,
                                      const CorpusInput& in) {
  std::ostringstream err;
  const double total = static_cast<double>(split.size());
  const std::vector<LabeledSentence>* parts[] = {&split.train, &split.validation,
                                                 &split.test};
  const double share[] = {0.7, 0.1, 0.2};
  const char* names[] = {"train", "validation", "test"};
  size_t pos = 0, neg = 0;
  std::map<int64_t, int> page_split;
  std::set<std::string> seen;
  std::set<std::string> inputs;
  for (const auto* side : {&in.positives, &in.negatives}) {
    for (const auto& s : *side) inputs.insert(s.text);
  }
  for (int s = 0; s < 3; ++s) {
    const double want = share[s] * total;
    if (std::abs(static_cast<double>(parts[s]->size()) - want) > 1.0 + 1e-9) {
      err << names[s] << " has " << parts[s]->size() << " of " << total;
      return err.str();
    }
    for (const auto& r : *parts[s]) {
      (r.polarity == Polarity::kPositive ? pos : neg) += 1;
      if (!seen.insert(r.text).second) return "duplicate record " + r.text;
      if (!inputs.count(r.text)) return "record not from input: " + r.text;
      auto [it, fresh] = page_split.emplace(r.page_id, s);
      if (!fresh && it->second != s) {
        err << "page " << r.page_id << " spans " << names[it->second] << " and "
            << names[s];
        return err.str();
      }
    }
  }
  if (pos != neg) {
    err << "unbalanced: " << pos << " positive vs " << neg << " negative";
    return err.str();
  }
  if (split.size() == 0) return "empty corpus";
  return "";
}

inline std::string ExportBytes(const CorpusSplit& split) {
  std::ostringstream out;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    WriteLabeledSentences(out, *part);
    out << "--\n";
  }
  return out.str();
}

}  // namespace editintent::testing

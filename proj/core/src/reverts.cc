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

#include <deque>
#include <string>
#include <vector>

namespace editintent {

std::unordered_map<int64_t, RevertStatus> DetectReverts(
    std::span<const Revision> page, const RevertConfig& config) {
  for (size_t i = 1; i < page.size(); ++i) {
    if (!RevisionOrder(page[i - 1], page[i])) {
      throw InvalidArgument("revisions not strictly ascending at rev_id " +
                            std::to_string(page[i].rev_id));
    }
  }
  const size_t n = page.size();
  std::vector<bool> reverting(n, false);
  std::vector<int> cover(n + 1, 0);  // difference array over reverted interiors

  // sha1 -> indices still inside the window, oldest first.
  std::unordered_map<std::string_view, std::deque<size_t>> recent;
  const size_t window = config.window < 0 ? 0 : static_cast<size_t>(config.window);
  for (size_t j = 0; j < n; ++j) {
    auto& seen = recent[page[j].sha1];
    while (!seen.empty() && j - seen.front() - 1 > window) seen.pop_front();
    // Earliest partner within the horizon gives the widest interior; every
    // narrower pair's interior is contained in it.
    for (size_t i : seen) {
      if (j - i < 2) break;
      if (page[j].timestamp - page[i].timestamp > config.horizon) continue;
      reverting[j] = true;
      ++cover[i + 1];
      --cover[j];
      break;
    }
    seen.push_back(j);
  }

  std::unordered_map<int64_t, RevertStatus> out;
  out.reserve(n);
  int depth = 0;
  for (size_t k = 0; k < n; ++k) {
    depth += cover[k];
    RevertStatus status = RevertStatus::kClean;
    if (reverting[k]) {
      status = RevertStatus::kReverting;
    } else if (depth > 0) {
      status = RevertStatus::kReverted;
    }
    out.emplace(page[k].rev_id, status);
  }
  return out;
}

std::string_view RevertStatusName(RevertStatus status) {
  switch (status) {
    case RevertStatus::kClean:
      return "clean";
    case RevertStatus::kReverted:
      return "reverted";
    case RevertStatus::kReverting:
      return "reverting";
  }
  return "clean";
}

}  // namespace editintent

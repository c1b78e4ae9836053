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

#include <chrono>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "editintent/revision.h"

namespace editintent {

enum class RevertStatus { kClean, kReverted, kReverting };

struct RevertConfig {
  // Maximum number of revisions strictly between a revert and the revision
  // it restores.
  int window = 15;
  std::chrono::seconds horizon = std::chrono::hours(48);
  // Whether reverting revisions are excluded from labeling as well as
  // reverted ones.
  bool exclude_reverting = true;
};

// Identity reverts: revision r whose sha1 equals an earlier q with at least
// one and at most `window` revisions between them, and
// timestamp(r) - timestamp(q) <= horizon. Every revision strictly between
// such a pair is Reverted and r is Reverting. A revision that is itself a
// revert keeps Reverting even when a later revert also spans it.
//
// `page` must be strictly ascending by (timestamp, rev_id); throws
// InvalidArgument otherwise.
std::unordered_map<int64_t, RevertStatus> DetectReverts(
    std::span<const Revision> page, const RevertConfig& config = {});

// True when the status keeps a revision out of labeling.
inline bool ExcludedFromLabeling(RevertStatus status,
                                 const RevertConfig& config = {}) {
  return status == RevertStatus::kReverted ||
         (status == RevertStatus::kReverting && config.exclude_reverting);
}

std::string_view RevertStatusName(RevertStatus status);

}  // namespace editintent

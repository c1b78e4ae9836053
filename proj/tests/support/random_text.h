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

// Random strings and mutations for diff properties.

#include <algorithm>
#include <string>
#include <string_view>

#include "editintent/random.h"

namespace editintent::testing {

inline std::string RandomText(Rng& rng, size_t max_len, std::string_view alphabet) {
  const size_t n = rng.Uniform(max_len + 1);
  std::string s;
  for (size_t i = 0; i < n; ++i) s += alphabet[rng.Uniform(alphabet.size())];
  return s;
}

// Mutates a base string so pairs share structure, which is the common case.
inline std::string Mutate(Rng& rng, const std::string& base, std::string_view alphabet) {
  std::string s = base;
  const int edits = static_cast<int>(rng.Uniform(6));
  for (int e = 0; e < edits; ++e) {
    const size_t pos = s.empty() ? 0 : rng.Uniform(s.size() + 1);
    switch (rng.Uniform(3)) {
      case 0:
        s.insert(pos, RandomText(rng, 6, alphabet));
        break;
      case 1:
        if (!s.empty() && pos < s.size()) {
          s.erase(pos, 1 + rng.Uniform(std::min<size_t>(6, s.size() - pos)));
        }
        break;
      default:
        if (pos < s.size()) s[pos] = alphabet[rng.Uniform(alphabet.size())];
        break;
    }
  }
  return s;
}

// One old/new pair; every third pair is unrelated text.
inline std::pair<std::string, std::string> RandomLinePair(Rng& rng, int trial) {
  static constexpr std::string_view kAlphabets[] = {"ab ", "abc \t.", "xy[]{}|= \n'",
                                                    "The quick brown fox. "};
  const auto alpha = kAlphabets[trial % 4];
  std::string old_line = RandomText(rng, 60, alpha);
  std::string new_line =
      trial % 3 == 0 ? RandomText(rng, 60, alpha) : Mutate(rng, old_line, alpha);
  return {std::move(old_line), std::move(new_line)};
}

}  // namespace editintent::testing

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
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace editintent {

// UTC instant with second precision.
using Timestamp = std::chrono::sys_seconds;

// Semantic intent categories labeled by the rule engine and by annotators.
enum class Category { kCitation, kPointOfView, kClarification };

inline constexpr std::array<Category, 3> kAllCategories = {
    Category::kCitation, Category::kPointOfView, Category::kClarification};

// WP1.0 article assessment classes.
enum class QualityClass { kStub, kStart, kC, kB, kGA, kFA, kUnassessed };

// Wire names: "citation", "point_of_view", "clarification".
std::string_view CategoryName(Category category);
std::optional<Category> ParseCategory(std::string_view name);

// Wire names match the WP1.0 class labels: "Stub", "Start", "C", "B", "GA",
// "FA", "Unassessed".
std::string_view QualityClassName(QualityClass quality);
std::optional<QualityClass> ParseQualityClass(std::string_view name);

// ISO-8601 "YYYY-MM-DDTHH:MM:SSZ". Parsing also accepts a missing "Z" and
// a space separator.
std::string FormatTimestamp(Timestamp ts);
std::optional<Timestamp> ParseTimestamp(std::string_view text);

// Base class for the library's recoverable errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (XML, JSONL, corpus or model files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Violated precondition on an operation's arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace editintent

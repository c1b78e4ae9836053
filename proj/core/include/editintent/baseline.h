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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "editintent/corpus.h"
#include "editintent/evaluation.h"
#include "editintent/types.h"

namespace editintent {

inline constexpr uint32_t kHashBits = 18;
inline constexpr uint32_t kHashBuckets = 1u << kHashBits;

// Markup stripped, apostrophes deleted, other non-alphanumeric ASCII turned
// into spaces, lowercased, split on whitespace. Bytes >= 0x80 are kept.
std::vector<std::string> Preprocess(std::string_view sentence);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data);
inline uint32_t HashBucket(std::string_view feature) {
  return static_cast<uint32_t>(Fnv1a64(feature) & (kHashBuckets - 1));
}

// Sorted (bucket, value) pairs, no duplicate buckets.
using FeatureVector = std::vector<std::pair<uint32_t, double>>;

// Unigram and "a_b" bigram counts hashed into kHashBuckets, L2-normalized.
FeatureVector Featurize(std::span<const std::string> tokens);

struct Example {
  FeatureVector features;
  int label = 0;  // 1 positive
};

Example MakeExample(const LabeledSentence& sentence);

struct Model {
  Category category = Category::kCitation;
  std::vector<double> weights = std::vector<double>(kHashBuckets, 0.0);
  double bias = 0.0;
  uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;

  friend bool operator==(const Model&, const Model&) = default;
};

struct TrainOptions {
  int epochs = 10;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  std::optional<double> validation_loss;
  bool accepted = true;  // false when the epoch raised training loss
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;
};

// Mean logistic loss plus (l2 / 2) * |w|^2.
double Loss(const Model& model, std::span<const Example> data, double l2);
// Gradient of Loss with respect to (weights..., bias), dense.
std::vector<double> Gradient(const Model& model, std::span<const Example> data, double l2);

// Seeded SGD over shuffled examples. An epoch that would raise the full
// training loss is discarded and the step size halved, so the recorded
// training loss never increases. Throws InvalidArgument on empty or
// single-class training data.
TrainResult Train(const CorpusSplit& split, const TrainOptions& options = {});
TrainResult TrainExamples(std::span<const Example> train,
                          std::span<const Example> validation, Category category,
                          const TrainOptions& options = {});

double Sigmoid(double z);
double Score(const Model& model, const FeatureVector& features);
// Probability in the open interval (0, 1).
double Predict(const Model& model, std::string_view sentence);

struct ModelMetrics {
  CategoryScores scores;
  std::optional<double> roc_auc;
  size_t examples = 0;
};

// Positive iff probability >= threshold.
ModelMetrics EvaluateModel(const Model& model, std::span<const LabeledSentence> test,
                           double threshold = 0.5);
nlohmann::json ModelMetricsToJson(const ModelMetrics& metrics);

inline constexpr char kModelMagic[8] = {'E', 'I', 'B', 'L', 'M', 'D', 'L', '1'};

void SaveModel(const Model& model, const std::filesystem::path& path);
// Throws ParseError on bad magic, truncation or non-finite weights.
Model LoadModel(const std::filesystem::path& path);

}  // namespace editintent

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

#include "editintent/baseline.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "editintent/random.h"
#include "editintent/wikitext.h"

namespace editintent {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written in host byte order");

double LogLoss(double z, int label) {
  // log(1 + exp(-y z)) with y in {-1, +1}, computed stably.
  const double m = label ? -z : z;
  return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

double DotScaled(const std::vector<double>& v, double scale, const FeatureVector& x) {
  double s = 0;
  for (const auto& [j, value] : x) s += v[j] * value;
  return s * scale;
}

template <typename T>
void WritePod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T ReadPod(std::istream& in, const std::string& path) {
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw ParseError(path + ": truncated model file");
  }
  return value;
}

std::vector<Example> Examples(std::span<const LabeledSentence> sentences) {
  std::vector<Example> out;
  out.reserve(sentences.size());
  for (const LabeledSentence& s : sentences) out.push_back(MakeExample(s));
  return out;
}

}  // namespace

std::vector<std::string> Preprocess(std::string_view sentence) {
  const std::string plain = StripMarkup(sentence);
  std::string cleaned;
  cleaned.reserve(plain.size());
  for (char ch : plain) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (c == '\'') continue;
    if (c >= 0x80 || std::isalnum(c)) {
      cleaned.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      cleaned.push_back(' ');
    }
  }
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    if (j > i) tokens.emplace_back(cleaned.substr(i, j - i));
    i = j;
  }
  return tokens;
}

uint64_t Fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

FeatureVector Featurize(std::span<const std::string> tokens) {
  std::map<uint32_t, double> counts;
  for (size_t i = 0; i < tokens.size(); ++i) {
    counts[HashBucket(tokens[i])] += 1.0;
    if (i + 1 < tokens.size()) counts[HashBucket(tokens[i] + "_" + tokens[i + 1])] += 1.0;
  }
  double norm = 0;
  for (const auto& [j, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  FeatureVector out;
  out.reserve(counts.size());
  for (const auto& [j, c] : counts) out.emplace_back(j, c / norm);
  return out;
}

Example MakeExample(const LabeledSentence& sentence) {
  const std::vector<std::string> tokens = Preprocess(sentence.text);
  return {Featurize(tokens), sentence.polarity == Polarity::kPositive ? 1 : 0};
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Score(const Model& model, const FeatureVector& features) {
  return DotScaled(model.weights, 1.0, features) + model.bias;
}

double Predict(const Model& model, std::string_view sentence) {
  const std::vector<std::string> tokens = Preprocess(sentence);
  const double p = Sigmoid(Score(model, Featurize(tokens)));
  return std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

double Loss(const Model& model, std::span<const Example> data, double l2) {
  double total = 0;
  for (const Example& e : data) total += LogLoss(Score(model, e.features), e.label);
  double sq = 0;
  for (double w : model.weights) sq += w * w;
  return (data.empty() ? 0.0 : total / static_cast<double>(data.size())) + 0.5 * l2 * sq;
}

std::vector<double> Gradient(const Model& model, std::span<const Example> data, double l2) {
  std::vector<double> g(model.weights.size() + 1, 0.0);
  const double inv = data.empty() ? 0.0 : 1.0 / static_cast<double>(data.size());
  for (const Example& e : data) {
    const double r = (Sigmoid(Score(model, e.features)) - e.label) * inv;
    for (const auto& [j, value] : e.features) g[j] += r * value;
    g.back() += r;
  }
  for (size_t j = 0; j < model.weights.size(); ++j) g[j] += l2 * model.weights[j];
  return g;
}

TrainResult TrainExamples(std::span<const Example> train,
                          std::span<const Example> validation, Category category,
                          const TrainOptions& options) {
  if (train.empty()) throw InvalidArgument("training split is empty");
  bool has_pos = false;
  bool has_neg = false;
  for (const Example& e : train) (e.label ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw InvalidArgument("training split has a single class");
  if (options.epochs < 0) throw InvalidArgument("epochs must be non-negative");
  if (!(options.learning_rate > 0)) throw InvalidArgument("learning rate must be positive");

  TrainResult result;
  Model& model = result.model;
  model.category = category;
  model.seed = options.seed;
  model.epochs = options.epochs;
  model.learning_rate = options.learning_rate;

  Rng rng(options.seed);
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  double lr = options.learning_rate;
  double current = Loss(model, train, options.l2);

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.Shuffle(order);
    // Weights are held as scale * v so L2 shrinkage stays O(1) per step.
    std::vector<double> v = model.weights;
    double scale = 1.0;
    double bias = model.bias;
    for (size_t i : order) {
      const Example& e = train[i];
      const double r = Sigmoid(DotScaled(v, scale, e.features) + bias) - e.label;
      scale *= 1.0 - lr * options.l2;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
      for (const auto& [j, value] : e.features) v[j] -= lr * r * value / scale;
      bias -= lr * r;
    }
    Model candidate = model;
    for (size_t j = 0; j < v.size(); ++j) candidate.weights[j] = v[j] * scale;
    candidate.bias = bias;
    const double loss = Loss(candidate, train, options.l2);

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    if (std::isfinite(loss) && loss <= current) {
      model = std::move(candidate);
      current = loss;
    } else {
      stats.accepted = false;
      lr *= 0.5;
    }
    stats.train_loss = current;
    if (!validation.empty()) stats.validation_loss = Loss(model, validation, 0.0);
    result.history.push_back(stats);
  }
  return result;
}

TrainResult Train(const CorpusSplit& split, const TrainOptions& options) {
  if (split.train.empty()) throw InvalidArgument("training split is empty");
  const std::vector<Example> train = Examples(split.train);
  const std::vector<Example> validation = Examples(split.validation);
  return TrainExamples(train, validation, split.train.front().category, options);
}

ModelMetrics EvaluateModel(const Model& model, std::span<const LabeledSentence> test,
                           double threshold) {
  ModelMetrics metrics;
  metrics.examples = test.size();
  std::vector<double> scores;
  std::vector<int> labels;
  for (const LabeledSentence& s : test) {
    const double p = Predict(model, s.text);
    const bool predicted = p >= threshold;
    const bool gold = s.polarity == Polarity::kPositive;
    scores.push_back(p);
    labels.push_back(gold ? 1 : 0);
    CategoryScores& c = metrics.scores;
    if (predicted && gold) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (gold) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  FinalizeScores(metrics.scores);
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                    std::count(labels.begin(), labels.end(), 0) > 0;
  if (both) metrics.roc_auc = RocAuc(scores, labels);
  return metrics;
}

nlohmann::json ModelMetricsToJson(const ModelMetrics& m) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  return {{"examples", m.examples},
          {"tp", m.scores.tp},
          {"fp", m.scores.fp},
          {"fn", m.scores.fn},
          {"tn", m.scores.tn},
          {"precision", opt(m.scores.precision)},
          {"recall", opt(m.scores.recall)},
          {"f1", opt(m.scores.f1)},
          {"roc_auc", opt(m.roc_auc)}};
}

void SaveModel(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kModelMagic, sizeof kModelMagic);
  WritePod<uint32_t>(out, static_cast<uint32_t>(model.category));
  WritePod<uint64_t>(out, model.seed);
  WritePod<int32_t>(out, model.epochs);
  WritePod<double>(out, model.learning_rate);
  WritePod<double>(out, model.bias);
  WritePod<uint32_t>(out, static_cast<uint32_t>(model.weights.size()));
  out.write(reinterpret_cast<const char*>(model.weights.data()),
            static_cast<std::streamsize>(model.weights.size() * sizeof(double)));
  if (!out) throw Error("write failed: " + path.string());
}

Model LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string name = path.string();
  char magic[sizeof kModelMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw ParseError(name + ": not a model file");
  }
  Model model;
  const uint32_t category = ReadPod<uint32_t>(in, name);
  if (category > static_cast<uint32_t>(Category::kClarification)) {
    throw ParseError(name + ": bad category");
  }
  model.category = static_cast<Category>(category);
  model.seed = ReadPod<uint64_t>(in, name);
  model.epochs = ReadPod<int32_t>(in, name);
  model.learning_rate = ReadPod<double>(in, name);
  model.bias = ReadPod<double>(in, name);
  const uint32_t n = ReadPod<uint32_t>(in, name);
  if (n != kHashBuckets) throw ParseError(name + ": unexpected weight count");
  model.weights.assign(n, 0.0);
  if (!in.read(reinterpret_cast<char*>(model.weights.data()),
               static_cast<std::streamsize>(n * sizeof(double)))) {
    throw ParseError(name + ": truncated model file");
  }
  if (!std::isfinite(model.bias) ||
      !std::all_of(model.weights.begin(), model.weights.end(),
                   [](double w) { return std::isfinite(w); })) {
    throw ParseError(name + ": non-finite weights");
  }
  return model;
}

}  // namespace editintent

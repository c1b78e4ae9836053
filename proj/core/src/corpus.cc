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

#include "editintent/corpus.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "editintent/random.h"
#include "text_util.h"

namespace editintent {
namespace {

int64_t CountCodePoints(std::string_view text) {
  int64_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

// Section title in effect at each line of `text`.
std::vector<std::string> SectionPerLine(std::string_view text,
                                        const std::string& lead) {
  std::vector<std::string> out;
  std::string current = NormalizeSectionTitle(lead);
  size_t pos = 0;
  while (true) {
    const size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (auto heading = ParseHeading(line)) current = NormalizeSectionTitle(*heading);
    out.push_back(current);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

const std::string& SectionAt(const std::vector<std::string>& sections, int line,
                             const std::string& fallback) {
  if (line < 0 || sections.empty()) return fallback;
  return sections[std::min<size_t>(static_cast<size_t>(line), sections.size() - 1)];
}

std::vector<Category> WantedCategories(const std::optional<Category>& only) {
  if (only) return {*only};
  return {kAllCategories.begin(), kAllCategories.end()};
}

bool IsBackMatterSection(std::string_view normalized) {
  static const std::set<std::string, std::less<>> kBackMatter = {
      "References", "Notes",  "Citations",    "Sources",        "Bibliography",
      "Footnotes",  "See_also", "External_links", "Further_reading", "Works_cited",
      "Notes_and_references"};
  return kBackMatter.count(normalized) != 0;
}

bool IsNonProseLine(std::string_view line) {
  const std::string_view t = internal::Trim(line);
  if (t.empty()) return true;
  const char c = t.front();
  if (c == '|' || c == '!' || c == '*' || c == '#' || c == ':' || c == ';') return true;
  if (t.starts_with("{|") || t.starts_with("|}") || t.starts_with("}}")) return true;
  if (internal::StartsWithIcase(t, "[[file:") || internal::StartsWithIcase(t, "[[image:") ||
      internal::StartsWithIcase(t, "[[category:")) {
    return true;
  }
  return false;
}

// Net "{{" minus "}}" count of a line.
int BraceDelta(std::string_view line) {
  int delta = 0;
  for (size_t i = 0; i + 1 < line.size(); ++i) {
    if (line[i] == '{' && line[i + 1] == '{') {
      ++delta;
      ++i;
    } else if (line[i] == '}' && line[i + 1] == '}') {
      --delta;
      ++i;
    }
  }
  return delta;
}

int64_t RequireInt(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer()) {
    throw ParseError(std::string("field '") + field + "' missing or not an integer");
  }
  return it->get<int64_t>();
}

std::string RequireString(const nlohmann::json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw ParseError(std::string("field '") + field + "' missing or not a string");
  }
  return it->get<std::string>();
}

struct PageBucket {
  int64_t page_id = 0;
  std::vector<const LabeledSentence*> pos;
  std::vector<const LabeledSentence*> neg;
};

struct SplitTargets {
  std::array<size_t, 3> pos{};
  std::array<size_t, 3> neg{};
};

SplitTargets TargetsFor(size_t k) {
  SplitTargets t;
  const std::array<size_t, 3> sizes = PartitionSizes(2 * k);
  bool extra_to_pos = true;
  for (size_t i = 0; i < 3; ++i) {
    t.pos[i] = sizes[i] / 2;
    t.neg[i] = sizes[i] / 2;
    if (sizes[i] % 2 == 1) {
      (extra_to_pos ? t.pos[i] : t.neg[i]) += 1;
      extra_to_pos = !extra_to_pos;
    }
  }
  return t;
}

// Greedy page placement. Pages arrive largest first; each goes whole to the
// split where it fills the most open slots, and records that do not fit are
// dropped. Succeeds when every slot is filled.
bool PlacePages(const std::vector<PageBucket>& pages, const SplitTargets& targets,
                std::array<std::vector<const LabeledSentence*>, 3>& out) {
  for (auto& v : out) v.clear();
  SplitTargets open = targets;
  for (const PageBucket& page : pages) {
    int best = -1;
    size_t best_fill = 0;
    size_t best_room = 0;
    for (int s = 0; s < 3; ++s) {
      const size_t fill = std::min(page.pos.size(), open.pos[s]) +
                          std::min(page.neg.size(), open.neg[s]);
      const size_t room = open.pos[s] + open.neg[s];
      if (fill > best_fill || (fill == best_fill && fill > 0 && room > best_room)) {
        best = s;
        best_fill = fill;
        best_room = room;
      }
    }
    if (best < 0) continue;
    const size_t take_pos = std::min(page.pos.size(), open.pos[best]);
    const size_t take_neg = std::min(page.neg.size(), open.neg[best]);
    out[best].insert(out[best].end(), page.pos.begin(), page.pos.begin() + take_pos);
    out[best].insert(out[best].end(), page.neg.begin(), page.neg.begin() + take_neg);
    open.pos[best] -= take_pos;
    open.neg[best] -= take_neg;
  }
  for (int s = 0; s < 3; ++s) {
    if (open.pos[s] != 0 || open.neg[s] != 0) return false;
  }
  return true;
}

}  // namespace

std::string_view PolarityName(Polarity polarity) {
  return polarity == Polarity::kPositive ? "positive" : "negative";
}

LabeledSentence MakeLabeledSentence(std::string text, Category category,
                                    Polarity polarity, int64_t page_id,
                                    int64_t rev_id, std::string section_title) {
  LabeledSentence s;
  s.char_len = CountCodePoints(text);
  s.word_len = static_cast<int64_t>(CountWords(text));
  s.text = std::move(text);
  s.category = category;
  s.polarity = polarity;
  s.page_id = page_id;
  s.rev_id = rev_id;
  s.section_title = std::move(section_title);
  return s;
}

nlohmann::json LabeledSentenceToJson(const LabeledSentence& s) {
  nlohmann::json j;
  j["text"] = s.text;
  j["category"] = std::string(CategoryName(s.category));
  j["polarity"] = std::string(PolarityName(s.polarity));
  j["page_id"] = s.page_id;
  j["rev_id"] = s.rev_id;
  j["section_title"] = s.section_title;
  j["char_len"] = s.char_len;
  j["word_len"] = s.word_len;
  return j;
}

LabeledSentence LabeledSentenceFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  LabeledSentence s;
  s.text = RequireString(j, "text");
  if (s.text.empty()) throw ParseError("field 'text' is empty");
  const std::string category = RequireString(j, "category");
  const auto parsed = ParseCategory(category);
  if (!parsed) throw ParseError("unknown category '" + category + "'");
  s.category = *parsed;
  const std::string polarity = RequireString(j, "polarity");
  if (polarity == "positive") {
    s.polarity = Polarity::kPositive;
  } else if (polarity == "negative") {
    s.polarity = Polarity::kNegative;
  } else {
    throw ParseError("unknown polarity '" + polarity + "'");
  }
  s.page_id = RequireInt(j, "page_id");
  s.rev_id = RequireInt(j, "rev_id");
  s.section_title = RequireString(j, "section_title");
  s.char_len = RequireInt(j, "char_len");
  s.word_len = RequireInt(j, "word_len");
  if (s.word_len != static_cast<int64_t>(CountWords(s.text))) {
    throw ParseError("field 'word_len' does not match text");
  }
  if (s.char_len != CountCodePoints(s.text)) {
    throw ParseError("field 'char_len' does not match text");
  }
  return s;
}

std::vector<LabeledEdit> LabelPageEdits(std::span<const Revision> page,
                                        const ExtractOptions& options,
                                        ExtractStats* stats) {
  std::vector<LabeledEdit> out;
  if (page.size() < 2) return out;
  std::unordered_map<int64_t, RevertStatus> status;
  if (options.filter_reverts) status = DetectReverts(page, options.reverts);
  for (size_t i = 1; i < page.size(); ++i) {
    const Revision& parent = page[i - 1];
    const Revision& rev = page[i];
    if (stats) ++stats->edits;
    if (options.filter_reverts &&
        ExcludedFromLabeling(status.at(rev.rev_id), options.reverts)) {
      if (stats) ++stats->excluded_reverts;
      continue;
    }
    LabeledEdit edit;
    edit.parent = &parent;
    edit.revision = &rev;
    edit.diff = DiffRevisions(parent.text, rev.text, rev.comment, parent.rev_id,
                              rev.rev_id);
    edit.verdict = LabelEdit(edit.diff, options.rules,
                             std::to_string(parent.rev_id) + ":" + std::to_string(rev.rev_id));
    out.push_back(std::move(edit));
  }
  return out;
}

std::vector<LabeledSentence> ExtractPositiveSentences(std::span<const Revision> page,
                                                      const ExtractOptions& options,
                                                      ExtractStats* stats) {
  const std::vector<LabeledEdit> edits = LabelPageEdits(page, options, stats);
  return PositivesFromEdits(edits, options, stats);
}

std::vector<LabeledSentence> PositivesFromEdits(std::span<const LabeledEdit> edits,
                                                const ExtractOptions& options,
                                                ExtractStats* stats) {
  std::vector<LabeledSentence> out;
  std::set<std::pair<Category, std::string>> seen;
  const std::vector<Category> wanted = WantedCategories(options.category);
  const std::string lead = NormalizeSectionTitle(options.lead_section);
  for (const LabeledEdit& edit : edits) {
    if (edit.verdict.positive_sentences.empty()) continue;
    const std::vector<std::string> old_sections =
        SectionPerLine(edit.parent->text, options.lead_section);
    const std::vector<std::string> new_sections =
        SectionPerLine(edit.revision->text, options.lead_section);
    for (const PositiveSentence& p : edit.verdict.positive_sentences) {
      if (std::find(wanted.begin(), wanted.end(), p.category) == wanted.end()) continue;
      std::string text = StripMarkup(p.sentence.original);
      if (text.empty()) {
        if (stats) ++stats->empty_after_strip;
        continue;
      }
      if (!seen.emplace(p.category, text).second) {
        if (stats) ++stats->duplicates;
        continue;
      }
      const LineChange& line = edit.diff.lines[p.sentence.line_ref];
      const std::string& section =
          line.old_line_number >= 0
              ? SectionAt(old_sections, line.old_line_number, lead)
              : SectionAt(new_sections, line.new_line_number, lead);
      out.push_back(MakeLabeledSentence(std::move(text), p.category,
                                        Polarity::kPositive, edit.revision->page_id,
                                        edit.revision->rev_id, section));
    }
  }
  return out;
}

std::vector<LabeledSentence> ExtractNegativeSentences(const Revision& article,
                                                      Category category,
                                                      const NegativeOptions& options) {
  if (article.quality_class != QualityClass::kFA) {
    throw InvalidArgument("revision " + std::to_string(article.rev_id) + " of page " +
                          std::to_string(article.page_id) +
                          " is not assessed as a Featured Article");
  }
  std::vector<LabeledSentence> out;
  std::unordered_set<std::string> seen;
  std::string section = NormalizeSectionTitle(options.lead_section);
  int template_depth = 0;
  bool in_table = false;
  std::string_view text = article.text;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    const size_t end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;

    const std::string_view trimmed = internal::Trim(line);
    const bool open_template = template_depth > 0;
    template_depth = std::max(0, template_depth + BraceDelta(line));
    if (trimmed.starts_with("{|")) in_table = true;
    if (in_table) {
      if (trimmed.starts_with("|}")) in_table = false;
      continue;
    }
    if (auto heading = ParseHeading(line)) {
      section = NormalizeSectionTitle(*heading);
      continue;
    }
    if (open_template || IsNonProseLine(line) || IsBackMatterSection(section)) continue;
    // A line that opens a template it does not close is template body.
    if (template_depth > 0 && trimmed.starts_with("{{")) continue;

    for (const SentenceSpan& span : SplitSentences(line)) {
      if (category == Category::kCitation && DetectCitation(span.text, options.mode)) {
        continue;
      }
      if (IsMarkupOnly(span.text)) continue;
      std::string plain = StripMarkup(span.text);
      if (plain.empty() || !seen.insert(plain).second) continue;
      out.push_back(MakeLabeledSentence(std::move(plain), category, Polarity::kNegative,
                                        article.page_id, article.rev_id, section));
    }
    if (nl == std::string_view::npos) break;
  }
  return out;
}

std::array<size_t, 3> PartitionSizes(size_t total) {
  static constexpr std::array<size_t, 3> kPercent = {70, 10, 20};
  std::array<size_t, 3> sizes{};
  std::array<size_t, 3> remainder{};
  size_t assigned = 0;
  for (size_t i = 0; i < 3; ++i) {
    sizes[i] = total * kPercent[i] / 100;
    remainder[i] = total * kPercent[i] % 100;
    assigned += sizes[i];
  }
  std::array<size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });
  for (size_t k = 0; assigned < total; ++k, ++assigned) ++sizes[order[k % 3]];
  return sizes;
}

CorpusSplit BuildSplits(std::span<const LabeledSentence> positives,
                        std::span<const LabeledSentence> negatives, uint64_t seed,
                        SplitStats* stats) {
  if (positives.empty()) throw InvalidArgument("no positive sentences");
  if (negatives.empty()) throw InvalidArgument("no negative sentences");
  const Category category = positives.front().category;
  for (const auto* side : {&positives, &negatives}) {
    for (const LabeledSentence& s : *side) {
      if (s.category != category) {
        throw InvalidArgument("corpus mixes categories " +
                              std::string(CategoryName(category)) + " and " +
                              std::string(CategoryName(s.category)));
      }
    }
  }
  for (const LabeledSentence& s : positives) {
    if (s.polarity != Polarity::kPositive) throw InvalidArgument("negative in positive input");
  }
  for (const LabeledSentence& s : negatives) {
    if (s.polarity != Polarity::kNegative) throw InvalidArgument("positive in negative input");
  }

  SplitStats local;
  std::unordered_set<std::string_view> positive_text;
  for (const LabeledSentence& s : positives) positive_text.insert(s.text);
  std::vector<const LabeledSentence*> pos;
  std::vector<const LabeledSentence*> neg;
  for (const LabeledSentence& s : positives) pos.push_back(&s);
  for (const LabeledSentence& s : negatives) {
    if (positive_text.count(s.text)) {
      ++local.conflicts_dropped;
    } else {
      neg.push_back(&s);
    }
  }
  if (neg.empty()) throw InvalidArgument("every negative conflicts with a positive");

  Rng rng(seed);
  // Uniform downsampling of the majority side.
  rng.Shuffle(pos);
  rng.Shuffle(neg);
  const size_t k = std::min(pos.size(), neg.size());
  local.downsampled += static_cast<int64_t>(pos.size() - k + neg.size() - k);
  pos.resize(k);
  neg.resize(k);

  std::map<int64_t, PageBucket> by_page;
  for (const LabeledSentence* s : pos) by_page[s->page_id].pos.push_back(s);
  for (const LabeledSentence* s : neg) by_page[s->page_id].neg.push_back(s);
  std::vector<PageBucket> pages;
  pages.reserve(by_page.size());
  for (auto& [id, bucket] : by_page) {
    bucket.page_id = id;
    pages.push_back(std::move(bucket));
  }
  rng.Shuffle(pages);
  std::stable_sort(pages.begin(), pages.end(), [](const PageBucket& a, const PageBucket& b) {
    return a.pos.size() + a.neg.size() > b.pos.size() + b.neg.size();
  });

  std::array<std::vector<const LabeledSentence*>, 3> placed;
  size_t balanced = k;
  if (!PlacePages(pages, TargetsFor(k), placed)) {
    // Largest pair count the page structure admits. lo is always feasible.
    size_t lo = 0;
    size_t hi = k;
    std::array<std::vector<const LabeledSentence*>, 3> trial;
    while (lo + 1 < hi) {
      const size_t mid = lo + (hi - lo) / 2;
      if (PlacePages(pages, TargetsFor(mid), trial)) {
        lo = mid;
        placed = trial;
      } else {
        hi = mid;
      }
    }
    if (lo == 0) throw InvalidArgument("too few pages to form page-disjoint splits");
    if (placed[0].size() + placed[1].size() + placed[2].size() != 2 * lo) {
      PlacePages(pages, TargetsFor(lo), placed);
    }
    balanced = lo;
  }
  local.downsampled += static_cast<int64_t>(2 * (k - balanced));

  CorpusSplit split;
  split.seed = seed;
  std::array<std::vector<LabeledSentence>*, 3> dest = {&split.train, &split.validation,
                                                       &split.test};
  for (size_t s = 0; s < 3; ++s) {
    rng.Shuffle(placed[s]);
    for (const LabeledSentence* r : placed[s]) dest[s]->push_back(*r);
  }
  if (stats) *stats = local;
  return split;
}

void WriteLabeledSentences(std::ostream& out, std::span<const LabeledSentence> sentences) {
  for (const LabeledSentence& s : sentences) out << LabeledSentenceToJson(s).dump() << '\n';
}

std::vector<LabeledSentence> ReadLabeledSentences(std::istream& in,
                                                  const std::string& source) {
  std::vector<LabeledSentence> out;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (internal::Trim(line).empty()) continue;
    try {
      out.push_back(LabeledSentenceFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source + ":" + std::to_string(number) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void ExportCorpus(const CorpusSplit& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const std::vector<LabeledSentence>*> parts[] = {
      {"train.jsonl", &split.train},
      {"validation.jsonl", &split.validation},
      {"test.jsonl", &split.test}};
  nlohmann::json counts = nlohmann::json::object();
  std::optional<Category> category;
  for (const auto& [name, records] : parts) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / name).string());
    WriteLabeledSentences(out, *records);
    if (!out) throw Error("write failed: " + (dir / name).string());
    counts[std::filesystem::path(name).stem().string()] = records->size();
    if (!records->empty() && !category) category = records->front().category;
  }
  nlohmann::json manifest;
  manifest["schema_version"] = kCorpusSchemaVersion;
  manifest["seed"] = split.seed;
  manifest["category"] = category ? nlohmann::json(std::string(CategoryName(*category)))
                                  : nlohmann::json(nullptr);
  manifest["counts"] = counts;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

CorpusSplit ImportCorpus(const std::filesystem::path& dir) {
  CorpusSplit split;
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream manifest_in(manifest_path, std::ios::binary);
  if (!manifest_in) throw Error("cannot open " + manifest_path.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(manifest_in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("schema_version") ||
      manifest["schema_version"] != kCorpusSchemaVersion) {
    throw ParseError(manifest_path.string() + ": unsupported schema_version");
  }
  if (!manifest.contains("seed") || !manifest["seed"].is_number_unsigned()) {
    throw ParseError(manifest_path.string() + ": field 'seed' missing or invalid");
  }
  split.seed = manifest["seed"].get<uint64_t>();
  const std::pair<const char*, std::vector<LabeledSentence>*> parts[] = {
      {"train.jsonl", &split.train},
      {"validation.jsonl", &split.validation},
      {"test.jsonl", &split.test}};
  for (const auto& [name, records] : parts) {
    const std::filesystem::path path = dir / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    *records = ReadLabeledSentences(in, path.string());
  }
  return split;
}

}  // namespace editintent

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

#include "editintent/revision_store.h"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace editintent {
namespace {

namespace fs = std::filesystem;

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}
void PutI64(std::string& out, int64_t v) {
  const auto u = static_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(u >> (8 * i)));
}
uint32_t GetU32(const char* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}
int64_t GetI64(const char* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return static_cast<int64_t>(v);
}

uint32_t Crc(std::string_view data) {
  return static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data.data()),
            static_cast<uInt>(data.size())));
}

constexpr size_t kRecordHeader = 8 + 4 + 4;

}  // namespace

RevisionStore::RevisionStore(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_ / "pages");
  const fs::path index = dir_ / "INDEX";
  if (!fs::exists(index)) {
    std::ofstream out(index, std::ios::binary);
    out << kIndexMagic << '\n';
    if (!out) throw StoreError("cannot create " + index.string());
  }
  LoadIndex();
}

void RevisionStore::LoadIndex() {
  const fs::path index = dir_ / "INDEX";
  std::ifstream in(index, std::ios::binary);
  std::string line;
  if (!std::getline(in, line) || line != kIndexMagic) {
    throw StoreError("bad store index header in " + index.string());
  }
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    int64_t page_id, rev_id;
    if (!(fields >> page_id >> rev_id)) {
      throw StoreError("corrupt index line " + std::to_string(line_no));
    }
    pages_[page_id].insert(rev_id);
    rev_to_page_[rev_id] = page_id;
  }
}

fs::path RevisionStore::PagePath(int64_t page_id) const {
  return dir_ / "pages" / (std::to_string(page_id) + ".rev");
}

bool RevisionStore::Put(const Revision& rev) {
  if (Sha1Hex(rev.text) != rev.sha1) {
    throw StoreError("sha1 mismatch for rev_id " + std::to_string(rev.rev_id));
  }
  std::unique_lock lock(mu_);
  if (rev_to_page_.count(rev.rev_id) != 0) return false;

  const std::string payload = RevisionToJson(rev).dump();
  std::string record;
  record.reserve(kRecordHeader + payload.size());
  PutI64(record, rev.rev_id);
  PutU32(record, static_cast<uint32_t>(payload.size()));
  PutU32(record, Crc(payload));
  record += payload;

  const fs::path path = PagePath(rev.page_id);
  const bool fresh = !fs::exists(path);
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (fresh) out << kPageMagic;
    out.write(record.data(), static_cast<std::streamsize>(record.size()));
    out.flush();
    if (!out) throw StoreError("write failed: " + path.string());
  }
  {
    std::ofstream index(dir_ / "INDEX", std::ios::binary | std::ios::app);
    index << rev.page_id << '\t' << rev.rev_id << '\n';
    index.flush();
    if (!index) throw StoreError("index write failed in " + dir_.string());
  }
  pages_[rev.page_id].insert(rev.rev_id);
  rev_to_page_[rev.rev_id] = rev.page_id;
  return true;
}

std::vector<Revision> RevisionStore::Scan(int64_t page_id) const {
  std::shared_lock lock(mu_);
  std::vector<Revision> out;
  const fs::path path = PagePath(page_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  if (data.compare(0, kPageMagic.size(), kPageMagic) != 0) {
    throw StoreError("bad page file header: " + path.string());
  }
  size_t pos = kPageMagic.size();
  int64_t last_rev = -1;
  while (pos < data.size()) {
    if (data.size() - pos < kRecordHeader) {
      throw StoreError("truncated record after rev_id " +
                       std::to_string(last_rev) + " in " + path.string());
    }
    const int64_t rev_id = GetI64(data.data() + pos);
    const uint32_t len = GetU32(data.data() + pos + 8);
    const uint32_t crc = GetU32(data.data() + pos + 12);
    pos += kRecordHeader;
    if (data.size() - pos < len) {
      throw StoreError("corrupt record for rev_id " + std::to_string(rev_id) +
                       ": truncated payload");
    }
    const std::string_view payload(data.data() + pos, len);
    pos += len;
    if (Crc(payload) != crc) {
      throw StoreError("corrupt record for rev_id " + std::to_string(rev_id) +
                       ": checksum mismatch");
    }
    try {
      Revision rev = RevisionFromJson(nlohmann::json::parse(payload));
      if (rev.rev_id != rev_id) throw ParseError("rev_id header mismatch");
      out.push_back(std::move(rev));
    } catch (const std::exception& e) {
      throw StoreError("corrupt record for rev_id " + std::to_string(rev_id) +
                       ": " + e.what());
    }
    last_rev = rev_id;
  }
  std::sort(out.begin(), out.end(), RevisionOrder);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Revision& a, const Revision& b) {
                          return a.rev_id == b.rev_id;
                        }),
            out.end());
  return out;
}

bool RevisionStore::Contains(int64_t rev_id) const {
  std::shared_lock lock(mu_);
  return rev_to_page_.count(rev_id) != 0;
}

std::vector<int64_t> RevisionStore::PageIds() const {
  std::shared_lock lock(mu_);
  std::vector<int64_t> ids;
  ids.reserve(pages_.size());
  for (const auto& [id, revs] : pages_) ids.push_back(id);
  return ids;
}

size_t RevisionStore::size() const {
  std::shared_lock lock(mu_);
  return rev_to_page_.size();
}

}  // namespace editintent

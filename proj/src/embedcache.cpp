// Copyright 2026 The ovdbench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ovd/embedcache.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <utility>

#include "ovd/datamodel.hpp"
#include "ovd/errors.hpp"
#include "ovd/hash.hpp"

namespace ovd {

Embedding hash_bag_embedding(std::string_view text, size_t dim) {
  Embedding e;
  e.values.assign(dim, 0.0f);
  if (dim == 0) return e;
  double norm_sq = 0.0;
  for (const std::string& token : tokenize(std::string(text))) {
    const size_t bucket = static_cast<size_t>(fnv1a64(token) % dim);
    e.values[bucket] += 1.0f;
  }
  for (float v : e.values) norm_sq += static_cast<double>(v) * v;
  if (norm_sq > 0.0) {
    const float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (float& v : e.values) v *= inv;
  }
  return e;
}

Embedding EmbeddingCache::get_or_compute(const std::string& caption,
                                         const EmbedderPort& embedder) {
  {
    std::shared_lock lock(mu_);
    auto it = entries_.find(caption);
    if (it != entries_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto it = entries_.find(caption);
  if (it != entries_.end()) return it->second;
  // Computed under the writer lock so concurrent misses collapse to a single
  // encoder call.
  Embedding e = embedder.embed(caption);
  if (cost_ != nullptr) cost_->encoder_calls += 1;
  entries_.emplace(caption, e);
  return e;
}

size_t EmbeddingCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

namespace {

constexpr char kMagic[4] = {'O', 'V', 'D', 'E'};
constexpr uint32_t kFormatVersion = 1;

void write_u32_le(std::ostream& out, uint32_t v) {
  char buf[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
  out.write(buf, 4);
}

uint32_t read_u32_le(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (!in) throw ParseError("embeddings file truncated while reading " + what);
  return static_cast<uint32_t>(buf[0]) | (static_cast<uint32_t>(buf[1]) << 8) |
         (static_cast<uint32_t>(buf[2]) << 16) |
         (static_cast<uint32_t>(buf[3]) << 24);
}

void write_f32_le(std::ostream& out, float v) {
  uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  write_u32_le(out, bits);
}

float read_f32_le(std::istream& in, const std::string& what) {
  const uint32_t bits = read_u32_le(in, what);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

void EmbeddingCache::save(const std::filesystem::path& path, size_t dim) const {
  std::shared_lock lock(mu_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embeddings file: " + path.string());
  out.write(kMagic, 4);
  write_u32_le(out, kFormatVersion);
  write_u32_le(out, static_cast<uint32_t>(dim));
  // std::map keying would also work; sort here to keep the file order stable.
  std::vector<const std::pair<const std::string, Embedding>*> sorted;
  sorted.reserve(entries_.size());
  for (const auto& kv : entries_) sorted.push_back(&kv);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  for (const auto* kv : sorted) {
    if (kv->second.dimension() != dim) {
      throw DimensionMismatchError(
          "cached embedding for \"" + kv->first + "\" has dimension " +
          std::to_string(kv->second.dimension()) + ", expected " +
          std::to_string(dim));
    }
    write_u32_le(out, static_cast<uint32_t>(kv->first.size()));
    out.write(kv->first.data(), static_cast<std::streamsize>(kv->first.size()));
    for (float v : kv->second.values) write_f32_le(out, v);
  }
}

void EmbeddingCache::load(const std::filesystem::path& path,
                          size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open embeddings file: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw ParseError("bad magic in embeddings file: " + path.string());
  }
  const uint32_t version = read_u32_le(in, "version");
  if (version != kFormatVersion) {
    throw ParseError("unsupported embeddings file version " +
                     std::to_string(version));
  }
  const uint32_t dim = read_u32_le(in, "dimension");
  if (dim != expected_dim) {
    throw DimensionMismatchError("embeddings file has dimension " +
                                 std::to_string(dim) + ", expected " +
                                 std::to_string(expected_dim));
  }
  std::unique_lock lock(mu_);
  while (true) {
    unsigned char peek[4];
    in.read(reinterpret_cast<char*>(peek), 4);
    if (in.gcount() == 0) break;
    if (in.gcount() != 4) {
      throw ParseError("embeddings file truncated in record header");
    }
    const uint32_t len = static_cast<uint32_t>(peek[0]) |
                         (static_cast<uint32_t>(peek[1]) << 8) |
                         (static_cast<uint32_t>(peek[2]) << 16) |
                         (static_cast<uint32_t>(peek[3]) << 24);
    std::string caption(len, '\0');
    in.read(caption.data(), len);
    if (!in) throw ParseError("embeddings file truncated in caption");
    Embedding e;
    e.values.resize(dim);
    for (uint32_t i = 0; i < dim; ++i) {
      e.values[i] = read_f32_le(in, "vector data");
    }
    entries_[caption] = std::move(e);
  }
}

double score_alignment(const Embedding& image_feature,
                       const Embedding& caption_embedding, CostModel* cost) {
  if (image_feature.dimension() != caption_embedding.dimension()) {
    throw DimensionMismatchError(
        "alignment of embeddings with dimensions " +
        std::to_string(image_feature.dimension()) + " and " +
        std::to_string(caption_embedding.dimension()));
  }
  if (cost != nullptr) cost->alignment_calls += 1;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < image_feature.values.size(); ++i) {
    const double a = image_feature.values[i];
    const double b = caption_embedding.values[i];
    dot += a * b;
    na += a * a;
    nb += b * b;
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace ovd

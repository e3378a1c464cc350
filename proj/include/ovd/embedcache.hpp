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

#ifndef OVDBENCH_EMBEDCACHE_HPP_
#define OVDBENCH_EMBEDCACHE_HPP_

#include <cstddef>
#include <filesystem>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ovd {

// Fixed-dimension text embedding. Unit L2 norm, except the all-zero vector
// produced for token-free text.
struct Embedding {
  std::vector<float> values;

  size_t dimension() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// Abstract cost bookkeeping: one unit of `alpha` per encoder call, one unit
// of `beta` per alignment. Counters, not wall clock.
struct CostModel {
  long encoder_calls = 0;
  long alignment_calls = 0;
  double alpha = 1.0;
  double beta = 1.0;

  double total() const {
    return alpha * static_cast<double>(encoder_calls) +
           beta * static_cast<double>(alignment_calls);
  }
};

// Deterministic text -> embedding port. Same text, same vector, always.
class EmbedderPort {
 public:
  virtual ~EmbedderPort() = default;
  virtual size_t dimension() const = 0;
  virtual Embedding embed(std::string_view text) const = 0;
};

// Token-hash bag embedding: each token is hashed to a bucket in [0, dim) and
// the bucket counts are L2-normalized.
Embedding hash_bag_embedding(std::string_view text, size_t dim);

class HashBagEmbedder : public EmbedderPort {
 public:
  explicit HashBagEmbedder(size_t dim = 256) : dim_(dim) {}
  size_t dimension() const override { return dim_; }
  Embedding embed(std::string_view text) const override {
    return hash_bag_embedding(text, dim_);
  }

 private:
  size_t dim_;
};

// Caption embedding cache. Concurrent readers, exclusive-writer insertion;
// a caption is computed at most once per process even under concurrent
// misses. encoder_calls on the attached CostModel advances only on a miss.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(CostModel* cost = nullptr) : cost_(cost) {}

  Embedding get_or_compute(const std::string& caption,
                           const EmbedderPort& embedder);

  size_t size() const;

  // embeddings.bin: magic "OVDE", u32 version, u32 dimension, then
  // length-prefixed (caption UTF-8, dimension little-endian f32) records.
  void save(const std::filesystem::path& path, size_t dim) const;
  void load(const std::filesystem::path& path, size_t expected_dim);

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, Embedding> entries_;
  CostModel* cost_;
};

// Cosine similarity; 0 when either vector has zero norm. Increments
// alignment_calls when a CostModel is supplied. Throws
// DimensionMismatchError on unequal dimensions.
double score_alignment(const Embedding& image_feature,
                       const Embedding& caption_embedding,
                       CostModel* cost = nullptr);

}  // namespace ovd

#endif  // OVDBENCH_EMBEDCACHE_HPP_

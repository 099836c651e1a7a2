/* Copyright 2026 The LGIP Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lgip/perturb.hpp"

namespace lgip {

/// Id-keyed table of fixed-dimension float vectors, kept in insertion order.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  /// Stores `values` verbatim. Throws kDimensionMismatch or kDuplicateId.
  void add(std::string id, std::span<const float> values);

  std::optional<std::span<const float>> find(std::string_view id) const;

  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

/// Largest |norm - 1| a stored vector may have before the loader rescales it.
inline constexpr double kUnitNormTolerance = 1e-6;

/// LGE1 layout (little-endian): "LGE1", u32 version, u32 dim, u64 count, then
/// per record [u16 id_len][id bytes][dim x f32].
void write_embeddings(std::ostream& out, const EmbeddingTable& table);

/// Parses LGE1 and rescales to unit norm any vector whose norm is off by more
/// than kUnitNormTolerance. Vectors already within tolerance are kept
/// bit-for-bit. Throws kBadMagic, kBadVersion, kShortRead, kZeroVector,
/// kDuplicateId.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

/// Dot product accumulated sequentially in double, clamped to [-1, 1].
double cosine(std::span<const float> u, std::span<const float> v);

/// Unclamped dot product with the same accumulation order as cosine().
double dot(std::span<const float> u, std::span<const float> v);

struct SimilarityRecord {
  std::string image_id;
  std::string caption_id;
  std::string variant_id;
  VariantKind kind = VariantKind::kOrig;
  std::optional<FlipType> flip_type;
  double score = 0.0;

  friend bool operator==(const SimilarityRecord&,
                         const SimilarityRecord&) = default;
};

/// Throws kMissingImageEmbedding / kMissingTextEmbedding with the offending id.
SimilarityRecord score_variant(const EmbeddingTable& images,
                               const EmbeddingTable& texts,
                               const VariantRecord& variant);

std::vector<SimilarityRecord> score_variants(
    const EmbeddingTable& images, const EmbeddingTable& texts,
    const std::vector<VariantRecord>& variants, unsigned threads = 1);

using ScoreSink = std::function<void(const SimilarityRecord&)>;

/// Scores a variants stream in chunks, fanning each chunk out over
/// `threads` workers. Records reach `sink` in input order.
void score_stream(const EmbeddingTable& images, const EmbeddingTable& texts,
                  VariantReader& variants, const ScoreSink& sink,
                  unsigned threads = 1, std::size_t chunk_size = 8192);

/// Score JSONL line; the score is printed with 9 significant digits.
void write_score_line(std::ostream& out, const SimilarityRecord& record);
SimilarityRecord parse_score_line(std::string_view line);

class ScoreReader {
 public:
  explicit ScoreReader(std::istream& in) : in_(in) {}

  std::optional<SimilarityRecord> next();
  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<SimilarityRecord> read_scores(std::istream& in);
std::vector<SimilarityRecord> read_scores(const std::filesystem::path& path);

}  // namespace lgip

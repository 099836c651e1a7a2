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

#include "lgip/simstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "lgip/error.hpp"
#include "lgip/io.hpp"
#include "lgip/parallel.hpp"

namespace lgip {

void EmbeddingTable::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector " + id + " has " + std::to_string(values.size()) +
                    " components, table dim is " + std::to_string(dim_));
  }
  const auto [it, inserted] = index_.emplace(id, ids_.size());
  if (!inserted) throw Error(ErrorCode::kDuplicateId, "duplicate id " + id);
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return vector(it->second);
}

// ---------------------------------------------------------------------------
// LGE1

namespace {

constexpr char kMagic[4] = {'L', 'G', 'E', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xFF);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

class LeReader {
 public:
  explicit LeReader(std::istream& in) : in_(in) {}

  void read(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error(ErrorCode::kShortRead, std::string("truncated while reading ") + what);
    }
  }

  template <typename T>
  T get(const char* what) {
    unsigned char bytes[sizeof(T)];
    read(reinterpret_cast<char*>(bytes), sizeof(T), what);
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) {
      u = static_cast<std::make_unsigned_t<T>>((u << 8) | bytes[i]);
    }
    return static_cast<T>(u);
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_embeddings(std::ostream& out, const EmbeddingTable& table) {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kEmbeddingFormatVersion);
  put_le<std::uint32_t>(out, table.dim());
  put_le<std::uint64_t>(out, table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& id = table.id(i);
    if (id.size() > UINT16_MAX) {
      throw Error(ErrorCode::kMalformedRecord, "id longer than 65535 bytes");
    }
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (const float f : table.vector(i)) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
  }
}

EmbeddingTable read_embeddings(std::istream& in) {
  LeReader r(in);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an LGE1 embedding file");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::kBadVersion,
                "unsupported LGE1 version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>("dim");
  const auto count = r.get<std::uint64_t>("count");
  if (dim == 0 && count > 0) {
    throw Error(ErrorCode::kDimensionMismatch, "zero-dimensional vectors");
  }

  EmbeddingTable table(dim);
  std::vector<float> values(dim);
  std::string id;
  for (std::uint64_t k = 0; k < count; ++k) {
    const auto id_len = r.get<std::uint16_t>("id length");
    id.resize(id_len);
    r.read(id.data(), id_len, "id");
    double norm2 = 0.0;
    for (auto& v : values) {
      v = std::bit_cast<float>(r.get<std::uint32_t>("vector"));
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kMalformedRecord, "non-finite component in " + id);
      }
      norm2 += static_cast<double>(v) * static_cast<double>(v);
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw Error(ErrorCode::kZeroVector, "zero vector " + id);
    if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      for (auto& v : values) v = static_cast<float>(static_cast<double>(v) / norm);
    }
    table.add(id, values);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kMalformedRecord, "trailing bytes after last record");
  }
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path, true);
  try {
    return read_embeddings(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scoring

double dot(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cannot compare vectors of dim " + std::to_string(u.size()) +
                    " and " + std::to_string(v.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

double cosine(std::span<const float> u, std::span<const float> v) {
  return std::clamp(dot(u, v), -1.0, 1.0);
}

SimilarityRecord score_variant(const EmbeddingTable& images,
                               const EmbeddingTable& texts,
                               const VariantRecord& variant) {
  const auto image = images.find(variant.image_id);
  if (!image) {
    throw Error(ErrorCode::kMissingImageEmbedding, variant.image_id);
  }
  const auto text_id = variant.text_embedding_id();
  const auto text = texts.find(text_id);
  if (!text) throw Error(ErrorCode::kMissingTextEmbedding, text_id);
  return {variant.image_id, variant.caption_id, variant.variant_id,
          variant.kind,     variant.flip_type,  cosine(*image, *text)};
}

std::vector<SimilarityRecord> score_variants(const EmbeddingTable& images,
                                             const EmbeddingTable& texts,
                                             const std::vector<VariantRecord>& variants,
                                             unsigned threads) {
  std::vector<SimilarityRecord> out(variants.size());
  parallel_for(variants.size(), threads, [&](std::size_t i) {
    out[i] = score_variant(images, texts, variants[i]);
  });
  return out;
}

void score_stream(const EmbeddingTable& images, const EmbeddingTable& texts,
                  VariantReader& variants, const ScoreSink& sink,
                  unsigned threads, std::size_t chunk_size) {
  std::vector<VariantRecord> chunk;
  chunk.reserve(chunk_size);
  bool more = true;
  while (more) {
    chunk.clear();
    while (chunk.size() < chunk_size) {
      auto r = variants.next();
      if (!r) {
        more = false;
        break;
      }
      chunk.push_back(std::move(*r));
    }
    for (const auto& s : score_variants(images, texts, chunk, threads)) sink(s);
  }
}

// ---------------------------------------------------------------------------
// Score JSONL

void write_score_line(std::ostream& out, const SimilarityRecord& r) {
  out << "{\"image_id\":" << json_quote(r.image_id)
      << ",\"caption_id\":" << json_quote(r.caption_id)
      << ",\"variant_id\":" << json_quote(r.variant_id)
      << ",\"kind\":\"" << variant_kind_name(r.kind) << "\",\"flip_type\":";
  if (r.flip_type) {
    out << '"' << flip_type_name(*r.flip_type) << '"';
  } else {
    out << "null";
  }
  out << ",\"score\":" << format_g(r.score, 9) << "}\n";
}

SimilarityRecord parse_score_line(std::string_view line) {
  SimilarityRecord r;
  try {
    const auto obj = nlohmann::json::parse(line);
    r.image_id = obj.at("image_id").get<std::string>();
    r.caption_id = obj.at("caption_id").get<std::string>();
    r.variant_id = obj.at("variant_id").get<std::string>();
    const auto kind = parse_variant_kind(obj.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kMalformedRecord, "unknown kind");
    r.kind = *kind;
    const auto& ft = obj.at("flip_type");
    if (!ft.is_null()) {
      const auto type = parse_flip_type(ft.get<std::string>());
      if (!type) throw Error(ErrorCode::kMalformedRecord, "unknown flip_type");
      r.flip_type = *type;
    }
    const auto& score = obj.at("score");
    if (!score.is_number()) {
      throw Error(ErrorCode::kMalformedRecord, "score must be a number");
    }
    r.score = score.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
  if ((r.kind == VariantKind::kFlip) != r.flip_type.has_value()) {
    throw Error(ErrorCode::kMalformedRecord,
                "flip_type must be set exactly when kind is \"flip\"");
  }
  if (!(r.score >= -1.0 - 1e-9 && r.score <= 1.0 + 1e-9)) {
    throw Error(ErrorCode::kMalformedRecord, "score outside [-1, 1]");
  }
  return r;
}

std::optional<SimilarityRecord> ScoreReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return parse_score_line(line);
    } catch (const Error& e) {
      throw Error(e.code(), "scores line " + std::to_string(line_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<SimilarityRecord> read_scores(std::istream& in) {
  ScoreReader reader(in);
  std::vector<SimilarityRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<SimilarityRecord> read_scores(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_scores(in);
}

}  // namespace lgip

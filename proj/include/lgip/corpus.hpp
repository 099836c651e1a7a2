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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace lgip {

/// One human caption attached to an image. Ids are opaque strings even when
/// the annotation file stores them as integers.
struct Caption {
  std::string image_id;
  std::string caption_id;
  std::string text;

  friend bool operator==(const Caption&, const Caption&) = default;
};

struct CorpusConfig {
  std::size_t sample_size = 40000;
  std::size_t captions_per_image = 5;
  std::uint64_t seed = 0;
  std::size_t min_caption_chars = 10;

  /// Throws Error(kInvalidConfig) if sample_size or captions_per_image is 0.
  void validate() const;
};

/// Orders captions by (image_id, caption_id) using the canonical id order.
bool caption_less(const Caption& a, const Caption& b);

/// Parses a COCO captions document ("annotations": [{image_id, id, caption}]).
/// Captions are whitespace-trimmed and returned in canonical order.
std::vector<Caption> parse_coco_captions(std::istream& in);
std::vector<Caption> load_coco_captions(const std::filesystem::path& path);

/// Seeded Fisher-Yates over the bytewise-sorted distinct image ids; the first
/// sample_size ids are kept. Each kept image contributes its first
/// captions_per_image captions (input order), minus those shorter than
/// min_caption_chars code points. Output is in canonical order.
std::vector<Caption> sample_corpus(const std::vector<Caption>& captions,
                                   const CorpusConfig& config);

/// Canonical corpus JSONL: {"image_id","caption_id","text"} per line.
void write_corpus_jsonl(std::ostream& out, const std::vector<Caption>& captions);
std::vector<Caption> read_corpus_jsonl(std::istream& in);
std::vector<Caption> read_corpus_jsonl(const std::filesystem::path& path);

}  // namespace lgip

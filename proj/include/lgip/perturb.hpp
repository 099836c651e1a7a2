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

#include <array>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "lgip/corpus.hpp"

namespace lgip {

enum class FlipType { kObject, kColor, kCount };

inline constexpr std::array<FlipType, 3> kFlipTypes = {
    FlipType::kObject, FlipType::kColor, FlipType::kCount};

/// "obj" | "col" | "num".
std::string_view flip_type_name(FlipType type);
std::optional<FlipType> parse_flip_type(std::string_view name);

enum class VariantKind { kOrig, kPara, kFlip };

/// "orig" | "para" | "flip".
std::string_view variant_kind_name(VariantKind kind);
std::optional<VariantKind> parse_variant_kind(std::string_view name);

struct VariantRecord {
  std::string image_id;
  std::string caption_id;
  std::string variant_id;
  VariantKind kind = VariantKind::kOrig;
  std::optional<FlipType> flip_type;  // engaged iff kind == kFlip
  std::string text;

  /// Key under which the text embedding is stored:
  /// "image_id/caption_id/variant_id".
  std::string text_embedding_id() const;

  friend bool operator==(const VariantRecord&, const VariantRecord&) = default;
};

struct ObjectEntry {
  std::string singular;
  std::string plural;  // empty when the noun has no plural form

  friend bool operator==(const ObjectEntry&, const ObjectEntry&) = default;
};

/// Substitution lists for object, color and count flips. Surface forms are
/// lowercase ASCII words; no form may appear in two lists.
struct FlipVocabulary {
  std::vector<ObjectEntry> objects;
  std::vector<std::string> colors;
  std::vector<std::string> numbers;

  /// Throws Error(kInvalidVocab) on duplicate or cross-list forms, forms with
  /// characters outside [a-z0-9], or any list with fewer than two entries.
  void validate() const;

  /// Size of the list backing `type`.
  std::size_t list_size(FlipType type) const;

  friend bool operator==(const FlipVocabulary&, const FlipVocabulary&) = default;
};

/// The shipped default: 40 COCO nouns, 12 colors, number words one..ten.
FlipVocabulary default_vocabulary();
FlipVocabulary parse_vocabulary(std::istream& in);
FlipVocabulary load_vocabulary(const std::filesystem::path& path);
std::string vocabulary_to_json(const FlipVocabulary& vocab);

inline constexpr std::string_view kPlaceholder = "{}";

struct PerturbConfig {
  std::size_t k_same = 6;
  std::size_t k_diff = 6;
  std::vector<std::string> templates;
  std::size_t min_chars = 10;

  /// Throws Error(kInvalidConfig) unless every template holds exactly one
  /// placeholder.
  void validate() const;
};

/// "a photo of {}", "this image shows {}", "in this picture, {}",
/// "in the scene, {}", "a picture of {}", "there is {}".
std::vector<std::string> default_templates();
PerturbConfig default_perturb_config();

/// Templates file: a JSON array of strings.
std::vector<std::string> load_templates(const std::filesystem::path& path);

/// SHA-256 over a canonical JSON rendering of (config, vocab).
std::string perturb_config_digest(const PerturbConfig& config,
                                  const FlipVocabulary& vocab);

/// Strips one trailing '.' and lowercases the first character.
std::string normalize_caption_body(std::string_view text);
std::string apply_template(std::string_view tmpl, std::string_view body);

/// If `text` is an expansion of one of `templates`, returns the enclosed body.
/// When several templates match, `preferred` wins if it is among the
/// candidates; otherwise the first matching template in list order does.
std::optional<std::string> strip_template(
    std::string_view text, const std::vector<std::string>& templates,
    std::string_view preferred = {});

std::vector<VariantRecord> gen_paraphrases(const Caption& caption,
                                           const PerturbConfig& config);

std::vector<VariantRecord> gen_flips(const Caption& caption,
                                     const FlipVocabulary& vocab,
                                     const PerturbConfig& config);

/// Orig, then paraphrases, then flips for one caption.
std::vector<VariantRecord> perturb_caption(const Caption& caption,
                                           const FlipVocabulary& vocab,
                                           const PerturbConfig& config);

using VariantSink = std::function<void(const VariantRecord&)>;

/// Emits variants for every caption in canonical (image_id, caption_id)
/// order. Captions are processed in parallel blocks on `threads` workers;
/// emission order does not depend on the worker count.
void perturb_corpus(const std::vector<Caption>& captions,
                    const FlipVocabulary& vocab, const PerturbConfig& config,
                    const VariantSink& sink, unsigned threads = 1);

std::vector<VariantRecord> perturb_corpus(const std::vector<Caption>& captions,
                                          const FlipVocabulary& vocab,
                                          const PerturbConfig& config,
                                          unsigned threads = 1);

/// Numeric suffix of "para-3" / "flip-0"; 0 for "orig".
std::size_t variant_ordinal(std::string_view variant_id);

void write_variant_line(std::ostream& out, const VariantRecord& record);
VariantRecord parse_variant_line(std::string_view line);

/// Incremental reader over a variants JSONL stream.
class VariantReader {
 public:
  explicit VariantReader(std::istream& in) : in_(in) {}

  std::optional<VariantRecord> next();
  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<VariantRecord> read_variants(std::istream& in);
std::vector<VariantRecord> read_variants(const std::filesystem::path& path);

}  // namespace lgip

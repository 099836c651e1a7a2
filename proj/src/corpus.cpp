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

#include "lgip/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "lgip/error.hpp"
#include "lgip/ids.hpp"
#include "lgip/io.hpp"
#include "lgip/rng.hpp"

namespace lgip {

using nlohmann::json;

void CorpusConfig::validate() const {
  if (sample_size < 1) {
    throw Error(ErrorCode::kInvalidConfig, "sample_size must be >= 1");
  }
  if (captions_per_image < 1) {
    throw Error(ErrorCode::kInvalidConfig, "captions_per_image must be >= 1");
  }
}

bool caption_less(const Caption& a, const Caption& b) {
  if (const int c = compare_ids(a.image_id, b.image_id); c != 0) return c < 0;
  return compare_ids(a.caption_id, b.caption_id) < 0;
}

namespace {

std::string id_string(const json& entry, const char* key, std::size_t index) {
  const auto it = entry.find(key);
  if (it == entry.end()) {
    throw Error(ErrorCode::kMalformedAnnotation,
                "annotation " + std::to_string(index) + " lacks \"" + key + "\"");
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  throw Error(ErrorCode::kMalformedAnnotation,
              "annotation " + std::to_string(index) + ": \"" + key +
                  "\" must be an integer or string");
}

}  // namespace

std::vector<Caption> parse_coco_captions(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedAnnotation, e.what());
  }
  if (!doc.is_object() || !doc.contains("annotations") ||
      !doc["annotations"].is_array()) {
    throw Error(ErrorCode::kMalformedAnnotation,
                "top-level \"annotations\" array missing");
  }

  std::vector<Caption> captions;
  const auto& annotations = doc["annotations"];
  captions.reserve(annotations.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& entry = annotations[i];
    if (!entry.is_object()) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  "annotation " + std::to_string(i) + " is not an object");
    }
    Caption c;
    c.image_id = id_string(entry, "image_id", i);
    c.caption_id = id_string(entry, "id", i);
    const auto text = entry.find("caption");
    if (text == entry.end() || !text->is_string()) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  "annotation " + std::to_string(i) + ": \"caption\" must be a string");
    }
    c.text = trim(text->get_ref<const std::string&>());
    if (c.text.empty()) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  "annotation " + std::to_string(i) + " has an empty caption");
    }
    captions.push_back(std::move(c));
  }

  std::sort(captions.begin(), captions.end(), caption_less);
  for (std::size_t i = 1; i < captions.size(); ++i) {
    if (captions[i - 1].image_id == captions[i].image_id &&
        captions[i - 1].caption_id == captions[i].caption_id) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  "duplicate caption " + captions[i].image_id + "/" +
                      captions[i].caption_id);
    }
  }
  return captions;
}

std::vector<Caption> load_coco_captions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_coco_captions(in);
}

std::vector<Caption> sample_corpus(const std::vector<Caption>& captions,
                                   const CorpusConfig& config) {
  config.validate();

  std::vector<std::string> image_ids;
  {
    std::set<std::string> distinct;
    for (const auto& c : captions) distinct.insert(c.image_id);
    image_ids.assign(distinct.begin(), distinct.end());  // bytewise order
  }

  SplitMix64 rng = keyed_generator(config.seed, "corpus-sample");
  for (std::size_t i = image_ids.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(image_ids[i - 1], image_ids[j]);
  }
  const std::size_t take = std::min(config.sample_size, image_ids.size());
  const std::unordered_set<std::string> chosen(image_ids.begin(),
                                               image_ids.begin() + take);

  std::map<std::string, std::size_t> kept_per_image;
  std::vector<Caption> out;
  for (const auto& c : captions) {
    if (!chosen.count(c.image_id)) continue;
    auto& kept = kept_per_image[c.image_id];
    if (kept >= config.captions_per_image) continue;
    ++kept;
    if (utf8_length(c.text) < config.min_caption_chars) continue;
    out.push_back(c);
  }
  std::stable_sort(out.begin(), out.end(), caption_less);
  return out;
}

void write_corpus_jsonl(std::ostream& out, const std::vector<Caption>& captions) {
  for (const auto& c : captions) {
    out << "{\"image_id\":" << json_quote(c.image_id)
        << ",\"caption_id\":" << json_quote(c.caption_id)
        << ",\"text\":" << json_quote(c.text) << "}\n";
  }
}

std::vector<Caption> read_corpus_jsonl(std::istream& in) {
  std::vector<Caption> captions;
  for_each_line(in, [&](std::string_view line, std::size_t number) {
    try {
      const auto obj = json::parse(line);
      Caption c{obj.at("image_id").get<std::string>(),
                obj.at("caption_id").get<std::string>(),
                obj.at("text").get<std::string>()};
      if (trim(c.text).empty()) {
        throw Error(ErrorCode::kMalformedRecord, "empty caption text");
      }
      captions.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  "corpus line " + std::to_string(number) + ": " + e.what());
    }
  });
  for (std::size_t i = 1; i < captions.size(); ++i) {
    if (!caption_less(captions[i - 1], captions[i])) {
      throw Error(ErrorCode::kUnsortedRecords,
                  "corpus line " + std::to_string(i + 1) +
                      " is out of (image_id, caption_id) order");
    }
  }
  return captions;
}

std::vector<Caption> read_corpus_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_corpus_jsonl(in);
}

}  // namespace lgip

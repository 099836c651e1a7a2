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

#include "lgip/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "lgip/error.hpp"
#include "lgip/io.hpp"
#include "lgip/parallel.hpp"

namespace lgip {

using nlohmann::json;

std::string_view flip_type_name(FlipType type) {
  switch (type) {
    case FlipType::kObject: return "obj";
    case FlipType::kColor: return "col";
    case FlipType::kCount: return "num";
  }
  return "?";
}

std::optional<FlipType> parse_flip_type(std::string_view name) {
  for (const auto t : kFlipTypes) {
    if (flip_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view variant_kind_name(VariantKind kind) {
  switch (kind) {
    case VariantKind::kOrig: return "orig";
    case VariantKind::kPara: return "para";
    case VariantKind::kFlip: return "flip";
  }
  return "?";
}

std::optional<VariantKind> parse_variant_kind(std::string_view name) {
  for (const auto k : {VariantKind::kOrig, VariantKind::kPara, VariantKind::kFlip}) {
    if (variant_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string VariantRecord::text_embedding_id() const {
  return image_id + "/" + caption_id + "/" + variant_id;
}

// ---------------------------------------------------------------------------
// Vocabulary

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_vocab_form(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
}

}  // namespace

std::size_t FlipVocabulary::list_size(FlipType type) const {
  switch (type) {
    case FlipType::kObject: return objects.size();
    case FlipType::kColor: return colors.size();
    case FlipType::kCount: return numbers.size();
  }
  return 0;
}

void FlipVocabulary::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidVocab, msg);
  };
  if (objects.size() < 2) fail("objects list needs at least 2 entries");
  if (colors.size() < 2) fail("colors list needs at least 2 entries");
  if (numbers.size() < 2) fail("numbers list needs at least 2 entries");

  std::map<std::string, std::string> owner;  // form -> list that claimed it
  auto claim = [&](const std::string& form, const std::string& list) {
    if (!is_vocab_form(form)) {
      fail("entry \"" + form + "\" in " + list +
           " must be a lowercase word of [a-z0-9]");
    }
    const auto [it, inserted] = owner.emplace(form, list);
    if (!inserted) {
      fail("entry \"" + form + "\" appears in both " + it->second + " and " + list);
    }
  };
  for (const auto& o : objects) {
    claim(o.singular, "objects");
    if (!o.plural.empty() && o.plural != o.singular) claim(o.plural, "objects");
  }
  for (const auto& c : colors) claim(c, "colors");
  for (const auto& n : numbers) claim(n, "numbers");
}

FlipVocabulary default_vocabulary() {
  FlipVocabulary v;
  v.objects = {
      {"dog", "dogs"},           {"person", "people"},
      {"cat", "cats"},           {"horse", "horses"},
      {"train", "trains"},       {"car", "cars"},
      {"bus", "buses"},          {"truck", "trucks"},
      {"bicycle", "bicycles"},   {"motorcycle", "motorcycles"},
      {"airplane", "airplanes"}, {"boat", "boats"},
      {"bird", "birds"},         {"cow", "cows"},
      {"elephant", "elephants"}, {"bear", "bears"},
      {"zebra", "zebras"},       {"giraffe", "giraffes"},
      {"umbrella", "umbrellas"}, {"bench", "benches"},
      {"chair", "chairs"},       {"couch", "couches"},
      {"bed", "beds"},           {"table", "tables"},
      {"laptop", "laptops"},     {"computer", "computers"},
      {"phone", "phones"},       {"clock", "clocks"},
      {"vase", "vases"},         {"bowl", "bowls"},
      {"cup", "cups"},           {"bottle", "bottles"},
      {"pizza", "pizzas"},       {"sandwich", "sandwiches"},
      {"banana", "bananas"},     {"cake", "cakes"},
      {"kite", "kites"},         {"skateboard", "skateboards"},
      {"surfboard", "surfboards"}, {"toilet", "toilets"},
  };
  v.colors = {"black", "white", "red",    "green", "blue",   "brown",
              "yellow", "orange", "pink", "purple", "gray", "silver"};
  v.numbers = {"one", "two",   "three", "four", "five",
               "six", "seven", "eight", "nine", "ten"};
  return v;
}

FlipVocabulary parse_vocabulary(std::istream& in) {
  FlipVocabulary v;
  try {
    const auto doc = json::parse(in);
    for (const auto& o : doc.at("objects")) {
      ObjectEntry e;
      e.singular = o.at("singular").get<std::string>();
      if (const auto p = o.find("plural"); p != o.end() && !p->is_null()) {
        e.plural = p->get<std::string>();
      }
      v.objects.push_back(std::move(e));
    }
    v.colors = doc.at("colors").get<std::vector<std::string>>();
    v.numbers = doc.at("numbers").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidVocab, e.what());
  }
  v.validate();
  return v;
}

FlipVocabulary load_vocabulary(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_vocabulary(in);
}

namespace {

nlohmann::ordered_json vocab_json(const FlipVocabulary& vocab) {
  nlohmann::ordered_json doc;
  doc["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : vocab.objects) {
    nlohmann::ordered_json e;
    e["singular"] = o.singular;
    e["plural"] = o.plural.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(o.plural);
    doc["objects"].push_back(std::move(e));
  }
  doc["colors"] = vocab.colors;
  doc["numbers"] = vocab.numbers;
  return doc;
}

}  // namespace

std::string vocabulary_to_json(const FlipVocabulary& vocab) {
  return vocab_json(vocab).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Configuration

void PerturbConfig::validate() const {
  if (templates.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one template is required");
  }
  for (const auto& t : templates) {
    const auto first = t.find(kPlaceholder);
    if (first == std::string::npos ||
        t.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "template \"" + t + "\" must contain exactly one {}");
    }
  }
}

std::vector<std::string> default_templates() {
  return {"a photo of {}",    "this image shows {}", "in this picture, {}",
          "in the scene, {}", "a picture of {}",     "there is {}"};
}

PerturbConfig default_perturb_config() {
  PerturbConfig c;
  c.templates = default_templates();
  return c;
}

std::vector<std::string> load_templates(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in).get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                "templates file " + path.string() + ": " + e.what());
  }
}

std::string perturb_config_digest(const PerturbConfig& config,
                                  const FlipVocabulary& vocab) {
  nlohmann::ordered_json doc;
  doc["k_same"] = config.k_same;
  doc["k_diff"] = config.k_diff;
  doc["min_chars"] = config.min_chars;
  doc["templates"] = config.templates;
  doc["vocab"] = vocab_json(vocab);
  return sha256_hex(doc.dump());
}

// ---------------------------------------------------------------------------
// Paraphrases

std::string normalize_caption_body(std::string_view text) {
  std::string body(text);
  if (!body.empty() && body.back() == '.') body.pop_back();
  if (!body.empty() && body[0] >= 'A' && body[0] <= 'Z') {
    body[0] = static_cast<char>(body[0] - 'A' + 'a');
  }
  return body;
}

std::string apply_template(std::string_view tmpl, std::string_view body) {
  const auto at = tmpl.find(kPlaceholder);
  std::string out(tmpl.substr(0, at));
  out += body;
  out += tmpl.substr(at + kPlaceholder.size());
  return out;
}

std::optional<std::string> strip_template(
    std::string_view text, const std::vector<std::string>& templates,
    std::string_view preferred) {
  std::optional<std::string> first;
  for (const auto& t : templates) {
    const auto at = t.find(kPlaceholder);
    if (at == std::string::npos) continue;
    const std::string_view prefix = std::string_view(t).substr(0, at);
    const std::string_view suffix = std::string_view(t).substr(at + kPlaceholder.size());
    if (text.size() < prefix.size() + suffix.size()) continue;
    if (!text.starts_with(prefix) || !text.ends_with(suffix)) continue;
    std::string body(text.substr(prefix.size(),
                                 text.size() - prefix.size() - suffix.size()));
    if (!preferred.empty() && body == preferred) return body;
    if (!first) first = std::move(body);
  }
  return first;
}

std::vector<VariantRecord> gen_paraphrases(const Caption& caption,
                                           const PerturbConfig& config) {
  std::vector<VariantRecord> out;
  if (config.k_same == 0) return out;
  const std::string body = normalize_caption_body(caption.text);
  std::unordered_set<std::string> seen;
  for (const auto& t : config.templates) {
    std::string text = apply_template(t, body);
    if (utf8_length(text) < config.min_chars) continue;
    if (!seen.insert(text).second) continue;
    VariantRecord r;
    r.image_id = caption.image_id;
    r.caption_id = caption.caption_id;
    r.variant_id = "para-" + std::to_string(out.size());
    r.kind = VariantKind::kPara;
    r.text = std::move(text);
    out.push_back(std::move(r));
    if (out.size() == config.k_same) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flips

namespace {

struct VocabMatch {
  FlipType type;
  std::size_t begin;
  std::size_t end;
  std::size_t entry;
  bool plural;
};

struct VocabIndex {
  struct Hit {
    FlipType type;
    std::size_t entry;
    bool plural;
  };
  std::unordered_map<std::string, Hit> forms;

  explicit VocabIndex(const FlipVocabulary& v) {
    for (std::size_t i = 0; i < v.objects.size(); ++i) {
      forms.try_emplace(v.objects[i].singular, Hit{FlipType::kObject, i, false});
      if (!v.objects[i].plural.empty()) {
        forms.try_emplace(v.objects[i].plural, Hit{FlipType::kObject, i, true});
      }
    }
    for (std::size_t i = 0; i < v.colors.size(); ++i) {
      forms.try_emplace(v.colors[i], Hit{FlipType::kColor, i, false});
    }
    for (std::size_t i = 0; i < v.numbers.size(); ++i) {
      forms.try_emplace(v.numbers[i], Hit{FlipType::kCount, i, false});
    }
  }
};

// Maximal runs of ASCII letters/digits, compared case-insensitively.
std::vector<VocabMatch> find_matches(std::string_view text, const VocabIndex& index) {
  std::vector<VocabMatch> matches;
  std::size_t i = 0;
  std::string lowered;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    lowered.clear();
    while (j < text.size() && is_word_char(text[j])) {
      lowered.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[j]))));
      ++j;
    }
    if (const auto it = index.forms.find(lowered); it != index.forms.end()) {
      matches.push_back({it->second.type, i, j, it->second.entry, it->second.plural});
    }
    i = j;
  }
  return matches;
}

std::string_view replacement_form(const FlipVocabulary& vocab, FlipType type,
                                  std::size_t entry, bool plural) {
  switch (type) {
    case FlipType::kObject:
      return plural ? std::string_view(vocab.objects[entry].plural)
                    : std::string_view(vocab.objects[entry].singular);
    case FlipType::kColor: return vocab.colors[entry];
    case FlipType::kCount: return vocab.numbers[entry];
  }
  return {};
}

}  // namespace

std::vector<VariantRecord> gen_flips(const Caption& caption,
                                     const FlipVocabulary& vocab,
                                     const PerturbConfig& config) {
  std::vector<VariantRecord> out;
  if (config.k_diff == 0) return out;

  const VocabIndex index(vocab);
  const auto matches = find_matches(caption.text, index);

  // Candidate texts per type, already filtered and deduplicated.
  std::array<std::vector<std::string>, 3> per_type;
  std::unordered_set<std::string> seen;
  for (const auto type : kFlipTypes) {
    auto& bucket = per_type[static_cast<std::size_t>(type)];
    const std::size_t n = vocab.list_size(type);
    for (const auto& m : matches) {
      if (m.type != type) continue;
      for (std::size_t step = 1; step < n; ++step) {
        const std::size_t entry = (m.entry + step) % n;
        const auto form = replacement_form(vocab, type, entry, m.plural);
        if (form.empty()) continue;  // no plural form for a plural match
        std::string text = caption.text.substr(0, m.begin);
        text += form;
        text += std::string_view(caption.text).substr(m.end);
        if (text == caption.text) continue;
        if (!seen.insert(text).second) continue;
        bucket.push_back(std::move(text));
      }
    }
  }

  std::array<std::size_t, 3> cursor{};
  bool progressed = true;
  while (out.size() < config.k_diff && progressed) {
    progressed = false;
    for (const auto type : kFlipTypes) {
      if (out.size() == config.k_diff) break;
      const auto t = static_cast<std::size_t>(type);
      if (cursor[t] == per_type[t].size()) continue;
      VariantRecord r;
      r.image_id = caption.image_id;
      r.caption_id = caption.caption_id;
      r.variant_id = "flip-" + std::to_string(out.size());
      r.kind = VariantKind::kFlip;
      r.flip_type = type;
      r.text = std::move(per_type[t][cursor[t]++]);
      out.push_back(std::move(r));
      progressed = true;
    }
  }
  return out;
}

std::vector<VariantRecord> perturb_caption(const Caption& caption,
                                           const FlipVocabulary& vocab,
                                           const PerturbConfig& config) {
  std::vector<VariantRecord> out;
  VariantRecord orig;
  orig.image_id = caption.image_id;
  orig.caption_id = caption.caption_id;
  orig.variant_id = "orig";
  orig.kind = VariantKind::kOrig;
  orig.text = caption.text;
  out.push_back(std::move(orig));
  for (auto& r : gen_paraphrases(caption, config)) out.push_back(std::move(r));
  for (auto& r : gen_flips(caption, vocab, config)) out.push_back(std::move(r));
  return out;
}

void perturb_corpus(const std::vector<Caption>& captions,
                    const FlipVocabulary& vocab, const PerturbConfig& config,
                    const VariantSink& sink, unsigned threads) {
  vocab.validate();
  config.validate();

  std::vector<std::size_t> order(captions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return caption_less(captions[a], captions[b]);
  });

  constexpr std::size_t kBatch = 4096;
  std::vector<std::vector<VariantRecord>> batch;
  for (std::size_t start = 0; start < order.size(); start += kBatch) {
    const std::size_t n = std::min(kBatch, order.size() - start);
    batch.assign(n, {});
    parallel_for(n, threads, [&](std::size_t i) {
      batch[i] = perturb_caption(captions[order[start + i]], vocab, config);
    });
    for (const auto& records : batch) {
      for (const auto& r : records) sink(r);
    }
  }
}

std::vector<VariantRecord> perturb_corpus(const std::vector<Caption>& captions,
                                          const FlipVocabulary& vocab,
                                          const PerturbConfig& config,
                                          unsigned threads) {
  std::vector<VariantRecord> out;
  perturb_corpus(
      captions, vocab, config, [&](const VariantRecord& r) { out.push_back(r); },
      threads);
  return out;
}

// ---------------------------------------------------------------------------
// Variants JSONL

std::size_t variant_ordinal(std::string_view variant_id) {
  const auto dash = variant_id.rfind('-');
  if (dash == std::string_view::npos) return 0;
  std::size_t n = 0;
  for (const char c : variant_id.substr(dash + 1)) {
    if (c < '0' || c > '9') return 0;
    n = n * 10 + static_cast<std::size_t>(c - '0');
  }
  return n;
}

void write_variant_line(std::ostream& out, const VariantRecord& r) {
  out << "{\"image_id\":" << json_quote(r.image_id)
      << ",\"caption_id\":" << json_quote(r.caption_id)
      << ",\"variant_id\":" << json_quote(r.variant_id)
      << ",\"kind\":\"" << variant_kind_name(r.kind) << "\",\"flip_type\":";
  if (r.flip_type) {
    out << '"' << flip_type_name(*r.flip_type) << '"';
  } else {
    out << "null";
  }
  out << ",\"text\":" << json_quote(r.text) << "}\n";
}

VariantRecord parse_variant_line(std::string_view line) {
  VariantRecord r;
  try {
    const auto obj = json::parse(line);
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
    r.text = obj.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
  if ((r.kind == VariantKind::kFlip) != r.flip_type.has_value()) {
    throw Error(ErrorCode::kMalformedRecord,
                "flip_type must be set exactly when kind is \"flip\" (" +
                    r.text_embedding_id() + ")");
  }
  return r;
}

std::optional<VariantRecord> VariantReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      return parse_variant_line(line);
    } catch (const Error& e) {
      throw Error(e.code(), "variants line " + std::to_string(line_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<VariantRecord> read_variants(std::istream& in) {
  VariantReader reader(in);
  std::vector<VariantRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<VariantRecord> read_variants(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_variants(in);
}

}  // namespace lgip

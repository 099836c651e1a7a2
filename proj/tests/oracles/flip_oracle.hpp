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

// Brute-force flip enumeration. Scans every byte offset for every surface
// form instead of tokenizing, so it shares no matching code with gen_flips.

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lgip/perturb.hpp"

namespace lgip::testing {

struct OracleFlip {
  FlipType type;
  std::string text;
  friend bool operator<(const OracleFlip& a, const OracleFlip& b) {
    return std::tie(a.type, a.text) < std::tie(b.type, b.text);
  }
  friend bool operator==(const OracleFlip&, const OracleFlip&) = default;
};

namespace oracle_detail {

inline bool alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool matches_at(const std::string& text, std::size_t at, const std::string& form) {
  if (form.empty() || at + form.size() > text.size()) return false;
  for (std::size_t k = 0; k < form.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(text[at + k])) != form[k]) return false;
  }
  if (at > 0 && alnum(text[at - 1])) return false;
  const std::size_t end = at + form.size();
  return end == text.size() || !alnum(text[end]);
}

struct Occurrence {
  std::size_t begin;
  std::size_t length;
  std::size_t entry;
  bool plural;
};

// Surface forms of entry `e` in list `type`: (form, is_plural).
inline std::vector<std::pair<std::string, bool>> forms(const FlipVocabulary& v,
                                                       FlipType type, std::size_t e) {
  switch (type) {
    case FlipType::kObject: {
      std::vector<std::pair<std::string, bool>> f = {{v.objects[e].singular, false}};
      if (!v.objects[e].plural.empty() && v.objects[e].plural != v.objects[e].singular) {
        f.emplace_back(v.objects[e].plural, true);
      }
      return f;
    }
    case FlipType::kColor: return {{v.colors[e], false}};
    case FlipType::kCount: return {{v.numbers[e], false}};
  }
  return {};
}

inline std::vector<Occurrence> occurrences(const std::string& text,
                                           const FlipVocabulary& v, FlipType type) {
  std::vector<Occurrence> out;
  for (std::size_t at = 0; at < text.size(); ++at) {
    for (std::size_t e = 0; e < v.list_size(type); ++e) {
      for (const auto& [form, plural] : forms(v, type, e)) {
        if (matches_at(text, at, form)) out.push_back({at, form.size(), e, plural});
      }
    }
  }
  return out;
}

inline std::string replacement(const FlipVocabulary& v, FlipType type, std::size_t e,
                               bool plural) {
  if (type == FlipType::kObject) {
    return plural ? v.objects[e].plural : v.objects[e].singular;
  }
  return type == FlipType::kColor ? v.colors[e] : v.numbers[e];
}

}  // namespace oracle_detail

// Every single-occurrence substitution, unordered and unfiltered by the cap.
inline std::set<OracleFlip> all_single_substitutions(const std::string& text,
                                                     const FlipVocabulary& v) {
  using namespace oracle_detail;
  std::set<OracleFlip> out;
  for (const auto type : kFlipTypes) {
    for (const auto& occ : occurrences(text, v, type)) {
      for (std::size_t e = 0; e < v.list_size(type); ++e) {
        if (e == occ.entry) continue;
        const auto form = replacement(v, type, e, occ.plural);
        if (form.empty()) continue;
        std::string edited = text;
        edited.replace(occ.begin, occ.length, form);
        if (edited != text) out.insert({type, edited});
      }
    }
  }
  return out;
}

// Ordered enumeration: round-robin obj, col, num; occurrences left to right;
// replacements cyclically after the matched entry. Truncated to `cap`.
inline std::vector<OracleFlip> ordered_flips(const std::string& text,
                                             const FlipVocabulary& v, std::size_t cap) {
  using namespace oracle_detail;
  std::array<std::vector<std::string>, 3> lists;
  std::set<std::string> seen;
  for (const auto type : kFlipTypes) {
    const std::size_t n = v.list_size(type);
    for (const auto& occ : occurrences(text, v, type)) {
      for (std::size_t k = 1; k < n; ++k) {
        const std::size_t e = (occ.entry + k) % n;
        const auto form = replacement(v, type, e, occ.plural);
        if (form.empty()) continue;
        std::string edited = text;
        edited.replace(occ.begin, occ.length, form);
        if (edited == text || !seen.insert(edited).second) continue;
        lists[static_cast<std::size_t>(type)].push_back(edited);
      }
    }
  }
  std::vector<OracleFlip> out;
  for (std::size_t round = 0; out.size() < cap; ++round) {
    bool any = false;
    for (const auto type : kFlipTypes) {
      const auto& list = lists[static_cast<std::size_t>(type)];
      if (round < list.size() && out.size() < cap) {
        out.push_back({type, list[round]});
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

}  // namespace lgip::testing

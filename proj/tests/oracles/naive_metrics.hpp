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

// Two-pass recomputation of the metric suite straight from score rows:
// pass one collects orig scores by key, pass two visits every para and flip
// row. Accepts rows in any order and builds no PairGroups.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lgip/simstore.hpp"

namespace lgip::testing {

struct NaiveMetrics {
  std::optional<double> e_inv;
  std::optional<double> e_sens;
  std::optional<double> pr;
  std::array<std::optional<double>, 3> type_gap;
  std::array<std::optional<double>, 3> type_pr;
  std::array<std::size_t, 3> type_count{};
  std::size_t n_para = 0;
  std::size_t n_flip = 0;
};

namespace naive_detail {

// Numeric ids sort by value; everything else after them, bytewise.
inline auto id_key(const std::string& id) {
  const bool numeric = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
  std::string digits = id;
  if (numeric) {
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
  }
  return std::make_tuple(numeric ? 0 : 1, numeric ? digits.size() : 0, digits, id);
}

inline std::size_t suffix(const std::string& variant_id) {
  const auto dash = variant_id.find('-');
  return dash == std::string::npos ? 0 : std::stoul(variant_id.substr(dash + 1));
}

}  // namespace naive_detail

// `canonical_order` visits rows sorted by (image_id, caption_id, kind,
// variant number), the engine's summation order; otherwise rows are summed
// in the order given.
inline NaiveMetrics naive_metrics(std::vector<SimilarityRecord> rows,
                                  bool canonical_order) {
  using namespace naive_detail;
  if (canonical_order) {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::make_tuple(id_key(a.image_id), id_key(a.caption_id),
                             static_cast<int>(a.kind), suffix(a.variant_id)) <
             std::make_tuple(id_key(b.image_id), id_key(b.caption_id),
                             static_cast<int>(b.kind), suffix(b.variant_id));
    });
  }

  std::map<std::pair<std::string, std::string>, double> orig;
  for (const auto& r : rows) {
    if (r.kind == VariantKind::kOrig) orig[{r.image_id, r.caption_id}] = r.score;
  }

  double inv = 0.0, sens = 0.0;
  std::size_t pos = 0;
  std::array<double, 3> tgap{};
  std::array<std::size_t, 3> tpos{};
  NaiveMetrics m;
  for (const auto& r : rows) {
    if (r.kind == VariantKind::kOrig) continue;
    const double o = orig.at({r.image_id, r.caption_id});
    if (r.kind == VariantKind::kPara) {
      inv += std::fabs(o - r.score);
      ++m.n_para;
    } else {
      const auto t = static_cast<std::size_t>(*r.flip_type);
      sens += o - r.score;
      tgap[t] += o - r.score;
      if (o > r.score) {
        ++pos;
        ++tpos[t];
      }
      ++m.n_flip;
      ++m.type_count[t];
    }
  }
  if (m.n_para) m.e_inv = inv / static_cast<double>(m.n_para);
  if (m.n_flip) {
    m.e_sens = sens / static_cast<double>(m.n_flip);
    m.pr = static_cast<double>(pos) / static_cast<double>(m.n_flip);
  }
  for (std::size_t t = 0; t < 3; ++t) {
    if (!m.type_count[t]) continue;
    m.type_gap[t] = tgap[t] / static_cast<double>(m.type_count[t]);
    m.type_pr[t] = static_cast<double>(tpos[t]) / static_cast<double>(m.type_count[t]);
  }
  return m;
}

}  // namespace lgip::testing

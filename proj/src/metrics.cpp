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

#include "lgip/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "lgip/error.hpp"
#include "lgip/ids.hpp"
#include "lgip/io.hpp"

namespace lgip {

// ---------------------------------------------------------------------------
// Grouping

namespace {

int compare_keys(const std::pair<std::string, std::string>& a,
                 const std::pair<std::string, std::string>& b) {
  if (const int c = compare_ids(a.first, b.first); c != 0) return c;
  return compare_ids(a.second, b.second);
}

int kind_rank(VariantKind kind) { return static_cast<int>(kind); }

}  // namespace

std::optional<PairGroup> GroupStream::take_group() {
  if (!pending_ && !exhausted_) {
    pending_ = source_();
    if (!pending_) exhausted_ = true;
  }
  if (!pending_) return std::nullopt;

  std::pair<std::string, std::string> key{pending_->image_id, pending_->caption_id};
  if (last_key_) {
    const int c = compare_keys(key, *last_key_);
    if (c <= 0) {
      throw Error(ErrorCode::kUnsortedRecords,
                  "records for " + key.first + "/" + key.second +
                      (c == 0 ? " are not contiguous" : " appear after " +
                                    last_key_->first + "/" + last_key_->second));
    }
  }

  std::vector<SimilarityRecord> rows;
  while (pending_ && pending_->image_id == key.first &&
         pending_->caption_id == key.second) {
    rows.push_back(std::move(*pending_));
    pending_ = source_();
    if (!pending_) exhausted_ = true;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
    return variant_ordinal(a.variant_id) < variant_ordinal(b.variant_id);
  });

  PairGroup g;
  g.image_id = key.first;
  g.caption_id = key.second;
  std::size_t origs = 0;
  for (const auto& r : rows) {
    switch (r.kind) {
      case VariantKind::kOrig:
        ++origs;
        g.orig_score = r.score;
        break;
      case VariantKind::kPara:
        g.para_scores.push_back(r.score);
        break;
      case VariantKind::kFlip:
        g.flip_scores.emplace_back(*r.flip_type, r.score);
        break;
    }
  }
  if (origs == 0) {
    throw Error(ErrorCode::kMissingOrig,
                "no orig record for " + key.first + "/" + key.second);
  }
  if (origs > 1) {
    throw Error(ErrorCode::kDuplicateOrig,
                std::to_string(origs) + " orig records for " + key.first + "/" +
                    key.second);
  }
  last_key_ = std::move(key);
  return g;
}

std::optional<PairGroup> GroupStream::next() {
  while (auto g = take_group()) {
    if (!g->empty()) return g;
    ++dropped_;
  }
  return std::nullopt;
}

GroupedRecords group_records(const std::vector<SimilarityRecord>& records) {
  std::size_t i = 0;
  GroupStream stream([&]() -> std::optional<SimilarityRecord> {
    if (i == records.size()) return std::nullopt;
    return records[i++];
  });
  GroupedRecords out;
  while (auto g = stream.next()) out.groups.push_back(std::move(*g));
  out.dropped_groups = stream.dropped_groups();
  return out;
}

// ---------------------------------------------------------------------------
// Batch metrics

namespace {

bool passes(FlipFilter filter, FlipType type) { return !filter || *filter == type; }

}  // namespace

std::optional<double> invariance_error(std::span<const PairGroup> groups) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (const double p : g.para_scores) {
      total += std::abs(g.orig_score - p);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

std::optional<double> semantic_sensitivity(std::span<const PairGroup> groups,
                                           FlipFilter filter) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (const auto& [type, score] : g.flip_scores) {
      if (!passes(filter, type)) continue;
      total += gap(g.orig_score, score);
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return total / static_cast<double>(n);
}

std::optional<double> positive_rate(std::span<const PairGroup> groups,
                                    FlipFilter filter) {
  std::size_t positives = 0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (const auto& [type, score] : g.flip_scores) {
      if (!passes(filter, type)) continue;
      if (g.orig_score > score) ++positives;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(positives) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Streaming summary

std::string_view pooling_name(Pooling pooling) {
  return pooling == Pooling::kFlat ? "flat" : "nested";
}

std::optional<Pooling> parse_pooling(std::string_view name) {
  if (name == "flat") return Pooling::kFlat;
  if (name == "nested") return Pooling::kNested;
  return std::nullopt;
}

void MetricsAccumulator::add(const PairGroup& g) {
  ++groups_;
  para_pairs_ += g.para_scores.size();
  flip_pairs_ += g.flip_scores.size();
  for (const auto& [type, score] : g.flip_scores) {
    ++type_pairs_[static_cast<std::size_t>(type)];
  }

  if (pooling_ == Pooling::kFlat) {
    for (const double p : g.para_scores) {
      inv_.total += std::abs(g.orig_score - p);
      ++inv_.count;
    }
    for (const auto& [type, score] : g.flip_scores) {
      const double d = gap(g.orig_score, score);
      const bool positive = g.orig_score > score;
      for (Sum* s : {&flips_, &types_[static_cast<std::size_t>(type)]}) {
        s->total += d;
        s->positives += positive ? 1 : 0;
        ++s->count;
      }
    }
    return;
  }

  if (!g.para_scores.empty()) {
    double total = 0.0;
    for (const double p : g.para_scores) total += std::abs(g.orig_score - p);
    inv_.total += total / static_cast<double>(g.para_scores.size());
    ++inv_.count;
  }
  auto add_group_mean = [&](Sum& s, FlipFilter filter) {
    double total = 0.0;
    std::size_t positives = 0;
    std::size_t n = 0;
    for (const auto& [type, score] : g.flip_scores) {
      if (!passes(filter, type)) continue;
      total += gap(g.orig_score, score);
      positives += g.orig_score > score ? 1 : 0;
      ++n;
    }
    if (n == 0) return;
    s.total += total / static_cast<double>(n);
    s.rate_total += static_cast<double>(positives) / static_cast<double>(n);
    ++s.count;
  };
  add_group_mean(flips_, kAllFlips);
  for (const auto type : kFlipTypes) {
    add_group_mean(types_[static_cast<std::size_t>(type)], type);
  }
}

MetricsSummary MetricsAccumulator::summary() const {
  const bool flat = pooling_ == Pooling::kFlat;
  auto mean = [](const Sum& s) -> std::optional<double> {
    if (s.count == 0) return std::nullopt;
    return s.total / static_cast<double>(s.count);
  };
  auto rate = [flat](const Sum& s) -> std::optional<double> {
    if (s.count == 0) return std::nullopt;
    const double num = flat ? static_cast<double>(s.positives) : s.rate_total;
    return num / static_cast<double>(s.count);
  };

  MetricsSummary m;
  m.e_inv = mean(inv_);
  m.e_sens_global = mean(flips_);
  m.pr_global = rate(flips_);
  for (std::size_t t = 0; t < types_.size(); ++t) {
    m.per_type[t] = {mean(types_[t]), rate(types_[t]), type_pairs_[t]};
  }
  m.n_para_pairs = para_pairs_;
  m.n_flip_pairs = flip_pairs_;
  m.n_groups = groups_;
  return m;
}

MetricsSummary summarize(std::span<const PairGroup> groups, Pooling pooling) {
  MetricsAccumulator acc(pooling);
  for (const auto& g : groups) acc.add(g);
  return acc.summary();
}

// ---------------------------------------------------------------------------
// metrics.json

namespace {

using ojson = nlohmann::ordered_json;

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(); }

void put_summary(ojson& doc, const MetricsSummary& m) {
  doc["e_inv"] = opt(m.e_inv);
  doc["e_sens_global"] = opt(m.e_sens_global);
  doc["pr_global"] = opt(m.pr_global);
  ojson per_type = ojson::object();
  for (const auto type : kFlipTypes) {
    const auto& s = m.of(type);
    ojson entry;
    entry["gap"] = opt(s.gap);
    entry["pr"] = opt(s.pr);
    entry["count"] = s.count;
    per_type[std::string(flip_type_name(type))] = std::move(entry);
  }
  doc["per_type"] = std::move(per_type);
  doc["n_para_pairs"] = m.n_para_pairs;
  doc["n_flip_pairs"] = m.n_flip_pairs;
  doc["n_groups"] = m.n_groups;
}

std::optional<double> get_opt(const nlohmann::json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

MetricsSummary get_summary(const nlohmann::json& doc) {
  MetricsSummary m;
  m.e_inv = get_opt(doc, "e_inv");
  m.e_sens_global = get_opt(doc, "e_sens_global");
  m.pr_global = get_opt(doc, "pr_global");
  const auto& per_type = doc.at("per_type");
  for (const auto type : kFlipTypes) {
    const auto& e = per_type.at(std::string(flip_type_name(type)));
    m.per_type[static_cast<std::size_t>(type)] = {
        get_opt(e, "gap"), get_opt(e, "pr"), e.at("count").get<std::size_t>()};
  }
  m.n_para_pairs = doc.at("n_para_pairs").get<std::size_t>();
  m.n_flip_pairs = doc.at("n_flip_pairs").get<std::size_t>();
  m.n_groups = doc.value("n_groups", std::size_t{0});
  return m;
}

}  // namespace

void write_metrics_json(std::ostream& out, const MetricsReport& report) {
  ojson doc;
  doc["model_name"] = report.model_name;
  put_summary(doc, report.summary);
  doc["n_dropped_groups"] = report.n_dropped_groups;
  doc["pooling"] = report.nested ? "flat+nested" : "flat";
  doc["config_digest"] = report.config_digest;
  if (report.nested) {
    ojson nested;
    put_summary(nested, *report.nested);
    doc["nested"] = std::move(nested);
  }
  out << doc.dump(2) << "\n";
}

MetricsReport parse_metrics_json(std::istream& in) {
  MetricsReport r;
  try {
    const auto doc = nlohmann::json::parse(in);
    r.model_name = doc.at("model_name").get<std::string>();
    r.config_digest = doc.value("config_digest", std::string{});
    r.summary = get_summary(doc);
    r.n_dropped_groups = doc.value("n_dropped_groups", std::size_t{0});
    if (const auto it = doc.find("nested"); it != doc.end() && !it->is_null()) {
      r.nested = get_summary(*it);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("metrics file: ") + e.what());
  }
  return r;
}

MetricsReport load_metrics_json(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_metrics_json(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace lgip

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
#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lgip/perturb.hpp"
#include "lgip/simstore.hpp"

namespace lgip {

/// All scored variants of one (image, caption) pair.
struct PairGroup {
  std::string image_id;
  std::string caption_id;
  double orig_score = 0.0;
  std::vector<double> para_scores;
  std::vector<std::pair<FlipType, double>> flip_scores;

  bool empty() const { return para_scores.empty() && flip_scores.empty(); }
};

/// nullopt selects every flip type.
using FlipFilter = std::optional<FlipType>;
inline constexpr FlipFilter kAllFlips = std::nullopt;

/// Folds a score stream, sorted by (image_id, caption_id), into PairGroups.
/// Groups with neither paraphrases nor flips are skipped and counted.
/// Throws kMissingOrig, kDuplicateOrig, kUnsortedRecords.
class GroupStream {
 public:
  using Source = std::function<std::optional<SimilarityRecord>()>;

  explicit GroupStream(Source source) : source_(std::move(source)) {}

  std::optional<PairGroup> next();
  std::size_t dropped_groups() const { return dropped_; }

 private:
  std::optional<PairGroup> take_group();

  Source source_;
  std::optional<SimilarityRecord> pending_;
  std::optional<std::pair<std::string, std::string>> last_key_;
  bool exhausted_ = false;
  std::size_t dropped_ = 0;
};

struct GroupedRecords {
  std::vector<PairGroup> groups;
  std::size_t dropped_groups = 0;
};

GroupedRecords group_records(const std::vector<SimilarityRecord>& records);

/// Pooled mean of |orig - para|; nullopt when there are no paraphrase pairs.
std::optional<double> invariance_error(std::span<const PairGroup> groups);

inline double gap(double orig_score, double flip_score) {
  return orig_score - flip_score;
}

/// Pooled mean gap over flips passing `filter`; nullopt when none do.
std::optional<double> semantic_sensitivity(std::span<const PairGroup> groups,
                                           FlipFilter filter = kAllFlips);

/// Fraction of filtered flips with orig strictly above flip. Ties count 0.
std::optional<double> positive_rate(std::span<const PairGroup> groups,
                                    FlipFilter filter = kAllFlips);

enum class Pooling { kFlat, kNested };

std::string_view pooling_name(Pooling pooling);
std::optional<Pooling> parse_pooling(std::string_view name);

struct TypeStats {
  std::optional<double> gap;
  std::optional<double> pr;
  std::size_t count = 0;
};

struct MetricsSummary {
  std::optional<double> e_inv;
  std::optional<double> e_sens_global;
  std::optional<double> pr_global;
  std::array<TypeStats, 3> per_type;  // indexed by FlipType
  std::size_t n_para_pairs = 0;
  std::size_t n_flip_pairs = 0;
  std::size_t n_groups = 0;

  const TypeStats& of(FlipType type) const {
    return per_type[static_cast<std::size_t>(type)];
  }
};

/// Single-pass accumulator. Sums run sequentially in the order groups are
/// added, so feeding canonical-order groups reproduces the batch functions
/// above bit-for-bit.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(Pooling pooling = Pooling::kFlat)
      : pooling_(pooling) {}

  void add(const PairGroup& group);
  MetricsSummary summary() const;

 private:
  struct Sum {
    double total = 0.0;
    double rate_total = 0.0;  // nested only: sum of per-group positive rates
    std::size_t positives = 0;
    std::size_t count = 0;
  };

  Pooling pooling_;
  std::size_t groups_ = 0;
  std::size_t para_pairs_ = 0;
  std::size_t flip_pairs_ = 0;
  std::array<std::size_t, 3> type_pairs_{};
  // Flat: sums over tuples. Nested: sums over per-group means, with `count`
  // holding the number of contributing groups.
  Sum inv_;
  Sum flips_;
  std::array<Sum, 3> types_{};
};

MetricsSummary summarize(std::span<const PairGroup> groups,
                         Pooling pooling = Pooling::kFlat);

/// Contents of metrics.json.
struct MetricsReport {
  std::string model_name;
  std::string config_digest;
  MetricsSummary summary;
  std::optional<MetricsSummary> nested;  // present when nested pooling ran
  std::size_t n_dropped_groups = 0;
};

void write_metrics_json(std::ostream& out, const MetricsReport& report);
MetricsReport parse_metrics_json(std::istream& in);
MetricsReport load_metrics_json(const std::filesystem::path& path);

}  // namespace lgip

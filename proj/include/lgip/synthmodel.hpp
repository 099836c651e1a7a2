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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgip/perturb.hpp"
#include "lgip/rng.hpp"
#include "lgip/simstore.hpp"

namespace lgip {

/// Box-Muller gaussian draw, normalized to unit length in double.
std::vector<double> gaussian_unit_vector(SplitMix64& rng, std::uint32_t dim);

enum class SynthKind { kPlanted, kInvariant, kRandom };

std::string_view synth_kind_name(SynthKind kind);
std::optional<SynthKind> parse_synth_kind(std::string_view name);

struct SynthProfile {
  SynthKind kind = SynthKind::kPlanted;
  std::uint32_t dim = 64;
  std::uint64_t seed = 0;
  double planted_gap = 0.05;

  /// dim >= 2; planted_gap in (0, 2) for the planted profile.
  void validate() const;
};

struct SynthEmbeddings {
  EmbeddingTable images;
  EmbeddingTable texts;
};

/// Builds image and text tables for `variants`.
///
/// planted:   image i gets a seeded unit vector v_i; its orig and para texts
///            reuse v_i; each flip gets a unit vector at cosine 1 - gap from
///            v_i, built from v_i and a seeded direction orthogonal to it.
/// invariant: each text vector is keyed by the caption body left after
///            stripping a template affix (`templates`), so paraphrases of a
///            caption share its vector exactly.
/// random:    every vector is drawn independently from its own id.
///
/// Image rows follow `image_ids`; text rows follow `variants`.
SynthEmbeddings synth_embed(const std::vector<VariantRecord>& variants,
                            const std::vector<std::string>& image_ids,
                            const SynthProfile& profile,
                            const std::vector<std::string>& templates,
                            unsigned threads = 1);

/// Distinct image ids of `variants` in first-seen order.
std::vector<std::string> distinct_image_ids(
    const std::vector<VariantRecord>& variants);

}  // namespace lgip

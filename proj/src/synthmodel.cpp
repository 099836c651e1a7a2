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

#include "lgip/synthmodel.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "lgip/error.hpp"
#include "lgip/parallel.hpp"

namespace lgip {

std::vector<double> gaussian_unit_vector(SplitMix64& rng, std::uint32_t dim) {
  std::vector<double> v(dim);
  for (;;) {
    for (std::uint32_t i = 0; i < dim; i += 2) {
      const double u1 = 1.0 - rng.uniform();  // (0, 1]
      const double u2 = rng.uniform();
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double theta = 2.0 * std::numbers::pi * u2;
      v[i] = r * std::cos(theta);
      if (i + 1 < dim) v[i + 1] = r * std::sin(theta);
    }
    double norm2 = 0.0;
    for (const double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
      const double norm = std::sqrt(norm2);
      for (auto& x : v) x /= norm;
      return v;
    }
  }
}

std::string_view synth_kind_name(SynthKind kind) {
  switch (kind) {
    case SynthKind::kPlanted: return "planted";
    case SynthKind::kInvariant: return "invariant";
    case SynthKind::kRandom: return "random";
  }
  return "?";
}

std::optional<SynthKind> parse_synth_kind(std::string_view name) {
  for (const auto k : {SynthKind::kPlanted, SynthKind::kInvariant, SynthKind::kRandom}) {
    if (synth_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void SynthProfile::validate() const {
  if (dim < 2) throw Error(ErrorCode::kInvalidConfig, "synthetic dim must be >= 2");
  if (kind == SynthKind::kPlanted && !(planted_gap > 0.0 && planted_gap < 2.0)) {
    throw Error(ErrorCode::kInvalidConfig, "planted gap must lie in (0, 2)");
  }
}

std::vector<std::string> distinct_image_ids(const std::vector<VariantRecord>& variants) {
  std::vector<std::string> ids;
  std::set<std::string_view> seen;
  for (const auto& v : variants) {
    if (seen.insert(v.image_id).second) ids.push_back(v.image_id);
  }
  return ids;
}

namespace {

std::vector<float> to_float(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

std::vector<float> seeded_vector(std::uint64_t seed, const std::string& key,
                                 std::uint32_t dim) {
  auto rng = keyed_generator(seed, key);
  return to_float(gaussian_unit_vector(rng, dim));
}

// Unit vector whose scored similarity against `image` is exactly
// min(1, image . image) - gap before f32 rounding. The residual direction is
// a seeded gaussian made orthogonal to `image`.
std::vector<float> planted_flip(std::span<const float> image, double gap,
                                std::uint64_t seed, const std::string& key) {
  const std::uint32_t dim = static_cast<std::uint32_t>(image.size());
  const std::vector<double> v(image.begin(), image.end());
  const double self = dot(image, image);
  const double norm = std::sqrt(self);
  const double target = std::min(1.0, self) - gap;
  const double along = target / norm;  // coefficient on v / |v|
  const double across = std::sqrt(std::max(0.0, 1.0 - along * along));

  auto rng = keyed_generator(seed, key);
  std::vector<double> w;
  for (;;) {
    w = gaussian_unit_vector(rng, dim);
    double proj = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) proj += w[i] * v[i];
    proj /= self;
    double w2 = 0.0;
    for (std::uint32_t i = 0; i < dim; ++i) {
      w[i] -= proj * v[i];
      w2 += w[i] * w[i];
    }
    if (w2 > 1e-12) {
      const double wn = std::sqrt(w2);
      for (auto& x : w) x /= wn;
      break;
    }
  }

  std::vector<float> out(dim);
  for (std::uint32_t i = 0; i < dim; ++i) {
    out[i] = static_cast<float>(along * v[i] / norm + across * w[i]);
  }
  return out;
}

}  // namespace

SynthEmbeddings synth_embed(const std::vector<VariantRecord>& variants,
                            const std::vector<std::string>& image_ids,
                            const SynthProfile& profile,
                            const std::vector<std::string>& templates,
                            unsigned threads) {
  profile.validate();
  const std::uint32_t dim = profile.dim;

  SynthEmbeddings out{EmbeddingTable(dim), EmbeddingTable(dim)};
  {
    std::vector<std::vector<float>> rows(image_ids.size());
    parallel_for(image_ids.size(), threads, [&](std::size_t i) {
      rows[i] = seeded_vector(profile.seed, "image:" + image_ids[i], dim);
    });
    for (std::size_t i = 0; i < rows.size(); ++i) out.images.add(image_ids[i], rows[i]);
  }

  std::map<std::pair<std::string, std::string>, std::string> orig_body;
  if (profile.kind == SynthKind::kInvariant) {
    for (const auto& v : variants) {
      if (v.kind == VariantKind::kOrig) {
        orig_body[{v.image_id, v.caption_id}] = normalize_caption_body(v.text);
      }
    }
  }

  std::vector<std::vector<float>> rows(variants.size());
  parallel_for(variants.size(), threads, [&](std::size_t i) {
    const auto& v = variants[i];
    switch (profile.kind) {
      case SynthKind::kPlanted: {
        const auto image = out.images.find(v.image_id);
        if (!image) throw Error(ErrorCode::kMissingImageEmbedding, v.image_id);
        if (v.kind == VariantKind::kFlip) {
          rows[i] = planted_flip(*image, profile.planted_gap, profile.seed,
                                 "flip:" + v.text_embedding_id());
        } else {
          rows[i].assign(image->begin(), image->end());
        }
        break;
      }
      case SynthKind::kInvariant: {
        std::string body;
        if (v.kind == VariantKind::kPara) {
          const auto it = orig_body.find({v.image_id, v.caption_id});
          const std::string_view preferred =
              it == orig_body.end() ? std::string_view{} : std::string_view(it->second);
          auto stripped = strip_template(v.text, templates, preferred);
          body = stripped ? std::move(*stripped) : normalize_caption_body(v.text);
        } else {
          body = normalize_caption_body(v.text);
        }
        rows[i] = seeded_vector(profile.seed, "text:" + body, dim);
        break;
      }
      case SynthKind::kRandom:
        rows[i] = seeded_vector(profile.seed, "text:" + v.text_embedding_id(), dim);
        break;
    }
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.texts.add(variants[i].text_embedding_id(), rows[i]);
  }
  return out;
}

}  // namespace lgip

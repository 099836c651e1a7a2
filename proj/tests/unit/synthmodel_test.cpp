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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "lgip/corpus.hpp"
#include "lgip/metrics.hpp"
#include "oracles/fuzz_captions.hpp"
#include "test_util.hpp"

namespace lgip {
namespace {

std::vector<VariantRecord> mini_variants() {
  const auto corpus = sample_corpus(load_coco_captions(testing::data_path("mini_coco_captions.json")),
                                    CorpusConfig{});
  return perturb_corpus(corpus, default_vocabulary(), default_perturb_config());
}

SynthEmbeddings embed(const std::vector<VariantRecord>& variants, SynthKind kind,
                      std::uint64_t seed = 0, unsigned threads = 1) {
  SynthProfile p;
  p.kind = kind;
  p.seed = seed;
  return synth_embed(variants, distinct_image_ids(variants), p, default_templates(), threads);
}

EmbeddingTable reload(const EmbeddingTable& t) {
  std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
  write_embeddings(s, t);
  return read_embeddings(s);
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

// ---------------------------------------------------------------------------
// Generators

TEST(SplitMix64, KnownOutputs) {
  SplitMix64 g(0);
  EXPECT_EQ(g.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(g.next(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(g.next(), 0x06C45D188009454FULL);
}

TEST(Fnv1a64, KnownOutputs) {
  EXPECT_EQ(fnv1a64(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171F73967E8ULL);
}

TEST(SplitMix64, BelowStaysInRange) {
  SplitMix64 g(1);
  std::array<int, 7> hist{};
  for (int i = 0; i < 7000; ++i) ++hist[g.below(7)];
  for (int h : hist) EXPECT_GT(h, 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(GaussianUnitVector, UnitAndSeeded) {
  SplitMix64 a(5), b(5);
  const auto u = gaussian_unit_vector(a, 33);
  EXPECT_EQ(u, gaussian_unit_vector(b, 33));
  double n = 0.0;
  for (double x : u) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
}

TEST(SynthProfile, Validation) {
  SynthProfile p;
  p.validate();
  p.dim = 1;
  EXPECT_LGIP_ERROR(p.validate(), kInvalidConfig);
  p = {};
  p.planted_gap = 0.0;
  EXPECT_LGIP_ERROR(p.validate(), kInvalidConfig);
  p.planted_gap = 2.0;
  EXPECT_LGIP_ERROR(p.validate(), kInvalidConfig);
  p.kind = SynthKind::kRandom;
  p.validate();
  EXPECT_EQ(parse_synth_kind("invariant"), SynthKind::kInvariant);
  EXPECT_FALSE(parse_synth_kind("banana").has_value());
}

// ---------------------------------------------------------------------------
// Profiles

TEST(PlantedProfile, FlipCosineMatchesGap) {
  const auto variants = mini_variants();
  for (double gap : {0.05, 0.3, 1.0, 1.9}) {
    SynthProfile p;
    p.planted_gap = gap;
    p.seed = 3;
    const auto e = synth_embed(variants, distinct_image_ids(variants), p, default_templates());
    const auto images = reload(e.images);
    const auto texts = reload(e.texts);
    for (const auto& v : variants) {
      const auto img = *images.find(v.image_id);
      const auto txt = *texts.find(v.text_embedding_id());
      const double c = cosine(img, txt);
      if (v.kind == VariantKind::kFlip) {
        EXPECT_NEAR(c, 1.0 - gap, 1e-7) << v.text_embedding_id();
      } else {
        EXPECT_TRUE(same_bits(img, txt)) << v.text_embedding_id();
      }
    }
  }
}

TEST(PlantedProfile, MetricsOnMiniCorpus) {
  const auto variants = mini_variants();
  const auto e = embed(variants, SynthKind::kPlanted);
  const auto scores = score_variants(reload(e.images), reload(e.texts), variants);
  const auto s = summarize(group_records(scores).groups);
  EXPECT_EQ(s.e_inv, 0.0);
  EXPECT_NEAR(*s.e_sens_global, 0.05, 1e-7);
  EXPECT_EQ(s.pr_global, 1.0);
  for (auto t : kFlipTypes) EXPECT_NEAR(*s.of(t).gap, 0.05, 1e-7);
}

TEST(PlantedProfile, ImagesAreUnitAndDistinct) {
  const auto variants = mini_variants();
  const auto e = embed(variants, SynthKind::kPlanted);
  ASSERT_EQ(e.images.size(), 10u);
  for (std::size_t i = 0; i < e.images.size(); ++i) {
    EXPECT_NEAR(dot(e.images.vector(i), e.images.vector(i)), 1.0, 1e-6);
    for (std::size_t j = 0; j < i; ++j) {
      EXPECT_LT(cosine(e.images.vector(i), e.images.vector(j)), 0.9);
    }
  }
}

TEST(InvariantProfile, ParaphrasesCollideWithOrig) {
  const auto variants = mini_variants();
  const auto e = embed(variants, SynthKind::kInvariant, 4);
  for (const auto& v : variants) {
    if (v.kind != VariantKind::kPara) continue;
    const VariantRecord o{v.image_id, v.caption_id, "orig", VariantKind::kOrig, std::nullopt, ""};
    EXPECT_TRUE(same_bits(*e.texts.find(v.text_embedding_id()),
                          *e.texts.find(o.text_embedding_id())))
        << v.text;
  }
  const auto scores = score_variants(e.images, e.texts, variants);
  EXPECT_EQ(summarize(group_records(scores).groups).e_inv, 0.0);
}

TEST(InvariantProfile, FuzzedCaptionsCollide) {
  const auto vocab = default_vocabulary();
  auto corpus = testing::rich_corpus(8, 200, 2, vocab);
  std::sort(corpus.begin(), corpus.end(), caption_less);
  const auto variants = perturb_corpus(corpus, vocab, default_perturb_config());
  const auto e = embed(variants, SynthKind::kInvariant, 8);
  const auto scores = score_variants(e.images, e.texts, variants);
  EXPECT_EQ(summarize(group_records(scores).groups).e_inv, 0.0);
}

TEST(RandomProfile, EveryTextVectorDistinct) {
  const auto variants = mini_variants();
  const auto e = embed(variants, SynthKind::kRandom, 13);
  ASSERT_EQ(e.texts.size(), variants.size());
  for (std::size_t i = 1; i < e.texts.size(); ++i) {
    EXPECT_FALSE(same_bits(e.texts.vector(i - 1), e.texts.vector(i)));
  }
}

TEST(RandomProfile, VectorDependsOnlyOnId) {
  auto variants = mini_variants();
  const auto full = embed(variants, SynthKind::kRandom, 13);
  std::vector<VariantRecord> tail(variants.begin() + 100, variants.end());
  const auto part = embed(tail, SynthKind::kRandom, 13);
  for (const auto& v : tail) {
    EXPECT_TRUE(same_bits(*full.texts.find(v.text_embedding_id()),
                          *part.texts.find(v.text_embedding_id())));
  }
  const auto other = embed(variants, SynthKind::kRandom, 14);
  EXPECT_FALSE(same_bits(full.texts.vector(0), other.texts.vector(0)));
}

TEST(SynthEmbed, DeterministicAcrossThreads) {
  const auto variants = mini_variants();
  for (auto kind : {SynthKind::kPlanted, SynthKind::kInvariant, SynthKind::kRandom}) {
    std::ostringstream a(std::ios::binary), b(std::ios::binary);
    write_embeddings(a, embed(variants, kind, 2, 1).texts);
    write_embeddings(b, embed(variants, kind, 2, 8).texts);
    EXPECT_EQ(a.str(), b.str()) << synth_kind_name(kind);
  }
}

TEST(SynthEmbed, RowOrder) {
  const auto variants = mini_variants();
  const auto e = embed(variants, SynthKind::kPlanted);
  const auto ids = distinct_image_ids(variants);
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(e.images.id(i), ids[i]);
  for (std::size_t i = 0; i < variants.size(); ++i) {
    EXPECT_EQ(e.texts.id(i), variants[i].text_embedding_id());
  }
}

TEST(SynthEmbed, PlantedNeedsImage) {
  auto variants = mini_variants();
  SynthProfile p;
  EXPECT_LGIP_ERROR(synth_embed(variants, {}, p, default_templates()), kMissingImageEmbedding);
}

TEST(DistinctImageIds, FirstSeenOrder) {
  std::vector<VariantRecord> v = {{"5", "1", "orig", VariantKind::kOrig, std::nullopt, ""},
                                  {"2", "1", "orig", VariantKind::kOrig, std::nullopt, ""},
                                  {"5", "2", "orig", VariantKind::kOrig, std::nullopt, ""}};
  EXPECT_EQ(distinct_image_ids(v), (std::vector<std::string>{"5", "2"}));
}

}  // namespace
}  // namespace lgip

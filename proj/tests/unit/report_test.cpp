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

#include "lgip/report.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "test_util.hpp"

namespace lgip {
namespace {

ModelRow row(std::string name, std::optional<double> e_inv, std::optional<double> e_sens,
             std::optional<double> pr) {
  return {std::move(name), e_inv, e_sens, pr, {}};
}

ModelRow typed(std::string name, std::array<std::pair<double, double>, 3> stats) {
  ModelRow r = row(std::move(name), std::nullopt, std::nullopt, std::nullopt);
  for (std::size_t t = 0; t < 3; ++t) r.per_type[t] = {stats[t].first, stats[t].second, 1};
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string collapse(const std::string& s) {
  std::istringstream in(s);
  std::string out;
  for (std::string w; in >> w;) out += (out.empty() ? "" : " ") + w;
  return out;
}

// Nine model rows with three-decimal values.
std::vector<ModelRow> nine_models() {
  return {row("CLIP ViT-B/16 (OpenAI)", 0.008, 0.024, 0.866),
          row("CLIP ViT-L/14 (OpenAI)", 0.009, 0.027, 0.873),
          row("OpenCLIP ViT-L/14 (LAION-2B)", 0.008, 0.046, 0.898),
          row("OpenCLIP ViT-H/14 (LAION-2B)", 0.010, 0.050, 0.908),
          row("EVA02-CLIP L/14", 0.005, 0.030, 0.896),
          row("SigLIP base-p16-224", 0.055, -0.017, 0.474),
          row("SigLIP base-p16-384", 0.058, -0.021, 0.464),
          row("SigLIP large-p16-384", 0.013, 0.002, 0.538),
          row("SigLIP2 base-p16-224", 0.041, 0.008, 0.649)};
}

// ---------------------------------------------------------------------------
// Main table

TEST(MainTable, SingleRowPlain) {
  const auto text = render_main_table({row("CLIP ViT-B/16", 0.008, 0.024, 0.866)},
                                      TableStyle::kPlain);
  const auto l = lines(text);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(collapse(l[0]), "Model E_inv↓ E_sens↑ PR↑");
  EXPECT_EQ(collapse(l[1]), "CLIP ViT-B/16 0.008 0.024 0.866");
  EXPECT_EQ(text,
            "Model          E_inv↓  E_sens↑    PR↑\n"
            "CLIP ViT-B/16   0.008    0.024  0.866\n");
}

TEST(MainTable, SingleRowMarkdown) {
  EXPECT_EQ(render_main_table({row("CLIP ViT-B/16", 0.008, 0.024, 0.866)}, TableStyle::kMarkdown),
            "| Model | E_inv↓ | E_sens↑ | PR↑ |\n"
            "|---|---:|---:|---:|\n"
            "| CLIP ViT-B/16 | 0.008 | 0.024 | 0.866 |\n");
}

TEST(MainTable, NullRendersDash) {
  const auto text = render_main_table({row("m", std::nullopt, 0.1, std::nullopt)},
                                      TableStyle::kMarkdown);
  EXPECT_NE(text.find("| m | — | 0.100 | — |"), std::string::npos) << text;
  const auto plain = render_main_table({row("m", std::nullopt, 0.1, std::nullopt)},
                                       TableStyle::kPlain);
  EXPECT_EQ(collapse(lines(plain)[1]), "m — 0.100 —");
}

TEST(MainTable, TwoRowsKeepOrder) {
  for (auto style : {TableStyle::kPlain, TableStyle::kMarkdown}) {
    const auto l = lines(render_main_table(
        {row("zeta", 0.1, 0.2, 0.3), row("alpha", 0.4, 0.5, 0.6)}, style));
    const std::size_t body = style == TableStyle::kPlain ? 1 : 2;
    ASSERT_EQ(l.size(), body + 2);
    EXPECT_NE(l[body].find("zeta"), std::string::npos);
    EXPECT_NE(l[body + 1].find("alpha"), std::string::npos);
  }
}

TEST(MainTable, PlainAlignment) {
  const auto text = render_main_table(
      {row("a", 0.008, -0.017, 1.0), row("long model name", 0.5, 0.25, 0.125)}, TableStyle::kPlain);
  EXPECT_EQ(text,
            "Model            E_inv↓  E_sens↑    PR↑\n"
            "a                 0.008   -0.017  1.000\n"
            "long model name   0.500    0.250  0.125\n");
}

TEST(MainTable, MarkdownEscapesPipes) {
  const auto text = render_main_table({row("a|b", 0.1, 0.1, 0.1)}, TableStyle::kMarkdown);
  EXPECT_NE(text.find("| a\\|b |"), std::string::npos);
}

TEST(MainTable, NineModelsRoundToDisplayedValues) {
  const auto l = lines(render_main_table(nine_models(), TableStyle::kPlain));
  ASSERT_EQ(l.size(), 10u);
  EXPECT_EQ(collapse(l[4]), "OpenCLIP ViT-H/14 (LAION-2B) 0.010 0.050 0.908");
  EXPECT_EQ(collapse(l[7]), "SigLIP base-p16-384 0.058 -0.021 0.464");
}

TEST(MainTable, RenderingIsPure) {
  const auto rows = nine_models();
  EXPECT_EQ(render_main_table(rows, TableStyle::kPlain), render_main_table(rows, TableStyle::kPlain));
  EXPECT_EQ(render_fliptype_table(rows, TableStyle::kMarkdown),
            render_fliptype_table(rows, TableStyle::kMarkdown));
}

// ---------------------------------------------------------------------------
// Flip-type table

TEST(FlipTypeTable, SingleRow) {
  const auto text = render_fliptype_table(
      {typed("EVA02-CLIP L/14", {{{0.043, 0.956}, {0.021, 0.869}, {0.010, 0.765}}})},
      TableStyle::kMarkdown);
  EXPECT_EQ(text,
            "| Model | Obj Gap | Obj PR | Col Gap | Col PR | Cnt Gap | Cnt PR |\n"
            "|---|---:|---:|---:|---:|---:|---:|\n"
            "| EVA02-CLIP L/14 | 0.043 | 0.956 | 0.021 | 0.869 | 0.010 | 0.765 |\n");
}

TEST(FlipTypeTable, NegativeGapsKeepMinus) {
  const auto text = render_fliptype_table(
      {typed("SigLIP base-p16-224", {{{-0.017, 0.466}, {-0.017, 0.477}, {-0.016, 0.493}}})},
      TableStyle::kPlain);
  EXPECT_EQ(collapse(lines(text)[1]),
            "SigLIP base-p16-224 -0.017 0.466 -0.017 0.477 -0.016 0.493");
}

TEST(FlipTypeTable, EmptyPerTypeIsDashes) {
  const auto text = render_fliptype_table({row("m", 0.1, 0.1, 0.1)}, TableStyle::kMarkdown);
  EXPECT_NE(text.find("| m | — | — | — | — | — | — |"), std::string::npos) << text;
}

// ---------------------------------------------------------------------------
// Scatter CSV

TEST(ScatterCsv, OneModel) {
  EXPECT_EQ(emit_scatter_csv({row("m", 0.25, 0.5, 1.0)}), "model,e_inv,e_sens,pr\nm,0.25,0.5,1\n");
}

TEST(ScatterCsv, NineModels) {
  const auto rows = nine_models();
  const auto l = lines(emit_scatter_csv(rows));
  ASSERT_EQ(l.size(), 10u);
  EXPECT_EQ(l[0], "model,e_inv,e_sens,pr");
  EXPECT_EQ(l[1], "CLIP ViT-B/16 (OpenAI),0.0080000000000000002,0.024,0.86599999999999999");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::istringstream in(l[i + 1]);
    std::string name, a, b, c;
    std::getline(in, name, ',');
    std::getline(in, a, ',');
    std::getline(in, b, ',');
    std::getline(in, c, ',');
    EXPECT_EQ(name, rows[i].model_name);
    EXPECT_EQ(std::stod(a), *rows[i].e_inv);
    EXPECT_EQ(std::stod(b), *rows[i].e_sens);
    EXPECT_EQ(std::stod(c), *rows[i].pr);
  }
}

TEST(ScatterCsv, FullPrecision) {
  const double v = 0.1 + 0.2;
  const auto l = lines(emit_scatter_csv({row("m", v, -v, std::nullopt)}));
  EXPECT_EQ(l[1], "m,0.30000000000000004,-0.30000000000000004,");
}

TEST(ScatterCsv, QuotesNames) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  const auto csv = emit_scatter_csv({row("ViT-B/16, LAION", 0.1, 0.2, 0.3)});
  EXPECT_NE(csv.find("\n\"ViT-B/16, LAION\",0.10000000000000001,"), std::string::npos) << csv;
}

// ---------------------------------------------------------------------------
// Rows

TEST(ModelRows, FromMetricsReport) {
  MetricsReport m;
  m.model_name = "x";
  m.summary.e_inv = 0.1;
  m.summary.pr_global = 0.9;
  m.summary.per_type[1] = {0.2, 0.8, 4};
  const auto r = model_row(m);
  EXPECT_EQ(r.model_name, "x");
  EXPECT_EQ(r.e_inv, 0.1);
  EXPECT_FALSE(r.e_sens.has_value());
  EXPECT_EQ(r.pr, 0.9);
  EXPECT_EQ(r.per_type[1].gap, 0.2);
}

TEST(ModelRows, MetricsFileValuesSurviveDisplay) {
  MetricsReport m;
  m.model_name = "x";
  m.summary.e_inv = 0.0123456789;
  m.summary.e_sens_global = -0.98765;
  m.summary.pr_global = 0.5;
  std::ostringstream out;
  write_metrics_json(out, m);
  std::istringstream in(out.str());
  const auto r = model_row(parse_metrics_json(in));
  const auto l = lines(emit_scatter_csv({r}));
  EXPECT_EQ(std::stod(l[1].substr(2)), 0.0123456789);
  EXPECT_EQ(collapse(lines(render_main_table({r}, TableStyle::kPlain))[1]),
            "x 0.012 -0.988 0.500");
}

TEST(ModelRows, DuplicateNamesRejected) {
  check_unique_models(nine_models());
  EXPECT_LGIP_ERROR(check_unique_models({row("a", 0.1, 0.1, 0.1), row("a", 0.2, 0.2, 0.2)}),
                    kDuplicateModel);
}

}  // namespace
}  // namespace lgip

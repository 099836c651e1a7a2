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

#include <optional>
#include <string>
#include <vector>

#include "lgip/metrics.hpp"

namespace lgip {

struct ModelRow {
  std::string model_name;
  std::optional<double> e_inv;
  std::optional<double> e_sens;
  std::optional<double> pr;
  std::array<TypeStats, 3> per_type;
};

ModelRow model_row(const MetricsReport& report);

/// Throws kDuplicateModel when two rows share a model_name.
void check_unique_models(const std::vector<ModelRow>& rows);

enum class TableStyle { kMarkdown, kPlain };

/// Model | E_inv↓ | E_sens↑ | PR↑, three decimals, absent values as "—".
std::string render_main_table(const std::vector<ModelRow>& rows,
                              TableStyle style);

/// Gap and PR for obj, col and num flips.
std::string render_fliptype_table(const std::vector<ModelRow>& rows,
                                  TableStyle style);

/// "model,e_inv,e_sens,pr" with round-trip precision; absent values are
/// empty fields.
std::string emit_scatter_csv(const std::vector<ModelRow>& rows);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& value);

}  // namespace lgip

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

#include <string_view>

namespace lgip {

// Canonical ordering for image and caption identifiers. Two purely decimal
// ids compare numerically ("9" < "10"); anything else compares bytewise, and
// a decimal id sorts before a non-decimal one.
int compare_ids(std::string_view a, std::string_view b);

inline bool id_less(std::string_view a, std::string_view b) {
  return compare_ids(a, b) < 0;
}

bool is_decimal(std::string_view s);

}  // namespace lgip

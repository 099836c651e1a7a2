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
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <string>
#include <string_view>

namespace lgip {

// Writes to "<path>.tmp" and renames onto `path` on commit(). An uncommitted
// file is removed on destruction, so readers never observe partial output.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path, bool binary = false);
  ~AtomicFile();

  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::ifstream open_input(const std::filesystem::path& path, bool binary = false);

std::string read_file(const std::filesystem::path& path);

// Calls `fn(line, line_number)` for every non-blank line. Line numbers are
// 1-based.
void for_each_line(std::istream& in,
                   const std::function<void(std::string_view, std::size_t)>& fn);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// JSON string literal with escaping, e.g. `a"b` -> `"a\"b"`.
std::string json_quote(std::string_view s);

// printf-style "%.<digits>g" for doubles.
std::string format_g(double value, int significant_digits);

std::string trim(std::string_view s);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

}  // namespace lgip

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

#include <algorithm>
#include <set>
#include <sstream>

#include "lgip/error.hpp"
#include "lgip/io.hpp"

namespace lgip {

ModelRow model_row(const MetricsReport& report) {
  return {report.model_name, report.summary.e_inv, report.summary.e_sens_global,
          report.summary.pr_global, report.summary.per_type};
}

void check_unique_models(const std::vector<ModelRow>& rows) {
  std::set<std::string> names;
  for (const auto& r : rows) {
    if (!names.insert(r.model_name).second) {
      throw Error(ErrorCode::kDuplicateModel, "model " + r.model_name + " listed twice");
    }
  }
}

namespace {

constexpr std::string_view kAbsent = "—";

std::string fixed3(const std::optional<double>& v) {
  if (!v) return std::string(kAbsent);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

// First column left-aligned, the rest right-aligned.
std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& body,
                   TableStyle style) {
  std::ostringstream out;
  if (style == TableStyle::kMarkdown) {
    auto line = [&](const std::vector<std::string>& cells) {
      out << '|';
      for (const auto& c : cells) out << ' ' << c << " |";
      out << '\n';
    };
    line(header);
    out << "|---|";
    for (std::size_t i = 1; i < header.size(); ++i) out << "---:|";
    out << '\n';
    for (auto row : body) {
      row[0] = md_escape(row[0]);
      line(row);
    }
    return out.str();
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = utf8_length(header[c]);
    for (const auto& row : body) width[c] = std::max(width[c], utf8_length(row[c]));
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - utf8_length(cells[c]), ' ');
      if (c > 0) text += "  ";
      text += c == 0 ? cells[c] + pad : pad + cells[c];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  };
  line(header);
  for (const auto& row : body) line(row);
  return out.str();
}

}  // namespace

std::string render_main_table(const std::vector<ModelRow>& rows, TableStyle style) {
  const std::vector<std::string> header = {"Model", "E_inv↓", "E_sens↑",
                                           "PR↑"};
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    body.push_back({r.model_name, fixed3(r.e_inv), fixed3(r.e_sens), fixed3(r.pr)});
  }
  return render(header, body, style);
}

std::string render_fliptype_table(const std::vector<ModelRow>& rows, TableStyle style) {
  const std::vector<std::string> header = {"Model",   "Obj Gap", "Obj PR", "Col Gap",
                                           "Col PR",  "Cnt Gap", "Cnt PR"};
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    std::vector<std::string> cells = {r.model_name};
    for (const auto type : kFlipTypes) {
      const auto& s = r.per_type[static_cast<std::size_t>(type)];
      cells.push_back(fixed3(s.gap));
      cells.push_back(fixed3(s.pr));
    }
    body.push_back(std::move(cells));
  }
  return render(header, body, style);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string emit_scatter_csv(const std::vector<ModelRow>& rows) {
  auto num = [](const std::optional<double>& v) {
    return v ? format_g(*v, 17) : std::string{};
  };
  std::string out = "model,e_inv,e_sens,pr\n";
  for (const auto& r : rows) {
    out += csv_field(r.model_name) + "," + num(r.e_inv) + "," + num(r.e_sens) + "," +
           num(r.pr) + "\n";
  }
  return out;
}

}  // namespace lgip

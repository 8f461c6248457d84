// Copyright 2026 The spata Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spata/svg_plot.h"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string_view>

#include "spata/errors.h"

namespace spata {
namespace {

constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

std::string fixed(double value, int precision = 2) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char digits[48];
  auto [ptr, ec] = std::to_chars(digits, digits + sizeof(digits), value,
                                 std::chars_format::fixed, precision);
  std::string out(digits, ptr);
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters are not allowed in XML 1.0.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' &&
            c != '\r') {
          out += ' ';
        } else {
          out += c;
        }
    }
  }
  return out;
}

bool valid_color(std::string_view color) {
  if (color.empty()) return false;
  return std::all_of(color.begin(), color.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '#' ||
           c == '(' || c == ')' || c == ',' || c == '.' || c == ' ' ||
           c == '%';
  });
}

// Indices of the combinations to draw: the `cap` most frequent, ties broken
// by the table's lexicographic order, returned in table order.
std::vector<std::size_t> kept_combinations(const ComboTable& table,
                                           std::size_t cap) {
  std::vector<std::size_t> order(table.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  if (order.size() > cap) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return table.count(a) > table.count(b);
                     });
    order.resize(cap);
    std::sort(order.begin(), order.end());
  }
  return order;
}

}  // namespace

void validate_plot_options(const PlotOptions& options) {
  if (options.width <= 0 || options.height <= 0) {
    throw ConfigError("plot width and height must be positive");
  }
  if (!(options.opacity_floor > 0.0 && options.opacity_floor <= 1.0)) {
    throw ConfigError("opacity floor must be in (0, 1]");
  }
  if (options.palette.empty()) throw ConfigError("palette is empty");
  for (const std::string& color : options.palette) {
    if (!valid_color(color)) throw ConfigError("invalid color '" + color + "'");
  }
  if (options.max_per_class == 0) {
    throw ConfigError("per-class combination cap must be positive");
  }
}

double code_to_ordinate(const Code& code, const BinSpec& spec,
                        int depth_limit) {
  const double base = static_cast<double>(spec.bins()) + 1.0;
  double scale = 1.0;
  double norm = 0.0;
  for (int i = 1; i <= depth_limit; ++i) {
    scale /= base;
    norm += scale;
  }
  norm *= spec.bins();
  double sum = 0.0;
  scale = 1.0;
  for (BinNumber digit : code.digits) {
    scale /= base;
    sum += digit * scale;
  }
  return std::clamp(sum / norm, 0.0, 1.0);
}

std::string render_pattern_svg(const PatternCard& card,
                               const PlotOptions& options) {
  validate_plot_options(options);
  const std::size_t m = card.n_features();
  if (m == 0) throw DataError("cannot plot a card without features");

  const double width = options.width;
  const double height = options.height;
  const double plot_w = std::max(1.0, width - kMarginLeft - kMarginRight);
  const double plot_h = std::max(1.0, height - kMarginTop - kMarginBottom);
  const double bottom = kMarginTop + plot_h;

  std::vector<std::string> axis_x(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = m == 1 ? kMarginLeft + plot_w / 2
                            : kMarginLeft + plot_w * static_cast<double>(j) /
                                                static_cast<double>(m - 1);
    axis_x[j] = fixed(x);
  }
  // Ordinates per (feature, code id), computed once.
  std::vector<std::vector<std::string>> code_y(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const Code& code : card.codebooks[j]) {
      const double y = bottom - plot_h * code_to_ordinate(code, card.model.spec,
                                                          card.model.depth_limit);
      code_y[j].push_back(fixed(y));
    }
  }

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) +
         "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) +
         "\" fill=\"#ffffff\"/>\n";

  svg += "<g stroke=\"#444444\" stroke-width=\"1\">\n";
  for (std::size_t j = 0; j < m; ++j) {
    svg += "<line x1=\"" + axis_x[j] + "\" y1=\"" + fixed(kMarginTop) +
           "\" x2=\"" + axis_x[j] + "\" y2=\"" + fixed(bottom) + "\"/>\n";
  }
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" "
         "text-anchor=\"middle\" fill=\"#222222\">\n";
  for (std::size_t j = 0; j < m; ++j) {
    svg += "<text x=\"" + axis_x[j] + "\" y=\"" + fixed(bottom + 20) + "\">" +
           xml_escape(card.model.feature_names[j]) + "</text>\n";
  }
  svg += "</g>\n";

  for (std::size_t k = 0; k < card.classes.size(); ++k) {
    const ClassPattern& cls = card.classes[k];
    const std::string& color = options.palette[k % options.palette.size()];
    std::size_t max_count = 0;
    for (std::size_t n : cls.combinations.counts()) max_count = std::max(max_count, n);

    svg += "<g class=\"class-" + std::to_string(k) + "\" fill=\"none\" ";
    svg += m == 1 ? "stroke=\"none\">\n" : "stroke=\"" + color + "\" stroke-width=\"1.5\">\n";
    for (std::size_t c : kept_combinations(cls.combinations, options.max_per_class)) {
      const double ratio = static_cast<double>(cls.combinations.count(c)) /
                           static_cast<double>(max_count);
      const std::string opacity =
          fixed(std::max(options.opacity_floor, ratio), 4);
      const auto ids = cls.combinations.ids(c);
      if (m == 1) {
        svg += "<circle cx=\"" + axis_x[0] + "\" cy=\"" + code_y[0][ids[0]] +
               "\" r=\"4\" fill=\"" + color + "\" fill-opacity=\"" + opacity +
               "\"/>\n";
        continue;
      }
      svg += "<polyline stroke-opacity=\"" + opacity + "\" points=\"";
      for (std::size_t j = 0; j < m; ++j) {
        if (j > 0) svg += ' ';
        svg += axis_x[j];
        svg += ',';
        svg += code_y[j][ids[j]];
      }
      svg += "\"/>\n";
    }
    svg += "</g>\n";
  }

  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
  const double legend_x = width - kMarginRight + 20;
  for (std::size_t k = 0; k < card.classes.size(); ++k) {
    const double y = kMarginTop + 18.0 * static_cast<double>(k);
    svg += "<rect x=\"" + fixed(legend_x) + "\" y=\"" + fixed(y) +
           "\" width=\"12\" height=\"12\" fill=\"" +
           options.palette[k % options.palette.size()] + "\"/>\n";
    svg += "<text x=\"" + fixed(legend_x + 18) + "\" y=\"" + fixed(y + 10) +
           "\">" + xml_escape(card.classes[k].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void render_pattern_svg(const PatternCard& card, const PlotOptions& options,
                        const std::filesystem::path& path) {
  const std::string svg = render_pattern_svg(card, options);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << svg;
  out.flush();
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace spata

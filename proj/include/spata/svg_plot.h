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

#ifndef SPATA_SVG_PLOT_H_
#define SPATA_SVG_PLOT_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "spata/binning.h"
#include "spata/pattern.h"
#include "spata/projection.h"

namespace spata {

struct PlotOptions {
  int width = 1200;
  int height = 600;
  // Assigned to classes in label order, cycling when exhausted.
  std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                      "#d62728", "#9467bd", "#8c564b",
                                      "#e377c2", "#7f7f7f", "#bcbd22",
                                      "#17becf"};
  double opacity_floor = 0.05;
  std::size_t max_per_class = 5000;
};

// Throws ConfigError on bad options.
void validate_plot_options(const PlotOptions& options);

// Position of a code on a [0,1] axis. Same-length codes keep their
// lexicographic order; the all-b code of length depth_limit maps to 1.
double code_to_ordinate(const Code& code, const BinSpec& spec,
                        int depth_limit);

std::string render_pattern_svg(const PatternCard& card,
                               const PlotOptions& options = {});
void render_pattern_svg(const PatternCard& card, const PlotOptions& options,
                        const std::filesystem::path& path);

}  // namespace spata

#endif  // SPATA_SVG_PLOT_H_

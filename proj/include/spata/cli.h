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

#ifndef SPATA_CLI_H_
#define SPATA_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spata/dataset.h"
#include "spata/projection.h"

namespace spata {

struct RunConfig {
  std::string command;

  std::string input;
  std::optional<std::string> label;
  std::string out;
  std::string card;

  // analyze extras
  std::string projected_out;
  std::string markdown_out;
  std::string svg_out;

  int bins = kDefaultBins;
  int levels = kDefaultLevels;
  double min_frequency = kDefaultMinFrequency;
  std::vector<std::string> categorical;
  std::vector<std::string> numeric;
  bool missing_as_out_of_domain = false;
  std::optional<unsigned> threads;

  // stats filters
  std::optional<std::string> feature;
  std::optional<std::string> class_label;

  int width = 1200;
  int height = 600;

  double test_fraction = 0.3;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

// Each command returns 0 on success, 1 on a data or I/O error and 2 on a
// usage or configuration error. Summaries go to `out`, diagnostics to `err`.
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_project(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_plot(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_split(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace spata

#endif  // SPATA_CLI_H_

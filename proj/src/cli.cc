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

#include "spata/cli.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "spata/card_io.h"
#include "spata/csv.h"
#include "spata/errors.h"
#include "spata/parallel.h"
#include "spata/pattern.h"
#include "spata/svg_plot.h"

namespace spata {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string seconds(double s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << s << " s";
  return out.str();
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_model_config(const RunConfig& config) {
  BinSpec spec(config.bins);  // validates b
  require(config.levels >= 1,
          "levels must be >= 1 (got " + std::to_string(config.levels) + ")");
  require(config.min_frequency >= 0.0 && config.min_frequency < 1.0,
          "min-frequency must be in [0, 1)");
  require(!config.threads || *config.threads > 0, "threads must be >= 1");
}

std::map<std::string, ColumnKind> kind_overrides(const RunConfig& config) {
  std::map<std::string, ColumnKind> kinds;
  for (const std::string& name : config.categorical) {
    kinds[name] = ColumnKind::kCategorical;
  }
  for (const std::string& name : config.numeric) {
    require(kinds.find(name) == kinds.end(),
            "column '" + name + "' is both --categorical and --numeric");
    kinds[name] = ColumnKind::kNumeric;
  }
  if (config.label) {
    require(kinds.find(*config.label) == kinds.end(),
            "label column '" + *config.label + "' cannot be given a kind");
  }
  return kinds;
}

std::size_t shared_combinations(const ClassPattern& cls) {
  return static_cast<std::size_t>(
      std::count_if(cls.combination_overlaps.begin(),
                    cls.combination_overlaps.end(),
                    [](std::uint32_t n) { return n > 1; }));
}

std::size_t distinct_combinations(const PatternCard& card) {
  std::set<std::vector<CodeId>> all;
  for (const ClassPattern& cls : card.classes) {
    for (std::size_t c = 0; c < cls.combinations.size(); ++c) {
      const auto ids = cls.combinations.ids(c);
      all.emplace(ids.begin(), ids.end());
    }
  }
  return all.size();
}

std::string combination_text(const PatternCard& card,
                             std::span<const CodeId> ids) {
  std::string text;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (j > 0) text += ' ';
    text += format_code(card.code(j, ids[j]), card.model.spec.bins());
  }
  return text;
}

// Fixed-width text table; first column left-aligned, the rest right-aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) {
    rows_.push_back(std::move(header));
  }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> widths;
    for (const auto& row : rows_) {
      widths.resize(std::max(widths.size(), row.size()), 0);
      for (std::size_t i = 0; i < row.size(); ++i) {
        widths[i] = std::max(widths[i], row[i].size());
      }
    }
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out << "  ";
        if (i == 0) {
          out << row[i];
          if (row.size() > 1) out << std::string(widths[i] - row[i].size(), ' ');
        } else {
          out << std::string(widths[i] - row[i].size(), ' ') << row[i];
        }
      }
      out << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

void print_global_summary(const PatternCard& card, std::ostream& out) {
  out << "rows: " << card.n_rows() << "\nfeatures: " << card.n_features()
      << "\nclasses: " << card.n_classes() << "\nbins: "
      << card.model.spec.bins() << "\nlevels: " << card.model.depth_limit
      << "\n\n";

  TextTable classes({"class", "instances", "combinations", "shared"});
  std::size_t total = 0;
  std::size_t shared = 0;
  for (const ClassPattern& cls : card.classes) {
    const std::size_t s = shared_combinations(cls);
    total += cls.combinations.size();
    shared += s;
    classes.add({cls.label, std::to_string(cls.n_instances),
                 std::to_string(cls.combinations.size()), std::to_string(s)});
  }
  classes.print(out);

  out << "\ndistinct combinations: " << distinct_combinations(card) << '\n';
  out << "class combinations shared with another class: " << shared << " of "
      << total << '\n';
  if (total > 0) {
    out << "overlap fraction: " << std::fixed << std::setprecision(4)
        << static_cast<double>(shared) / static_cast<double>(total)
        << std::defaultfloat << '\n';
  }
  out << '\n';

  TextTable features({"feature", "codes", "shared codes"});
  for (std::size_t j = 0; j < card.n_features(); ++j) {
    std::set<CodeId> shared_codes;
    for (const ClassPattern& cls : card.classes) {
      for (const CodeStat& s : cls.code_stats[j]) {
        if (s.overlap > 1) shared_codes.insert(s.code);
      }
    }
    features.add({card.model.feature_names[j],
                  std::to_string(card.codebooks[j].size()),
                  std::to_string(shared_codes.size())});
  }
  features.print(out);
}

void print_feature_codes(const PatternCard& card, std::size_t j,
                         std::optional<std::size_t> only_class,
                         std::ostream& out) {
  std::vector<std::size_t> classes;
  for (std::size_t k = 0; k < card.n_classes(); ++k) {
    if (!only_class || *only_class == k) classes.push_back(k);
  }
  std::vector<std::string> header = {"code"};
  for (std::size_t k : classes) header.push_back(card.classes[k].label);
  header.push_back("classes");
  TextTable table(std::move(header));

  for (CodeId id = 0; id < card.codebooks[j].size(); ++id) {
    std::vector<std::string> row = {
        format_code(card.code(j, id), card.model.spec.bins())};
    std::uint32_t overlap = 0;
    bool present = false;
    for (std::size_t k : classes) {
      const auto& stats = card.classes[k].code_stats[j];
      auto it = std::lower_bound(
          stats.begin(), stats.end(), id,
          [](const CodeStat& s, CodeId value) { return s.code < value; });
      if (it != stats.end() && it->code == id) {
        row.push_back(std::to_string(it->count));
        overlap = it->overlap;
        present = true;
      } else {
        row.push_back("0");
      }
    }
    if (!present) continue;
    row.push_back(std::to_string(overlap));
    table.add(std::move(row));
  }
  out << "feature " << card.model.feature_names[j] << ":\n";
  table.print(out);
}

void print_class_combinations(const PatternCard& card, std::size_t k,
                              std::ostream& out) {
  const ClassPattern& cls = card.classes[k];
  out << "class " << cls.label << ": " << cls.n_instances << " instances, "
      << cls.combinations.size() << " unique combinations, "
      << shared_combinations(cls) << " shared with another class\n";
  TextTable table({"combination", "count", "classes"});
  for (std::size_t c = 0; c < cls.combinations.size(); ++c) {
    table.add({combination_text(card, cls.combinations.ids(c)),
               std::to_string(cls.combinations.count(c)),
               std::to_string(cls.combination_overlaps[c])});
  }
  table.print(out);
}

struct RawRows {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawRows read_raw_rows(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw DataError("input file '" + path + "' does not exist");
  }
  const std::string text = read_file(path);
  CsvReader reader(text);
  std::vector<std::string_view> fields;
  if (!reader.next(fields)) throw DataError("CSV input is empty");
  RawRows raw;
  raw.header.assign(fields.begin(), fields.end());
  const std::size_t width = raw.header.size();
  while (reader.next(fields)) {
    if (width > 1 && fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) {
      throw DataError("line " + std::to_string(reader.line()) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    raw.rows.emplace_back(fields.begin(), fields.end());
  }
  return raw;
}

void write_rows(const std::string& path, const RawRows& raw,
                std::span<const std::size_t> indices) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  write_csv_record(file, raw.header);
  for (std::size_t i : indices) write_csv_record(file, raw.rows[i]);
  file.flush();
  if (!file) throw DataError("failed writing '" + path + "'");
}

}  // namespace

int cmd_analyze(const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    check_model_config(config);
    require(!config.input.empty(), "analyze requires --input");
    require(config.label.has_value(), "analyze requires --label");
    require(!config.out.empty(), "analyze requires --out");
    const BinSpec spec(config.bins);
    const unsigned threads = resolve_thread_count(config.threads);
    LoadOptions load;
    load.label_column = config.label;
    load.kind_overrides = kind_overrides(config);
    load.missing_as_out_of_domain = config.missing_as_out_of_domain;

    const auto start = Clock::now();
    auto phase = start;
    const RawTable table = load_csv(config.input, load);
    if (table.missing_cells > 0) {
      err << "warning: " << table.missing_cells
          << " missing numeric cell(s) treated as out of domain\n";
    }
    const Dataset dataset = encode_categoricals(table, config.min_frequency);
    const double t_load = seconds_since(phase);

    phase = Clock::now();
    const Projection projection =
        project_dataset(dataset, spec, config.levels, threads);
    const double t_project = seconds_since(phase);

    phase = Clock::now();
    const PatternCard card = build_pattern_card(
        projection.projected, projection.model, config.min_frequency, threads);
    const double t_patterns = seconds_since(phase);

    phase = Clock::now();
    export_card_json(card, config.out);
    if (!config.projected_out.empty()) {
      export_projected_csv(projection.projected, config.bins,
                           config.projected_out);
    }
    if (!config.markdown_out.empty()) {
      std::ofstream md(config.markdown_out, std::ios::binary);
      if (!md) throw DataError("cannot write '" + config.markdown_out + "'");
      md << render_markdown_card(card);
      if (!md) throw DataError("failed writing '" + config.markdown_out + "'");
    }
    if (!config.svg_out.empty()) {
      PlotOptions plot;
      plot.width = config.width;
      plot.height = config.height;
      render_pattern_svg(card, plot, config.svg_out);
    }
    const double t_export = seconds_since(phase);

    std::size_t total = 0;
    std::size_t shared = 0;
    for (const ClassPattern& cls : card.classes) {
      total += cls.combinations.size();
      shared += shared_combinations(cls);
    }
    out << "rows: " << dataset.n_rows() << '\n'
        << "features: " << dataset.n_features() << " (from "
        << table.columns.size() << " columns)\n"
        << "classes: " << card.n_classes() << '\n'
        << "bins: " << config.bins << ", levels: " << config.levels
        << ", threads: " << threads << '\n'
        << "class combinations: " << total << " (" << shared
        << " shared with another class)\n"
        << "time load: " << seconds(t_load) << '\n'
        << "time project: " << seconds(t_project) << '\n'
        << "time patterns: " << seconds(t_patterns) << '\n'
        << "time export: " << seconds(t_export) << '\n'
        << "time total: " << seconds(seconds_since(start)) << '\n'
        << "card written to " << config.out << '\n';
    return 0;
  });
}

int cmd_project(const RunConfig& config, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    require(!config.card.empty(), "project requires --card");
    require(!config.input.empty(), "project requires --input");
    require(!config.out.empty(), "project requires --out");
    require(!config.threads || *config.threads > 0, "threads must be >= 1");
    const unsigned threads = resolve_thread_count(config.threads);

    const PatternCard card = import_card_json(config.card);
    if (!std::filesystem::exists(config.input)) {
      throw DataError("input file '" + config.input + "' does not exist");
    }
    const std::vector<std::string> header = read_csv_header(config.input);
    LoadOptions load;
    load.label_column = config.label;
    load.kind_overrides = kinds_for_features(header, card.model.feature_names);
    if (config.label) load.kind_overrides.erase(*config.label);
    load.missing_as_out_of_domain = config.missing_as_out_of_domain;

    const RawTable table = load_csv(config.input, load);
    const AlignedDataset aligned =
        encode_for_features(table, card.model.feature_names);
    for (const std::string& name : aligned.ignored_columns) {
      err << "warning: column '" << name << "' is not used by the card\n";
    }
    const ProjectedDataset projected =
        project_with_model(card.model, aligned.dataset, threads);
    export_projected_csv(projected, card.model.spec.bins(), config.out);

    std::size_t outside = 0;
    for (std::size_t i = 0; i < projected.n_rows(); ++i) {
      for (std::size_t j = 0; j < projected.n_features(); ++j) {
        if (projected.code(i, j).out_of_domain()) ++outside;
      }
    }
    if (outside > 0) {
      err << "warning: " << outside
          << " cell(s) fell outside the card's domain and were coded 0\n";
    }
    out << "rows: " << projected.n_rows() << '\n'
        << "features: " << projected.n_features() << '\n'
        << "out-of-domain cells: " << outside << '\n'
        << "codes written to " << config.out << '\n';
    return 0;
  });
}

int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!config.card.empty(), "stats requires --card");
    const PatternCard card = import_card_json(config.card);

    std::optional<std::size_t> feature;
    if (config.feature) {
      const auto& names = card.model.feature_names;
      auto it = std::find(names.begin(), names.end(), *config.feature);
      require(it != names.end(), "unknown feature '" + *config.feature + "'");
      feature = static_cast<std::size_t>(it - names.begin());
    }
    std::optional<std::size_t> cls;
    if (config.class_label) {
      for (std::size_t k = 0; k < card.n_classes(); ++k) {
        if (card.classes[k].label == *config.class_label) cls = k;
      }
      require(cls.has_value(), "unknown class '" + *config.class_label + "'");
    }

    if (feature) {
      print_feature_codes(card, *feature, cls, out);
    } else if (cls) {
      print_class_combinations(card, *cls, out);
    } else {
      print_global_summary(card, out);
    }
    return 0;
  });
}

int cmd_plot(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!config.card.empty(), "plot requires --card");
    require(!config.out.empty(), "plot requires --out");
    PlotOptions options;
    options.width = config.width;
    options.height = config.height;
    validate_plot_options(options);
    const PatternCard card = import_card_json(config.card);
    render_pattern_svg(card, options, config.out);
    out << "plot written to " << config.out << '\n';
    return 0;
  });
}

int cmd_split(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(!config.input.empty(), "split requires --input");
    require(config.label.has_value(), "split requires --label");
    require(!config.train_out.empty() && !config.test_out.empty(),
            "split requires --train-out and --test-out");
    require(config.test_fraction > 0.0 && config.test_fraction < 1.0,
            "test fraction must be in (0, 1)");

    const RawRows raw = read_raw_rows(config.input);
    auto it = std::find(raw.header.begin(), raw.header.end(), *config.label);
    if (it == raw.header.end()) {
      throw DataError("label column '" + *config.label +
                      "' not found in header");
    }
    const std::size_t label_index =
        static_cast<std::size_t>(it - raw.header.begin());
    std::vector<std::string> labels;
    labels.reserve(raw.rows.size());
    for (const auto& row : raw.rows) labels.push_back(row[label_index]);

    const SplitIndices split =
        stratified_split_indices(labels, config.test_fraction, config.seed);
    for (const std::string& warning : split.warnings) {
      err << "warning: " << warning << '\n';
    }
    write_rows(config.train_out, raw, split.train);
    write_rows(config.test_out, raw, split.test);
    out << "train rows: " << split.train.size() << " -> " << config.train_out
        << '\n'
        << "test rows: " << split.test.size() << " -> " << config.test_out
        << '\n';
    return 0;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Hierarchical sigma-binning patterns for tabular data"};
  app.name("spata");
  app.set_version_flag("--version", SPATA_VERSION);
  app.require_subcommand(1);

  RunConfig config;
  unsigned threads = 0;

  auto* analyze = app.add_subcommand("analyze", "Build a pattern card from a labeled CSV");
  auto* project = app.add_subcommand("project", "Project a CSV with a card's trees");
  auto* stats = app.add_subcommand("stats", "Print statistics stored in a card");
  auto* plot = app.add_subcommand("plot", "Render a card as SVG");
  auto* split = app.add_subcommand("split", "Stratified train/test split of a CSV");

  std::vector<CLI::Option*> thread_options;
  auto add_threads = [&](CLI::App* cmd) {
    thread_options.push_back(cmd->add_option(
        "--threads", threads,
        "Worker threads (default: SPATA_THREADS or hardware concurrency)"));
  };
  auto add_label = [&](CLI::App* cmd, const char* help) {
    cmd->add_option("--label", config.label, help);
  };

  analyze->add_option("--input", config.input, "Input CSV")->required();
  add_label(analyze, "Class label column");
  analyze->add_option("--out", config.out, "Card JSON output")->required();
  analyze->add_option("--projected", config.projected_out, "Projected CSV output");
  analyze->add_option("--markdown", config.markdown_out, "Markdown card output");
  analyze->add_option("--svg", config.svg_out, "SVG overview output");
  analyze->add_option("--bins", config.bins, "Bins per level (odd, >= 3)")
      ->capture_default_str();
  analyze->add_option("--levels", config.levels, "Maximum code length")
      ->capture_default_str();
  analyze->add_option("--min-frequency", config.min_frequency,
                      "Categories rarer than this are pooled")
      ->capture_default_str();
  analyze->add_option("--categorical", config.categorical,
                      "Treat column as categorical")->delimiter(',');
  analyze->add_option("--numeric", config.numeric, "Treat column as numeric")
      ->delimiter(',');
  analyze->add_flag("--missing-as-out-of-domain", config.missing_as_out_of_domain,
                    "Code empty or non-numeric cells as 0 instead of failing");
  analyze->add_option("--width", config.width, "SVG width")->capture_default_str();
  analyze->add_option("--height", config.height, "SVG height")->capture_default_str();
  add_threads(analyze);

  project->add_option("--card", config.card, "Card JSON")->required();
  project->add_option("--input", config.input, "Input CSV")->required();
  add_label(project, "Label column to carry through");
  project->add_option("--out", config.out, "Projected CSV output")->required();
  project->add_flag("--missing-as-out-of-domain", config.missing_as_out_of_domain,
                    "Code empty or non-numeric cells as 0 instead of failing");
  add_threads(project);

  stats->add_option("--card", config.card, "Card JSON")->required();
  stats->add_option("--feature", config.feature, "Show codes of one feature");
  stats->add_option("--class", config.class_label, "Show combinations of one class");

  plot->add_option("--card", config.card, "Card JSON")->required();
  plot->add_option("--out", config.out, "SVG output")->required();
  plot->add_option("--width", config.width, "Width in pixels")->capture_default_str();
  plot->add_option("--height", config.height, "Height in pixels")->capture_default_str();

  split->add_option("--input", config.input, "Input CSV")->required();
  add_label(split, "Class label column");
  split->add_option("--test-fraction", config.test_fraction,
                    "Share of each class sent to the test file")
      ->capture_default_str();
  split->add_option("--seed", config.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--train-out", config.train_out, "Train CSV output")->required();
  split->add_option("--test-out", config.test_out, "Test CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  for (CLI::Option* option : thread_options) {
    if (option->count() > 0) config.threads = threads;
  }

  if (analyze->parsed()) return cmd_analyze(config, out, err);
  if (project->parsed()) return cmd_project(config, out, err);
  if (stats->parsed()) return cmd_stats(config, out, err);
  if (plot->parsed()) return cmd_plot(config, out, err);
  return cmd_split(config, out, err);
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(argc, argv, std::cout, std::cerr);
}

}  // namespace spata

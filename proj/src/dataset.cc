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

#include "spata/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "spata/csv.h"
#include "spata/errors.h"

namespace spata {
namespace {

std::optional<double> parse_real(std::string_view cell) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
    cell.remove_prefix(1);
  }
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) {
    cell.remove_suffix(1);
  }
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

bool is_blank_record(const std::vector<std::string_view>& fields,
                     std::size_t width) {
  return width > 1 && fields.size() == 1 && fields[0].empty();
}

// Per-column scratch state while scanning.
struct ColumnScan {
  std::vector<double> numbers;
  std::vector<std::string> texts;
  std::size_t non_empty = 0;
  std::size_t first_bad_line = 0;   // first non-empty unparseable cell
  std::size_t first_empty_line = 0;
  bool all_parse = true;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform integer in [0, bound) without modulo bias.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % bound;
}

}  // namespace

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  CsvReader reader(text);
  std::vector<std::string_view> fields;
  if (!reader.next(fields)) {
    throw DataError("'" + path.string() + "' is empty");
  }
  return {fields.begin(), fields.end()};
}

RawTable load_csv(const std::filesystem::path& path,
                  const LoadOptions& options) {
  if (!std::filesystem::exists(path)) {
    throw DataError("input file '" + path.string() + "' does not exist");
  }
  return parse_csv(read_file(path), options);
}

RawTable parse_csv(std::string_view text, const LoadOptions& options) {
  CsvReader reader(text);
  std::vector<std::string_view> fields;
  if (!reader.next(fields)) throw DataError("CSV input is empty");

  const std::vector<std::string> header(fields.begin(), fields.end());
  const std::size_t width = header.size();
  {
    std::unordered_set<std::string> seen;
    for (const std::string& name : header) {
      if (!seen.insert(name).second) {
        throw DataError("duplicate column name '" + name + "' in header");
      }
    }
  }

  std::optional<std::size_t> label_index;
  if (options.label_column) {
    auto it = std::find(header.begin(), header.end(), *options.label_column);
    if (it == header.end()) {
      throw DataError("label column '" + *options.label_column +
                      "' not found in header");
    }
    label_index = static_cast<std::size_t>(it - header.begin());
  }
  for (const auto& [name, kind] : options.kind_overrides) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw DataError("column '" + name + "' given a kind but not in header");
    }
  }

  auto override_of = [&](std::size_t j) -> std::optional<ColumnKind> {
    auto it = options.kind_overrides.find(header[j]);
    if (it == options.kind_overrides.end()) return std::nullopt;
    return it->second;
  };

  std::vector<ColumnScan> scans(width);
  std::vector<std::string> labels;
  std::size_t n_rows = 0;
  while (reader.next(fields)) {
    if (is_blank_record(fields, width)) continue;
    if (fields.size() != width) {
      throw DataError("line " + std::to_string(reader.line()) + ": expected " +
                      std::to_string(width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    ++n_rows;
    for (std::size_t j = 0; j < width; ++j) {
      if (label_index && j == *label_index) {
        labels.emplace_back(fields[j]);
        continue;
      }
      ColumnScan& scan = scans[j];
      if (override_of(j) == ColumnKind::kCategorical) {
        scan.texts.emplace_back(fields[j]);
        continue;
      }
      const std::optional<double> value = parse_real(fields[j]);
      const bool empty = fields[j].empty();
      if (!empty) ++scan.non_empty;
      if (value) {
        scan.numbers.push_back(*value);
      } else {
        scan.numbers.push_back(std::numeric_limits<double>::quiet_NaN());
        if (empty) {
          if (scan.first_empty_line == 0) scan.first_empty_line = reader.line();
        } else {
          scan.all_parse = false;
          if (scan.first_bad_line == 0) scan.first_bad_line = reader.line();
        }
      }
    }
  }

  RawTable table;
  table.n_rows = n_rows;
  if (label_index) table.labels = std::move(labels);

  std::vector<std::size_t> rescan;
  for (std::size_t j = 0; j < width; ++j) {
    if (label_index && j == *label_index) continue;
    ColumnScan& scan = scans[j];
    RawColumn column;
    column.name = header[j];
    const std::optional<ColumnKind> forced = override_of(j);
    if (forced) {
      column.kind = *forced;
    } else {
      column.kind = scan.all_parse && scan.non_empty > 0
                        ? ColumnKind::kNumeric
                        : ColumnKind::kCategorical;
    }

    if (column.kind == ColumnKind::kNumeric) {
      const std::size_t bad_line =
          std::min(scan.first_empty_line ? scan.first_empty_line : SIZE_MAX,
                   scan.first_bad_line ? scan.first_bad_line : SIZE_MAX);
      if (bad_line != SIZE_MAX) {
        if (!options.missing_as_out_of_domain) {
          throw DataError("column '" + column.name +
                          "': empty or non-numeric cell on line " +
                          std::to_string(bad_line) +
                          " (use --missing-as-out-of-domain to accept it)");
        }
        table.missing_cells += static_cast<std::size_t>(std::count_if(
            scan.numbers.begin(), scan.numbers.end(),
            [](double v) { return std::isnan(v); }));
      }
      column.numbers = std::move(scan.numbers);
    } else if (forced) {
      column.categories = std::move(scan.texts);
    } else {
      rescan.push_back(table.columns.size());
    }
    scan = ColumnScan{};
    table.columns.push_back(std::move(column));
  }

  if (!rescan.empty()) {
    // Auto-detected categorical columns: second pass for the raw text.
    std::vector<std::size_t> source(table.columns.size());
    for (std::size_t j = 0, c = 0; j < width; ++j) {
      if (label_index && j == *label_index) continue;
      source[c++] = j;
    }
    for (std::size_t c : rescan) table.columns[c].categories.reserve(n_rows);
    CsvReader again(text);
    again.next(fields);
    while (again.next(fields)) {
      if (is_blank_record(fields, width)) continue;
      for (std::size_t c : rescan) {
        table.columns[c].categories.emplace_back(fields[source[c]]);
      }
    }
  }
  return table;
}

Dataset::Dataset(std::vector<std::string> feature_names,
                 std::vector<std::vector<double>> columns,
                 std::optional<std::vector<std::string>> labels)
    : feature_names_(std::move(feature_names)),
      columns_(std::move(columns)),
      labels_(std::move(labels)) {
  if (feature_names_.size() != columns_.size()) {
    throw DataError("dataset has " + std::to_string(feature_names_.size()) +
                    " names for " + std::to_string(columns_.size()) +
                    " columns");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& name : feature_names_) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate feature name '" + name + "'");
    }
  }
  if (!columns_.empty()) {
    n_rows_ = columns_.front().size();
  } else if (labels_) {
    n_rows_ = labels_->size();
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != n_rows_) {
      throw DataError("column '" + feature_names_[j] + "' has " +
                      std::to_string(columns_[j].size()) + " rows, expected " +
                      std::to_string(n_rows_));
    }
  }
  if (labels_ && labels_->size() != n_rows_) {
    throw DataError("label vector has " + std::to_string(labels_->size()) +
                    " entries, expected " + std::to_string(n_rows_));
  }
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  std::vector<std::vector<double>> columns(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    columns[j].reserve(indices.size());
    for (std::size_t i : indices) columns[j].push_back(columns_[j][i]);
  }
  std::optional<std::vector<std::string>> labels;
  if (labels_) {
    labels.emplace();
    labels->reserve(indices.size());
    for (std::size_t i : indices) labels->push_back((*labels_)[i]);
  }
  Dataset out(feature_names_, std::move(columns), std::move(labels));
  out.n_rows_ = indices.size();
  return out;
}

Dataset encode_categoricals(const RawTable& table, double min_frequency) {
  if (!(min_frequency >= 0.0 && min_frequency < 1.0)) {
    throw ConfigError("min_frequency must be in [0, 1)");
  }
  const double n = static_cast<double>(table.n_rows);
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  for (const RawColumn& column : table.columns) {
    if (column.kind == ColumnKind::kNumeric) {
      names.push_back(column.name);
      columns.push_back(column.numbers);
      continue;
    }

    std::unordered_map<std::string, std::size_t> counts;
    for (const std::string& value : column.categories) ++counts[value];
    std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(),
                                                             counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    std::unordered_map<std::string, std::size_t> slot;
    bool pooled_any = false;
    std::size_t kept = 0;
    for (const auto& [category, count] : ordered) {
      if (static_cast<double>(count) / n < min_frequency) {
        pooled_any = true;
        continue;
      }
      slot.emplace(category, kept++);
      names.push_back(column.name + "=" + category);
    }
    if (pooled_any) names.push_back(column.name + "=" + std::string(kOtherCategory));

    const std::size_t first = columns.size();
    const std::size_t width = kept + (pooled_any ? 1 : 0);
    columns.resize(first + width,
                   std::vector<double>(table.n_rows, 0.0));
    for (std::size_t i = 0; i < column.categories.size(); ++i) {
      auto it = slot.find(column.categories[i]);
      const std::size_t k = it == slot.end() ? kept : it->second;
      columns[first + k][i] = 1.0;
    }
  }
  return Dataset(std::move(names), std::move(columns), table.labels);
}

namespace {

struct FeatureSource {
  std::size_t column;
  std::optional<std::string> category;  // nullopt for numeric features
};

std::optional<FeatureSource> resolve_source(
    const std::string& feature, std::span<const std::string> column_names) {
  for (std::size_t c = 0; c < column_names.size(); ++c) {
    if (column_names[c] == feature) return FeatureSource{c, std::nullopt};
  }
  std::optional<FeatureSource> best;
  std::size_t best_length = 0;
  for (std::size_t c = 0; c < column_names.size(); ++c) {
    const std::string& name = column_names[c];
    if (feature.size() > name.size() && feature.compare(0, name.size(), name) == 0 &&
        feature[name.size()] == '=' && (!best || name.size() > best_length)) {
      best = FeatureSource{c, feature.substr(name.size() + 1)};
      best_length = name.size();
    }
  }
  return best;
}

}  // namespace

AlignedDataset encode_for_features(const RawTable& table,
                                   std::span<const std::string> feature_names) {
  std::vector<std::string> column_names;
  for (const RawColumn& column : table.columns) column_names.push_back(column.name);

  std::vector<FeatureSource> sources;
  std::vector<std::string> missing;
  for (const std::string& feature : feature_names) {
    std::optional<FeatureSource> source = resolve_source(feature, column_names);
    if (!source) {
      missing.push_back(feature);
      continue;
    }
    const RawColumn& column = table.columns[source->column];
    const bool wants_numeric = !source->category.has_value();
    if (wants_numeric && column.kind != ColumnKind::kNumeric) {
      throw DataError("feature '" + feature +
                      "' is numeric but column '" + column.name +
                      "' is categorical");
    }
    if (!wants_numeric && column.kind != ColumnKind::kCategorical) {
      throw DataError("feature '" + feature + "' is one-hot but column '" +
                      column.name + "' is numeric");
    }
    sources.push_back(*std::move(source));
  }
  if (!missing.empty()) {
    std::string message = "input is missing " + std::to_string(missing.size()) +
                          " feature(s) required by the card:";
    for (const std::string& name : missing) message += " '" + name + "'";
    throw DataError(message);
  }

  // Categories listed explicitly per source column; everything else is
  // "__other__".
  std::vector<std::set<std::string>> listed(table.columns.size());
  std::vector<bool> used(table.columns.size(), false);
  for (const FeatureSource& source : sources) {
    used[source.column] = true;
    if (source.category && *source.category != kOtherCategory) {
      listed[source.column].insert(*source.category);
    }
  }

  std::vector<std::vector<double>> columns;
  columns.reserve(sources.size());
  for (const FeatureSource& source : sources) {
    const RawColumn& column = table.columns[source.column];
    if (!source.category) {
      columns.push_back(column.numbers);
      continue;
    }
    std::vector<double> hot(table.n_rows, 0.0);
    const bool other = *source.category == kOtherCategory;
    for (std::size_t i = 0; i < column.categories.size(); ++i) {
      const std::string& value = column.categories[i];
      const bool match = other ? listed[source.column].count(value) == 0
                               : value == *source.category;
      if (match) hot[i] = 1.0;
    }
    columns.push_back(std::move(hot));
  }

  AlignedDataset out{
      Dataset({feature_names.begin(), feature_names.end()}, std::move(columns),
              table.labels),
      {}};
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (!used[c]) out.ignored_columns.push_back(table.columns[c].name);
  }
  return out;
}

std::map<std::string, ColumnKind> kinds_for_features(
    std::span<const std::string> header,
    std::span<const std::string> feature_names) {
  std::map<std::string, ColumnKind> kinds;
  for (const std::string& feature : feature_names) {
    std::optional<FeatureSource> source = resolve_source(feature, header);
    if (!source) continue;
    kinds[header[source->column]] = source->category
                                        ? ColumnKind::kCategorical
                                        : ColumnKind::kNumeric;
  }
  return kinds;
}

bool label_less(std::string_view a, std::string_view b) {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      std::string_view ra = a.substr(i, ie - i);
      std::string_view rb = b.substr(j, je - j);
      while (ra.size() > 1 && ra.front() == '0') ra.remove_prefix(1);
      while (rb.size() > 1 && rb.front() == '0') rb.remove_prefix(1);
      if (ra.size() != rb.size()) return ra.size() < rb.size();
      if (ra != rb) return ra < rb;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) {
      return static_cast<unsigned char>(a[i]) <
             static_cast<unsigned char>(b[j]);
    }
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  // Numerically equal ("01" vs "1"): fall back to bytes for a total order.
  return a < b;
}

std::vector<std::string> sorted_classes(std::span<const std::string> labels) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::string> classes;
  for (const std::string& label : labels) {
    if (seen.insert(label).second) classes.push_back(label);
  }
  std::sort(classes.begin(), classes.end(),
            [](const std::string& a, const std::string& b) {
              return label_less(a, b);
            });
  return classes;
}

SplitIndices stratified_split_indices(std::span<const std::string> labels,
                                      double test_fraction,
                                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must be in (0, 1)");
  }
  const std::vector<std::string> classes = sorted_classes(labels);
  std::unordered_map<std::string_view, std::size_t> class_index;
  for (std::size_t k = 0; k < classes.size(); ++k) class_index[classes[k]] = k;

  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[class_index.at(labels[i])].push_back(i);
  }

  SplitIndices split;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::vector<std::size_t>& rows = members[k];
    if (rows.size() < 2) {
      split.warnings.push_back("class '" + classes[k] +
                               "' has a single instance; kept in train");
      split.train.insert(split.train.end(), rows.begin(), rows.end());
      continue;
    }
    // Every class keeps at least one training row.
    const auto n_test = std::min(
        rows.size() - 1,
        static_cast<std::size_t>(std::floor(
            test_fraction * static_cast<double>(rows.size()) + 0.5)));

    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k)));
    for (std::size_t i = rows.size() - 1; i > 0; --i) {
      std::swap(rows[i], rows[draw_below(rng, i + 1)]);
    }
    split.test.insert(split.test.end(), rows.begin(), rows.begin() + n_test);
    split.train.insert(split.train.end(), rows.begin() + n_test, rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Split stratified_split(const Dataset& dataset, double test_fraction,
                       std::uint64_t seed) {
  if (!dataset.labels()) {
    throw DataError("stratified split requires class labels");
  }
  SplitIndices indices =
      stratified_split_indices(*dataset.labels(), test_fraction, seed);
  return Split{dataset.select_rows(indices.train),
               dataset.select_rows(indices.test), std::move(indices.warnings)};
}

}  // namespace spata

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

#ifndef SPATA_DATASET_H_
#define SPATA_DATASET_H_

// Tabular ingestion: CSV loading with per-column kind detection, one-hot
// encoding with rare-category pooling, and stratified train/test splits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spata {

enum class ColumnKind { kNumeric, kCategorical };

inline constexpr double kDefaultMinFrequency = 0.01;
inline constexpr std::string_view kOtherCategory = "__other__";

struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> numbers;            // kNumeric; NaN marks missing
  std::vector<std::string> categories;    // kCategorical
};

struct RawTable {
  std::vector<RawColumn> columns;
  std::optional<std::vector<std::string>> labels;
  std::size_t n_rows = 0;
  std::size_t missing_cells = 0;  // numeric cells flagged as missing
};

struct LoadOptions {
  std::optional<std::string> label_column;
  std::map<std::string, ColumnKind> kind_overrides;
  // Empty or unparseable numeric cells become NaN (projected to "0")
  // instead of failing the load.
  bool missing_as_out_of_domain = false;
};

// Column names of the header row only.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

// A column is numeric when every non-empty cell parses as a finite real and
// at least one cell is non-empty; overrides win. Throws DataError for a
// missing/empty file, duplicate header names, an absent label column, ragged
// rows, or missing numeric cells without `missing_as_out_of_domain`.
RawTable load_csv(const std::filesystem::path& path,
                  const LoadOptions& options = {});
RawTable parse_csv(std::string_view text, const LoadOptions& options = {});

// Column-major numeric table with optional class labels.
class Dataset {
 public:
  Dataset() = default;
  // Throws DataError if the shape invariants do not hold.
  Dataset(std::vector<std::string> feature_names,
          std::vector<std::vector<double>> columns,
          std::optional<std::vector<std::string>> labels = std::nullopt);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<double>& column(std::size_t j) const {
    return columns_[j];
  }
  const std::vector<std::vector<double>>& columns() const { return columns_; }
  const std::optional<std::vector<std::string>>& labels() const {
    return labels_;
  }

  // Rows at `indices`, in the given order.
  Dataset select_rows(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> columns_;
  std::optional<std::vector<std::string>> labels_;
  std::size_t n_rows_ = 0;
};

// One-hot encodes categorical columns as "<col>=<category>" 0/1 columns,
// categories ordered by descending frequency then lexicographically.
// Categories with relative frequency below `min_frequency` are pooled into
// "<col>=__other__". Numeric columns pass through unchanged.
Dataset encode_categoricals(const RawTable& table,
                            double min_frequency = kDefaultMinFrequency);

struct AlignedDataset {
  Dataset dataset;
  std::vector<std::string> ignored_columns;
};

// Builds exactly `feature_names` (as produced by encode_categoricals on some
// other table) from `table`: numeric features by column name, one-hot
// features by their source column, with "__other__" set for any category not
// listed. Throws DataError naming every feature that has no source column.
AlignedDataset encode_for_features(const RawTable& table,
                                   std::span<const std::string> feature_names);

// Kind overrides that make load_csv read source columns of `feature_names`
// the same way they were read when the features were created.
std::map<std::string, ColumnKind> kinds_for_features(
    std::span<const std::string> header,
    std::span<const std::string> feature_names);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

// Per class, round(test_fraction * count) rows (ties toward test) go to
// test, chosen by a shuffle seeded with (seed, class index). Singleton
// classes stay in train and are reported in `warnings`. Both index lists are
// ascending. Throws ConfigError unless 0 < test_fraction < 1.
SplitIndices stratified_split_indices(std::span<const std::string> labels,
                                      double test_fraction,
                                      std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::string> warnings;
};

// Throws DataError if the dataset has no labels.
Split stratified_split(const Dataset& dataset, double test_fraction,
                       std::uint64_t seed);

// Natural ordering of class labels: digit runs compare by numeric value,
// everything else byte-wise ("k2" < "k10").
bool label_less(std::string_view a, std::string_view b);

// Distinct labels in label_less order.
std::vector<std::string> sorted_classes(std::span<const std::string> labels);

}  // namespace spata

#endif  // SPATA_DATASET_H_
